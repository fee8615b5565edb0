//! Locations of interest and IRS siting.

use super::CoverSet;
use crate::geometry::{Point2, Point3};
use crate::irs::{visible, IrsModule};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoverageError {
    #[error("ground node {0} lies outside every covering disc")]
    Uncovered(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LoiRule {
    /// Greedy set cover: fewest discs that still cover every GN.
    #[default]
    GreedyCover,
    /// Every disc containing at least one GN.
    AllCovering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loi {
    pub center: Point2,
    /// GNs this LoI is responsible for.
    pub covered: Vec<usize>,
}

pub fn select_lois(cover: &CoverSet, gns: &[Point3], rule: LoiRule) -> Result<Vec<Loi>, CoverageError> {
    let r = cover.radius_small * (1.0 + 1e-12);
    let members: Vec<Vec<usize>> = cover
        .circle_centers
        .iter()
        .map(|c| (0..gns.len()).filter(|&n| c.dist(&gns[n].xy()) <= r).collect())
        .collect();
    for n in 0..gns.len() {
        if !members.iter().any(|m| m.contains(&n)) {
            return Err(CoverageError::Uncovered(n));
        }
    }
    match rule {
        LoiRule::AllCovering => Ok(cover
            .circle_centers
            .iter()
            .zip(&members)
            .filter(|(_, m)| !m.is_empty())
            .map(|(c, m)| Loi { center: *c, covered: m.clone() })
            .collect()),
        LoiRule::GreedyCover => {
            let mut uncovered: Vec<bool> = vec![true; gns.len()];
            let mut out = Vec::new();
            while uncovered.iter().any(|&u| u) {
                // most newly covered GNs; ties go to the disc whose GNs sit closest
                let (best, _) = members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let gain = m.iter().filter(|&&n| uncovered[n]).count();
                        let spread: f64 = m
                            .iter()
                            .filter(|&&n| uncovered[n])
                            .map(|&n| cover.circle_centers[i].dist(&gns[n].xy()))
                            .sum();
                        (i, (gain, spread))
                    })
                    .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.total_cmp(&a.1 .1)))
                    .expect("cover has circles");
                let covered: Vec<usize> = members[best].iter().copied().filter(|&n| uncovered[n]).collect();
                for &n in &covered {
                    uncovered[n] = false;
                }
                out.push(Loi { center: cover.circle_centers[best], covered });
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlacementConfig {
    pub height: f64,
    /// Horizontal distance from the anchor GN, m.
    pub gn_distance: f64,
    pub n_elements: usize,
    pub elem_dx: f64,
    pub elem_dz: f64,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            height: 10.0,
            gn_distance: 20.0,
            n_elements: 44,
            elem_dx: 0.075,
            elem_dz: 0.075,
        }
    }
}

fn unit_or_x(v: Point2) -> Point2 {
    let n = v.norm();
    if n < 1e-9 {
        Point2::new(1.0, 0.0)
    } else {
        v.scale(1.0 / n)
    }
}

fn facing(from: Point2, to: Point2) -> f64 {
    let d = unit_or_x(to.sub(&from));
    d.y.atan2(d.x)
}

fn module_at(pos: Point2, normal_azimuth: f64, cfg: &PlacementConfig) -> IrsModule {
    IrsModule {
        ref_position: pos.at_height(cfg.height),
        n_elements: cfg.n_elements,
        elem_dx: cfg.elem_dx,
        elem_dz: cfg.elem_dz,
        normal_azimuth,
    }
}

/// One IRS per LoI, `gn_distance` from the LoI's nearest GN on the side of the
/// LoI, facing the LoI's GNs. GNs left without a visible IRS get their own.
pub fn place_irs(lois: &[Loi], gns: &[Point3], cfg: &PlacementConfig) -> Vec<IrsModule> {
    let mut out = Vec::new();
    for loi in lois {
        if loi.covered.is_empty() {
            continue;
        }
        let anchor = loi
            .covered
            .iter()
            .map(|&n| gns[n].xy())
            .min_by(|a, b| a.dist(&loi.center).total_cmp(&b.dist(&loi.center)))
            .unwrap();
        let dir = unit_or_x(loi.center.sub(&anchor));
        let pos = anchor.add(&dir.scale(cfg.gn_distance));
        let k = loi.covered.len() as f64;
        let centroid = loi
            .covered
            .iter()
            .fold(Point2::new(0.0, 0.0), |a, &n| a.add(&gns[n].xy()))
            .scale(1.0 / k);
        out.push(module_at(pos, facing(pos, centroid), cfg));
    }
    for (n, g) in gns.iter().enumerate() {
        if !out.iter().any(|m| visible(g, m)) {
            let home = lois.iter().find(|l| l.covered.contains(&n)).map_or(g.xy(), |l| l.center);
            let dir = unit_or_x(home.sub(&g.xy()));
            let pos = g.xy().add(&dir.scale(cfg.gn_distance));
            out.push(module_at(pos, facing(pos, g.xy()), cfg));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::irs_gn_p_los;
    use crate::coverage::multi_tier_pack;

    #[test]
    fn all_at_centre_one_loi() {
        let cover = multi_tier_pack(60.0, 20.0);
        let gns = vec![Point3::ground(0.0, 0.0); 4];
        let lois = select_lois(&cover, &gns, LoiRule::GreedyCover).unwrap();
        assert_eq!(lois.len(), 1);
        assert_eq!(lois[0].covered, vec![0, 1, 2, 3]);
    }

    #[test]
    fn boundary_is_covered() {
        let cover = CoverSet {
            circle_centers: vec![Point2::new(0.0, 0.0)],
            radius_small: 20.0,
            tier_patterns: vec![],
            target_center: Point2::new(0.0, 0.0),
            target_radius: 20.0,
        };
        let gns = [Point3::ground(20.0, 0.0)];
        assert_eq!(select_lois(&cover, &gns, LoiRule::AllCovering).unwrap().len(), 1);
        let far = [Point3::ground(20.5, 0.0)];
        assert_eq!(select_lois(&cover, &far, LoiRule::AllCovering), Err(CoverageError::Uncovered(0)));
    }

    #[test]
    fn one_gn_gets_facing_irs() {
        let gns = [Point3::ground(10.0, 5.0)];
        let lois = [Loi { center: Point2::new(0.0, 0.0), covered: vec![0] }];
        let irs = place_irs(&lois, &gns, &PlacementConfig::default());
        assert_eq!(irs.len(), 1);
        let d = irs[0].ref_position.dist_2d(&gns[0]);
        assert!((d - 20.0).abs() < 1e-9);
        assert!(visible(&gns[0], &irs[0]));
        assert!(irs_gn_p_los(d) > 0.95);
        assert!(place_irs(&[], &[], &PlacementConfig::default()).is_empty());
    }

    #[test]
    fn every_gn_sees_an_irs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let cover = multi_tier_pack(60.0, 20.0);
        for _ in 0..50 {
            let gns: Vec<Point3> = (0..6)
                .map(|_| {
                    let r = 60.0 * rng.gen::<f64>().sqrt();
                    let a = rng.gen_range(0.0..std::f64::consts::TAU);
                    Point3::ground(r * a.cos(), r * a.sin())
                })
                .collect();
            let lois = select_lois(&cover, &gns, LoiRule::GreedyCover).unwrap();
            let irs = place_irs(&lois, &gns, &PlacementConfig::default());
            for g in &gns {
                assert!(irs.iter().any(|m| visible(g, m)));
            }
            for m in &irs {
                let near = gns.iter().map(|g| m.ref_position.dist_2d(g)).fold(f64::INFINITY, f64::min);
                assert!(near <= 20.0 + 1e-9);
            }
        }
    }
}
