//! Multi-tier circle packing.

use super::patterns::{lambda, pattern, MAX_PATTERN};
use crate::geometry::Point2;
use crate::registry::{Named, Registry};
use serde::{Deserialize, Serialize};

const RATIO_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSet {
    pub circle_centers: Vec<Point2>,
    /// Radius of each covering disc, m.
    pub radius_small: f64,
    /// Pattern size used at each tier, outermost first.
    pub tier_patterns: Vec<usize>,
    pub target_center: Point2,
    pub target_radius: f64,
}

impl CoverSet {
    pub fn tiers(&self) -> usize {
        self.tier_patterns.len()
    }

    pub fn len(&self) -> usize {
        self.circle_centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circle_centers.is_empty()
    }

    pub fn covers(&self, p: &Point2) -> bool {
        self.circle_centers
            .iter()
            .any(|c| c.dist(p) <= self.radius_small * (1.0 + 1e-12))
    }

    /// Points of the target disc not covered: `n` seeded uniform samples plus the rim.
    pub fn uncovered_samples(&self, n: usize, seed: u64) -> usize {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rim = (0..720).map(|k| {
            let a = k as f64 * std::f64::consts::PI / 360.0;
            Point2::new(a.cos(), a.sin())
        });
        let inner = (0..n).map(|_| {
            let r = rng.gen::<f64>().sqrt();
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            Point2::new(r * a.cos(), r * a.sin())
        });
        let pts: Vec<Point2> = rim.chain(inner).collect();
        pts.iter()
            .map(|p| self.target_center.add(&p.scale(self.target_radius)))
            .filter(|p| !self.covers(p))
            .count()
    }
}

/// Pattern minimising `u^μ(u)`, with `μ(u) = log2(ratio)/log2(Λ(u))`.
pub fn optimal_pattern(r_target: f64, r_small: f64) -> usize {
    if r_target <= r_small * (1.0 + RATIO_EPS) {
        return 1;
    }
    let ratio = r_target / r_small;
    (3..=MAX_PATTERN)
        .map(|u| {
            let mu = ratio.log2() / lambda(u).log2();
            (u, (u as f64).powf(mu))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(u, _)| u)
        .expect("non-empty pattern range")
}

/// Lay out the tiers over the target disc.
pub fn expand_tiers(center: Point2, radius: f64, tiers: &[usize], r_small: f64) -> CoverSet {
    let mut circles = vec![(center, radius)];
    for &u in tiers {
        let pat = pattern(u);
        circles = circles
            .iter()
            .flat_map(|(c, rho)| {
                let next = rho / pat.lambda;
                pat.centers.iter().map(move |o| (c.add(&o.scale(*rho)), next))
            })
            .collect();
    }
    CoverSet {
        circle_centers: circles.into_iter().map(|(c, _)| c).collect(),
        radius_small: r_small,
        tier_patterns: tiers.to_vec(),
        target_center: center,
        target_radius: radius,
    }
}

pub fn circle_count(tiers: &[usize]) -> usize {
    tiers.iter().product()
}

pub trait PackingStrategy: Named + Send + Sync {
    /// Pattern per tier so that the product of enlargements reaches `ratio`.
    fn tiers(&self, ratio: f64) -> Vec<usize>;

    fn pack(&self, r_geo: f64, r_small: f64) -> CoverSet {
        self.pack_at(Point2::new(0.0, 0.0), r_geo, r_small)
    }

    fn pack_at(&self, center: Point2, r_geo: f64, r_small: f64) -> CoverSet {
        assert!(r_geo > 0.0 && r_small > 0.0);
        expand_tiers(center, r_geo, &self.tiers(r_geo / r_small), r_small)
    }
}

/// Fewest circles over all tier combinations (exact search).
pub struct MultiTier;

/// Per-tier pattern chosen by the closed-form rule in [`optimal_pattern`].
pub struct PropositionGreedy;

/// The same pattern at every tier.
pub struct FixedMultilevel {
    pub u: usize,
    name: &'static str,
}

impl FixedMultilevel {
    pub fn new(u: usize) -> Self {
        let name = match u {
            5 => "multilevel-5",
            7 => "multilevel-7",
            10 => "multilevel-10",
            _ => panic!("unsupported fixed pattern {u}"),
        };
        Self { u, name }
    }
}

impl Named for MultiTier {
    fn name(&self) -> &'static str {
        "multi-tier"
    }
}
impl Named for PropositionGreedy {
    fn name(&self) -> &'static str {
        "proposition-greedy"
    }
}
impl Named for FixedMultilevel {
    fn name(&self) -> &'static str {
        self.name
    }
}

fn reached(prod: f64, ratio: f64) -> bool {
    prod >= ratio * (1.0 - RATIO_EPS)
}

impl PackingStrategy for MultiTier {
    fn tiers(&self, ratio: f64) -> Vec<usize> {
        if reached(1.0, ratio) {
            return Vec::new();
        }
        // depth-first over non-increasing pattern sizes, pruned by the best count
        fn dfs(ratio: f64, max_u: usize, prod: f64, count: usize, cur: &mut Vec<usize>, best: &mut (usize, Vec<usize>)) {
            if reached(prod, ratio) {
                if count < best.0 {
                    *best = (count, cur.clone());
                }
                return;
            }
            for u in (3..=max_u).rev() {
                let c = count * u;
                if c >= best.0 {
                    continue;
                }
                cur.push(u);
                dfs(ratio, u, prod * lambda(u), c, cur, best);
                cur.pop();
            }
        }
        let fallback = FixedMultilevel::new(10).tiers(ratio);
        let mut best = (circle_count(&fallback) + 1, fallback);
        dfs(ratio, MAX_PATTERN, 1.0, 1, &mut Vec::new(), &mut best);
        best.1
    }
}

impl PackingStrategy for PropositionGreedy {
    fn tiers(&self, ratio: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut r = ratio;
        while !reached(1.0, r) {
            let u = optimal_pattern(r, 1.0);
            out.push(u);
            r /= lambda(u);
        }
        out
    }
}

impl PackingStrategy for FixedMultilevel {
    fn tiers(&self, ratio: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut prod = 1.0;
        while !reached(prod, ratio) {
            out.push(self.u);
            prod *= lambda(self.u);
        }
        out
    }
}

pub fn multi_tier_pack(r_geo: f64, r_small: f64) -> CoverSet {
    MultiTier.pack(r_geo, r_small)
}

pub fn packing_registry() -> Registry<dyn PackingStrategy> {
    let mut r: Registry<dyn PackingStrategy> = Registry::new("packing strategy");
    r.register(Box::new(MultiTier))
        .register(Box::new(PropositionGreedy))
        .register(Box::new(FixedMultilevel::new(5)))
        .register(Box::new(FixedMultilevel::new(7)))
        .register(Box::new(FixedMultilevel::new(10)));
    r
}
