//! Disc-covering patterns for the unit disc.

use crate::geometry::Point2;
use std::f64::consts::PI;

pub const MAX_PATTERN: usize = 10;

/// Enlargement factor: `u` discs of radius `1/Λ(u)` cover the unit disc.
pub fn lambda(u: usize) -> f64 {
    match u {
        1 | 2 => 1.0,
        3 => 2.0 / 3f64.sqrt(),
        4 => 2f64.sqrt(),
        5 => 1.641,
        6 => 1.7988,
        7..=MAX_PATTERN => 1.0 + 2.0 * (2.0 * PI / (u - 1) as f64).cos(),
        _ => panic!("no covering pattern with {u} circles"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingPattern {
    pub u: usize,
    pub lambda: f64,
    /// Centres relative to a unit target disc.
    pub centers: Vec<Point2>,
}

impl PackingPattern {
    pub fn radius(&self) -> f64 {
        1.0 / self.lambda
    }
}

fn ring(n: usize, dist: f64, phase: f64) -> impl Iterator<Item = Point2> {
    (0..n).map(move |k| {
        let a = phase + 2.0 * PI * k as f64 / n as f64;
        Point2::new(dist * a.cos(), dist * a.sin())
    })
}

// Numerically optimised coverings, covering radius 0.6093842 and 0.5559052.
const FIVE: [(f64, f64); 5] = [
    (0.58179224, 0.0),
    (-0.51379599, 0.36736193),
    (-0.51379599, -0.36736193),
    (0.25329055, -0.74943391),
    (0.25329055, 0.74943391),
];
const SIX: [(f64, f64); 6] = [
    (-0.52002706, 0.0),
    (0.56184096, 0.0),
    (0.35490198, 0.57252948),
    (0.35490198, -0.57252948),
    (-0.4625641, 0.69094778),
    (-0.4625641, -0.69094778),
];

pub fn pattern(u: usize) -> PackingPattern {
    let lam = lambda(u);
    let r = 1.0 / lam;
    let centers: Vec<Point2> = match u {
        1 | 2 => vec![Point2::new(0.0, 0.0); u],
        3 => ring(3, 0.5, PI / 2.0).collect(),
        4 => ring(4, 0.5 * 2f64.sqrt(), PI / 4.0).collect(),
        5 => FIVE.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
        6 => SIX.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
        _ => {
            let n = u - 1;
            let d = 2.0 * (PI / n as f64).cos() * r;
            std::iter::once(Point2::new(0.0, 0.0)).chain(ring(n, d, 0.0)).collect()
        }
    };
    PackingPattern { u, lambda: lam, centers }
}

/// Exact covering radius of the unit disc by discs at `centers`: the largest
/// distance from any point of the disc to its nearest centre.
pub fn covering_radius(centers: &[Point2]) -> f64 {
    let mut cands: Vec<Point2> = Vec::new();
    for c in centers {
        let n = c.norm();
        if n > 1e-12 {
            cands.push(c.scale(-1.0 / n));
        } else {
            cands.push(Point2::new(1.0, 0.0));
        }
    }
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let (a, b) = (centers[i], centers[j]);
            let d = b.sub(&a);
            if d.norm() < 1e-12 {
                continue;
            }
            let m = a.add(&b).scale(0.5);
            let t = Point2::new(-d.y, d.x).scale(1.0 / d.norm());
            let bb = m.dot(&t);
            let disc = bb * bb - (m.dot(&m) - 1.0);
            if disc >= 0.0 {
                for s in [-bb + disc.sqrt(), -bb - disc.sqrt()] {
                    cands.push(m.add(&t.scale(s)));
                }
            }
            for k in j + 1..centers.len() {
                if let Some(p) = circumcenter(a, b, centers[k]) {
                    if p.norm() <= 1.0 {
                        cands.push(p);
                    }
                }
            }
        }
    }
    cands
        .iter()
        .map(|p| centers.iter().map(|c| c.dist(p)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn circumcenter(a: Point2, b: Point2, c: Point2) -> Option<Point2> {
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-12 {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Some(Point2::new(a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert!((lambda(3) - 1.1547).abs() < 1e-4);
        assert!((lambda(4) - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((lambda(7) - 2.0).abs() < 1e-12);
        assert!((lambda(8) - 2.2470).abs() < 1e-4);
        assert!((lambda(9) - 2.4142).abs() < 1e-4);
        assert!((lambda(10) - 2.5321).abs() < 1e-4);
    }

    #[test]
    fn every_pattern_covers_exactly() {
        for u in 1..=MAX_PATTERN {
            let p = pattern(u);
            assert_eq!(p.centers.len(), u);
            let cr = covering_radius(&p.centers);
            assert!(cr <= p.radius() + 1e-9, "u={u}: {cr} > {}", p.radius());
        }
    }

    #[test]
    fn covering_radius_known_cases() {
        assert!((covering_radius(&[Point2::new(0.0, 0.0)]) - 1.0).abs() < 1e-12);
        let r3 = covering_radius(&pattern(3).centers);
        assert!((r3 - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }
}
