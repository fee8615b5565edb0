//! Visit order through the LoIs and segment discretisation.

use crate::geometry::{Point2, Point3};
use serde::{Deserialize, Serialize};

/// Exact ordering up to this many LoIs; 2-opt above.
pub const EXACT_TSP_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightPath {
    pub waypoints: Vec<Point3>,
    /// Maximum segment length, m.
    pub seg_len: f64,
    /// LoIs in visiting order (indices into the input list).
    pub loi_indices: Vec<usize>,
    /// Waypoint index at which each visited LoI is reached, in visiting order.
    pub loi_waypoints: Vec<usize>,
}

impl FlightPath {
    pub fn n_segments(&self) -> usize {
        self.waypoints.len().saturating_sub(1)
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.waypoints.windows(2).map(|w| w[0].dist(&w[1])).collect()
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Point at which each segment's channel is evaluated (its start).
    pub fn segment_points(&self) -> &[Point3] {
        &self.waypoints[..self.n_segments()]
    }
}

fn tour_length(order: &[usize], pts: &[Point2], start: Point2, end: Point2) -> f64 {
    let mut prev = start;
    let mut len = 0.0;
    for &i in order {
        len += prev.dist(&pts[i]);
        prev = pts[i];
    }
    len + prev.dist(&end)
}

/// Held-Karp over subsets with fixed endpoints.
fn exact_order(pts: &[Point2], start: Point2, end: Point2) -> Vec<usize> {
    let n = pts.len();
    if n == 0 {
        return Vec::new();
    }
    let full = 1usize << n;
    let mut dp = vec![f64::INFINITY; full * n];
    let mut parent = vec![usize::MAX; full * n];
    for j in 0..n {
        dp[(1 << j) * n + j] = start.dist(&pts[j]);
    }
    for mask in 1..full {
        for j in 0..n {
            let cur = dp[mask * n + j];
            if mask & (1 << j) == 0 || !cur.is_finite() {
                continue;
            }
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let nm = mask | (1 << k);
                let cand = cur + pts[j].dist(&pts[k]);
                if cand < dp[nm * n + k] {
                    dp[nm * n + k] = cand;
                    parent[nm * n + k] = j;
                }
            }
        }
    }
    let last = (0..n)
        .min_by(|&a, &b| {
            let la = dp[(full - 1) * n + a] + pts[a].dist(&end);
            let lb = dp[(full - 1) * n + b] + pts[b].dist(&end);
            la.total_cmp(&lb)
        })
        .unwrap();
    let mut order = vec![last];
    let mut mask = full - 1;
    let mut j = last;
    while parent[mask * n + j] != usize::MAX {
        let p = parent[mask * n + j];
        mask &= !(1 << j);
        j = p;
        order.push(j);
    }
    order.reverse();
    order
}

fn heuristic_order(pts: &[Point2], start: Point2, end: Point2) -> Vec<usize> {
    let n = pts.len();
    let mut left: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by(|a, b| cur.dist(&pts[*a.1]).total_cmp(&cur.dist(&pts[*b.1])))
            .unwrap();
        let i = left.swap_remove(pos);
        cur = pts[i];
        order.push(i);
    }
    // 2-opt with pinned endpoints
    let mut improved = true;
    while improved {
        improved = false;
        let base = tour_length(&order, pts, start, end);
        'outer: for i in 0..n {
            for j in i + 1..n {
                order[i..=j].reverse();
                if tour_length(&order, pts, start, end) < base - 1e-9 {
                    improved = true;
                    break 'outer;
                }
                order[i..=j].reverse();
            }
        }
    }
    order
}

pub fn visit_order(lois: &[Point2], start: Point2, end: Point2) -> Vec<usize> {
    if lois.len() <= EXACT_TSP_LIMIT {
        exact_order(lois, start, end)
    } else {
        heuristic_order(lois, start, end)
    }
}

/// Shortest visiting route from `p_i` through every LoI to `p_f`, cut into
/// equal pieces of at most `delta` per leg, at altitude `h_p`.
pub fn build_path(lois: &[Point2], p_i: Point3, p_f: Point3, delta: f64, h_p: f64) -> FlightPath {
    assert!(delta > 0.0, "segment length must be positive");
    let order = visit_order(lois, p_i.xy(), p_f.xy());
    let mut stops: Vec<Point3> = vec![Point3::new(p_i.x, p_i.y, h_p)];
    stops.extend(order.iter().map(|&i| lois[i].at_height(h_p)));
    stops.push(Point3::new(p_f.x, p_f.y, h_p));

    let mut waypoints = vec![stops[0]];
    let mut loi_waypoints = Vec::with_capacity(order.len());
    for (s, w) in stops.windows(2).enumerate() {
        let len = w[0].dist(&w[1]);
        if len > 1e-12 {
            let pieces = (len / delta * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            for k in 1..=pieces {
                waypoints.push(w[0].lerp(&w[1], k as f64 / pieces as f64));
            }
        }
        if s < order.len() {
            loi_waypoints.push(waypoints.len() - 1);
        }
    }
    FlightPath { waypoints, seg_len: delta, loi_indices: order, loi_waypoints }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn single_loi() {
        let o = Point3::new(0.0, 0.0, 100.0);
        let p = build_path(&[Point2::new(10.0, 0.0)], o, o, 1.0, 100.0);
        assert_eq!(p.n_segments(), 20);
        assert!((p.length() - 20.0).abs() < 1e-9);
        assert_eq!(p.loi_waypoints, vec![10]);
        assert_eq!(p.waypoints[0], o);
        assert_eq!(*p.waypoints.last().unwrap(), o);
    }

    #[test]
    fn collinear_in_order() {
        let pts: Vec<Point2> = [3.0, 1.0, 4.0, 2.0].iter().map(|&x| Point2::new(x * 10.0, 0.0)).collect();
        let order = visit_order(&pts, Point2::new(0.0, 0.0), Point2::new(50.0, 0.0));
        assert_eq!(order, vec![1, 3, 0, 2]);
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for n in 1..=8 {
            let pts: Vec<Point2> = (0..n).map(|_| Point2::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0))).collect();
            let (s, e) = (Point2::new(0.0, 0.0), Point2::new(0.0, 0.0));
            let best = permutations(n)
                .iter()
                .map(|p| tour_length(p, &pts, s, e))
                .fold(f64::INFINITY, f64::min);
            let got = tour_length(&visit_order(&pts, s, e), &pts, s, e);
            assert!((got - best).abs() < 1e-9);
        }
    }

    #[test]
    fn heuristic_never_worse_than_input_order() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let pts: Vec<Point2> = (0..16).map(|_| Point2::new(rng.gen_range(-80.0..80.0), rng.gen_range(-80.0..80.0))).collect();
        let (s, e) = (Point2::new(0.0, 0.0), Point2::new(10.0, 0.0));
        let ident: Vec<usize> = (0..16).collect();
        let got = visit_order(&pts, s, e);
        assert!(tour_length(&got, &pts, s, e) <= tour_length(&ident, &pts, s, e));
        let mut sorted = got.clone();
        sorted.sort();
        assert_eq!(sorted, ident);
    }

    #[test]
    fn segments_bounded_and_length_preserved() {
        let lois = [Point2::new(13.3, 7.1), Point2::new(-20.0, 4.4), Point2::new(5.0, -30.0)];
        let o = Point3::new(0.0, 0.0, 100.0);
        let p = build_path(&lois, o, o, 1.0, 100.0);
        assert!(p.segment_lengths().iter().all(|&l| l > 0.0 && l <= 1.0 + 1e-12));
        let cont = tour_length(&p.loi_indices, &lois, o.xy(), o.xy());
        assert!((p.length() - cont).abs() < 1e-9);
    }
}
