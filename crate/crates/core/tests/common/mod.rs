//! Reference oracles shared by the integration tests. Everything here is
//! deliberately naive and independent of the library's fast paths.

#![allow(dead_code)]

use geomis::geometry::{HyperRectangle, Point, SizedObject};
use geomis::graph::Graph;
use geomis::lattice::LatticeParams;
use geomis::online::ArrivalSequence;
use rand::Rng;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Maximum independent set size by trying all 2^n subsets.
pub fn mis_by_enumeration(g: &Graph) -> usize {
    let n = g.len();
    assert!(n <= 20);
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut best = 0;
    for set in 0u32..(1 << n) {
        let independent = (0..n).all(|v| set & (1 << v) == 0 || set & nbr[v] == 0);
        if independent {
            best = best.max(set.count_ones() as usize);
        }
    }
    best
}

/// `max_v φ(G[N(v)])` by subset enumeration.
pub fn ikn_by_enumeration(g: &Graph) -> usize {
    (0..g.len())
        .map(|v| mis_by_enumeration(&g.induced(g.neighbors(v))))
        .max()
        .unwrap_or(0)
}

/// Lattice point coordinates written directly from the basis vectors.
pub fn lattice_coords(delta: f64, a: &[i64]) -> Vec<f64> {
    let d = a.len();
    let mut x = vec![0.0; d];
    x[0] = (4.0 + delta) * a[0] as f64;
    for i in 1..d {
        x[0] -= (2.0 + delta / 2.0) * a[i] as f64;
        x[i] = 2.0 * SQRT3 * a[i] as f64;
    }
    x
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Minimum distance from `q` to the lattice by scanning every coefficient
/// vector in a window around the query: axes `2..=d` within ±3 steps of
/// `q_i / 2√3`, axis-1 coefficient covering ±4 half-periods of `q_1`.
/// Returns the best distance, its point, and the runner-up distance.
pub fn nearest_distance_brute_force(delta: f64, q: &[f64]) -> (f64, Vec<f64>, f64) {
    let d = q.len();
    let centers: Vec<i64> = (1..d).map(|i| (q[i] / (2.0 * SQRT3)).round() as i64).collect();
    let mut best = (f64::INFINITY, vec![], f64::INFINITY);
    let mut offs = vec![-3i64; d - 1];
    loop {
        let rest: Vec<i64> = centers.iter().zip(&offs).map(|(c, o)| c + o).collect();
        let sum: i64 = rest.iter().sum();
        // x_1 = (2+δ/2)(2a_1 - sum) ≈ q_1
        let a1_mid = ((q[0] / (2.0 + delta / 2.0) + sum as f64) / 2.0).round() as i64;
        for a1 in a1_mid - 4..=a1_mid + 4 {
            let mut a = vec![a1];
            a.extend(&rest);
            let x = lattice_coords(delta, &a);
            let dd = dist(&x, q);
            if dd < best.0 {
                best = (dd, x, best.0);
            } else if dd < best.2 {
                best.2 = dd;
            }
        }
        let mut i = 0;
        loop {
            if i == d - 1 {
                return best;
            }
            if offs[i] < 3 {
                offs[i] += 1;
                break;
            }
            offs[i] = -3;
            i += 1;
        }
    }
}

/// Minimum pairwise distance over all pairs with coefficients in `[-w,w]^d`.
pub fn min_pair_distance_naive(delta: f64, dim: usize, w: i64) -> f64 {
    let mut pts = Vec::new();
    let side = (2 * w + 1) as usize;
    for idx in 0..side.pow(dim as u32) {
        let mut k = idx;
        let a: Vec<i64> = (0..dim)
            .map(|_| {
                let v = (k % side) as i64 - w;
                k /= side;
                v
            })
            .collect();
        pts.push(lattice_coords(delta, &a));
    }
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(dist(&pts[i], &pts[j]));
        }
    }
    best
}

pub fn params(dim: usize, delta: f64) -> LatticeParams {
    LatticeParams::new(dim, delta).unwrap()
}

pub fn point(c: &[f64]) -> Point {
    Point::new(c.to_vec()).unwrap()
}

/// Side length drawn from the dyadic class `[2^c, 2^(c+1))` clipped to `[1, m]`,
/// biased towards the extremes half of the time.
pub fn class_side(rng: &mut impl Rng, class: usize, m: f64, prefer: Extreme) -> f64 {
    let lo = 2f64.powi(class as i32);
    let hi = (2.0 * lo).min(m);
    let span = hi - lo;
    let u: f64 = rng.random();
    let t = match (prefer, rng.random_bool(0.5)) {
        (Extreme::Large, true) => 1.0 - u * 1e-3,
        (Extreme::Small, true) => u * 1e-3,
        _ => u,
    };
    (lo + t * span).min(hi - 1e-9 * lo).max(lo)
}

#[derive(Clone, Copy)]
pub enum Extreme {
    Large,
    Small,
}

/// One random configuration for the rectangle kissing search: a centre
/// rectangle of the class, a greedy packing of pairwise disjoint class
/// members that all touch it, and a few extra class members touching it.
pub fn rect_kissing_configuration(rng: &mut impl Rng, class: &[usize], m: f64) -> Vec<SizedObject> {
    let d = class.len();
    let center_sides: Vec<f64> = class.iter().map(|&c| class_side(rng, c, m, Extreme::Large)).collect();
    let center = HyperRectangle::from_corner(Point::origin(d), &center_sides).unwrap();
    let mut packed: Vec<HyperRectangle> = Vec::new();
    let mut extras: Vec<HyperRectangle> = Vec::new();
    for _ in 0..80 {
        let sides: Vec<f64> = class.iter().map(|&c| class_side(rng, c, m, Extreme::Small)).collect();
        // lower corner range that keeps the closed boxes touching
        let lo: Vec<f64> = (0..d)
            .map(|j| {
                let a = -sides[j];
                let b = center_sides[j];
                // favour the boundary, where packings are densest
                match rng.random_range(0..3) {
                    0 => a,
                    1 => b,
                    _ => rng.random_range(a..=b),
                }
            })
            .collect();
        let r = HyperRectangle::from_corner(point(&lo), &sides).unwrap();
        let disjoint = packed
            .iter()
            .all(|p| !(0..d).all(|j| p.lo()[j] <= r.hi()[j] && r.lo()[j] <= p.hi()[j]));
        if disjoint {
            packed.push(r);
        } else if extras.len() < 8 {
            extras.push(r);
        }
    }
    std::iter::once(center)
        .chain(packed)
        .chain(extras)
        .map(SizedObject::rect)
        .collect()
}

/// Filter written out literally: shift every center, keep the balls that
/// some lattice point (found by window search) covers, and run FirstFit on
/// that subsequence using the stream's own adjacency.
pub fn filter_literal(stream: &ArrivalSequence, delta: f64, shift: &[f64]) -> Vec<usize> {
    let mut accepted: Vec<usize> = Vec::new();
    for e in stream.events() {
        let c = e.payload.as_ref().unwrap().as_ball().unwrap().center();
        let q: Vec<f64> = c.coords().iter().zip(shift).map(|(a, b)| a + b).collect();
        if nearest_distance_brute_force(delta, &q).0 > 1.0 {
            continue;
        }
        if e.neighbors.iter().all(|u| !accepted.contains(u)) {
            accepted.push(e.id);
        }
    }
    accepted
}

/// `(φ(G), max(ζ, 1))` of a stream, both from the library oracle.
pub fn opt_and_zeta(stream: &ArrivalSequence) -> (usize, usize) {
    let g = stream.graph();
    let opt = geomis::oracle::exact_mis(&g, 40).unwrap().size;
    let zeta = geomis::oracle::independent_kissing_number(&g, 40).unwrap().zeta;
    (opt, zeta.max(1))
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Checks that, under `shift`, covered balls intersect exactly when their
/// shifted centers share a covering lattice point, and that the library's
/// cell assignment induces the same grouping. Returns the number of covered
/// balls.
pub fn check_clique_law(stream: &ArrivalSequence, params: &LatticeParams, shift: &Point) -> Result<usize, String> {
    let mut filter = geomis::randomized::Filter::with_shift(*params, shift.clone()).unwrap();
    let g = stream.graph();
    let mut covered = Vec::new();
    for e in stream.events() {
        let c = e.payload.as_ref().unwrap().as_ball().unwrap().center();
        let q: Vec<f64> = c.coords().iter().zip(shift.coords()).map(|(a, b)| a + b).collect();
        let (d, x, _) = nearest_distance_brute_force(params.delta(), &q);
        let cell = filter.cell_of(c).unwrap();
        if (d <= 1.0) != cell.is_some() {
            return Err(format!("coverage disagrees for ball {}", e.id));
        }
        if let Some(cell) = cell {
            covered.push((e.id, x, cell));
        }
    }
    for (i, (a, xa, ca)) in covered.iter().enumerate() {
        for (b, xb, cb) in &covered[i + 1..] {
            let same_point = xa.iter().zip(xb).all(|(u, v)| (u - v).abs() < 1e-9);
            if same_point != (ca == cb) {
                return Err(format!("cell grouping disagrees for balls {a}, {b}"));
            }
            if same_point != g.has_edge(*a, *b) {
                return Err(format!(
                    "balls {a}, {b}: same cluster {same_point}, adjacent {}",
                    g.has_edge(*a, *b)
                ));
            }
        }
    }
    Ok(covered.len())
}
