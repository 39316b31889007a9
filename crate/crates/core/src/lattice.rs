//! The shifting lattice used by the Filter algorithm.
//!
//! The lattice is spanned by `v_1 = (4+δ)e_1` and
//! `v_i = -(2+δ/2)e_1 + 2√3·e_i` for `i >= 2`. A point with integer
//! coefficients `a` sits at
//!
//! ```text
//! x_1 = (2+δ/2)·(2a_1 - a_2 - ... - a_d),   x_i = 2√3·a_i  (i >= 2)
//! ```
//!
//! so the first coordinate is a multiple of `2+δ/2` whose multiplier has the
//! parity of `a_2 + ... + a_d`. Distinct points are more than 4 apart, which
//! means unit balls centred at distinct lattice points never meet and the
//! union `U` of those balls splits into disjoint cells, one per lattice point.
//! `U` has no value of its own here; it is queried through
//! [`LatticeParams::is_covered`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::geometry::Point;

pub const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Spacing of lattice coordinates along the axes `2..=d`.
pub const MINOR_STEP: f64 = 2.0 * SQRT_3;

pub const DEFAULT_DELTA: f64 = 0.01;

/// Integer coefficients of a lattice point in the `v_i` basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffVector(pub Vec<i64>);

impl CoeffVector {
    pub fn zeros(dim: usize) -> Self {
        CoeffVector(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    dim: usize,
    delta: f64,
}

impl LatticeParams {
    pub fn new(dim: usize, delta: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::OutOfRange(format!("lattice dimension must be >= 2, got {dim}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::OutOfRange(format!("delta must be positive, got {delta}")));
        }
        Ok(LatticeParams { dim, delta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `2 + δ/2`, the spacing of admissible first coordinates.
    pub fn half_step(&self) -> f64 {
        2.0 + self.delta / 2.0
    }

    /// `4 + δ`, the period along the first axis.
    pub fn major_step(&self) -> f64 {
        4.0 + self.delta
    }

    pub fn basis(&self) -> Vec<Point> {
        (0..self.dim)
            .map(|i| {
                let mut v = vec![0.0; self.dim];
                if i == 0 {
                    v[0] = self.major_step();
                } else {
                    v[0] = -self.half_step();
                    v[i] = MINOR_STEP;
                }
                Point::new(v).expect("basis coordinates are finite")
            })
            .collect()
    }

    /// Volume of a fundamental cell, `(4+δ)(2√3)^(d-1)`.
    pub fn cell_volume(&self) -> f64 {
        self.major_step() * MINOR_STEP.powi(self.dim as i32 - 1)
    }

    /// `Σ a_i v_i`.
    pub fn lattice_point(&self, coeffs: &CoeffVector) -> Result<Point> {
        check_dim(self.dim, coeffs.dim())?;
        Ok(Point::new(self.coords_of(&coeffs.0)).expect("lattice coordinates are finite"))
    }

    fn coords_of(&self, a: &[i64]) -> Vec<f64> {
        let rest: i64 = a[1..].iter().sum();
        let mut x = Vec::with_capacity(a.len());
        x.push(self.half_step() * (2 * a[0] - rest) as f64);
        x.extend(a[1..].iter().map(|&ai| MINOR_STEP * ai as f64));
        x
    }

    /// Constant-time parity-constrained rounding.
    ///
    /// Axes `2..=d` are rounded to the nearest multiple of `2√3`; writing
    /// `c_i = z_i√3 + y_i` with `y_i ∈ [0, √3)`, the coordinate stays at
    /// `z_i√3` for even `z_i` and moves up to `(z_i+1)√3` for odd `z_i`. The
    /// first axis is then rounded to the nearest multiple of `2+δ/2` whose
    /// multiplier has the parity of `a_2 + ... + a_d`.
    ///
    /// The result is within distance 1 of `c` whenever any lattice point is,
    /// but it is not always the nearest lattice point: fixing axes `2..=d`
    /// first can force a poor first coordinate. Use
    /// [`closest_lattice_point`](Self::closest_lattice_point) for the true
    /// nearest point.
    pub fn parity_rounding(&self, c: &Point) -> Result<(Point, CoeffVector)> {
        check_dim(self.dim, c.dim())?;
        let mut a = vec![0i64; self.dim];
        let mut rest = 0i64;
        for i in 1..self.dim {
            a[i] = round_minor(c[i]);
            rest += a[i];
        }
        let m = round_major(c[0], self.half_step(), rest);
        a[0] = (m + rest) / 2;
        let coeffs = CoeffVector(a);
        Ok((self.lattice_point(&coeffs)?, coeffs))
    }

    /// Nearest lattice point to `c`.
    ///
    /// Starts from [`parity_rounding`](Self::parity_rounding) and also tries
    /// both bracketing multiples of `2√3` on every axis `2..=d`, pairing each
    /// choice with the nearest admissible first coordinate. The nearest point
    /// always lies among these `2^(d-1)` candidates, so the cost is constant
    /// for fixed `d`. Ties keep the parity-rounding candidate, then the first
    /// candidate in enumeration order.
    pub fn closest_lattice_point(&self, c: &Point) -> Result<(Point, CoeffVector)> {
        let (mut best_point, mut best) = self.parity_rounding(c)?;
        let mut best_sq = sq_dist(best_point.coords(), c.coords());

        let floors: Vec<i64> = (1..self.dim).map(|i| (c[i] / MINOR_STEP).floor() as i64).collect();
        let mut a = vec![0i64; self.dim];
        for mask in 0u64..(1u64 << (self.dim - 1)) {
            let mut rest = 0i64;
            for i in 1..self.dim {
                a[i] = floors[i - 1] + ((mask >> (i - 1)) & 1) as i64;
                rest += a[i];
            }
            let m = round_major(c[0], self.half_step(), rest);
            a[0] = (m + rest) / 2;
            let x = self.coords_of(&a);
            let d2 = sq_dist(&x, c.coords());
            if d2 < best_sq {
                best_sq = d2;
                best = CoeffVector(a.clone());
                best_point = Point::new(x).expect("lattice coordinates are finite");
            }
        }
        Ok((best_point, best))
    }

    /// Whether `c` lies in some unit ball centred at a lattice point
    /// (closed: distance exactly 1 counts).
    pub fn is_covered(&self, c: &Point) -> Result<bool> {
        check_dim(self.dim, c.dim())?;
        Ok(self.covering_cell(c.coords()).is_some())
    }

    /// Coefficients of the lattice point whose unit ball contains `c`, if any.
    pub fn covering_coeffs(&self, c: &Point) -> Result<Option<CoeffVector>> {
        check_dim(self.dim, c.dim())?;
        Ok(self.covering_cell(c.coords()).map(CoeffVector))
    }

    // Allocation-light version of `parity_rounding` for the hot paths.
    fn covering_cell(&self, c: &[f64]) -> Option<Vec<i64>> {
        let mut sq = 0.0;
        let mut rest = 0i64;
        let mut a = vec![0i64; self.dim];
        for i in 1..self.dim {
            a[i] = round_minor(c[i]);
            rest += a[i];
            let diff = c[i] - MINOR_STEP * a[i] as f64;
            sq += diff * diff;
        }
        let m = round_major(c[0], self.half_step(), rest);
        let diff = c[0] - self.half_step() * m as f64;
        sq += diff * diff;
        if sq.sqrt() <= 1.0 {
            a[0] = (m + rest) / 2;
            Some(a)
        } else {
            None
        }
    }

    fn covered_slice(&self, c: &[f64]) -> bool {
        let mut sq = 0.0;
        let mut rest = 0i64;
        for &ci in &c[1..] {
            let ai = round_minor(ci);
            rest += ai;
            let diff = ci - MINOR_STEP * ai as f64;
            sq += diff * diff;
        }
        let m = round_major(c[0], self.half_step(), rest);
        let diff = c[0] - self.half_step() * m as f64;
        (sq + diff * diff).sqrt() <= 1.0
    }

    /// Nearest lattice point by exhaustive search over a coefficient window.
    ///
    /// The query is first moved into the centred fundamental domain by whole
    /// periods (`4+δ` on axis 1, `4√3` on the others), then every coefficient
    /// vector in `[-window, window]^d` is tried. Exponential in `d`; meant as
    /// a reference for checking the constant-time routines.
    pub fn enumerate_nearest(&self, c: &Point, window: i64) -> Result<(Point, CoeffVector)> {
        check_dim(self.dim, c.dim())?;
        if window < 1 {
            return Err(Error::OutOfRange(format!("window must be >= 1, got {window}")));
        }
        // Shifting axis i >= 2 by 4√3 is the lattice vector v_1 + 2 v_i.
        let mut offset = vec![0i64; self.dim];
        let mut q = c.coords().to_vec();
        for i in 1..self.dim {
            let t = (q[i] / (2.0 * MINOR_STEP)).round() as i64;
            q[i] -= 2.0 * MINOR_STEP * t as f64;
            offset[0] += t;
            offset[i] += 2 * t;
        }
        let t = (q[0] / self.major_step()).round() as i64;
        q[0] -= self.major_step() * t as f64;
        offset[0] += t;

        let mut best: Option<(f64, Vec<i64>)> = None;
        for_each_coeff(self.dim, window, |a| {
            let d2 = sq_dist(&self.coords_of(a), &q);
            if best.as_ref().is_none_or(|(b, _)| d2 < *b) {
                best = Some((d2, a.to_vec()));
            }
        });
        let (_, a) = best.expect("window is non-empty");
        let coeffs = CoeffVector(a.iter().zip(&offset).map(|(x, o)| x + o).collect());
        Ok((self.lattice_point(&coeffs)?, coeffs))
    }

    /// Minimum distance between distinct lattice points whose coefficients
    /// lie in `[-window, window]^d`.
    ///
    /// Pair differences range over `[-2w, 2w]^d`, so this scans difference
    /// vectors instead of pairs.
    pub fn min_pairwise_distance(&self, window: i64) -> Result<f64> {
        if window < 1 {
            return Err(Error::OutOfRange(format!("window must be >= 1, got {window}")));
        }
        let mut best = f64::INFINITY;
        let origin = vec![0.0; self.dim];
        for_each_coeff(self.dim, 2 * window, |a| {
            if a.iter().any(|&x| x != 0) {
                best = best.min(sq_dist(&self.coords_of(a), &origin));
            }
        });
        Ok(best.sqrt())
    }
}

fn round_minor(x: f64) -> i64 {
    let z = (x / SQRT_3).floor() as i64;
    if z.rem_euclid(2) == 0 {
        z / 2
    } else {
        (z + 1) / 2
    }
}

/// Multiplier `m` of `half_step` nearest to `x` subject to `m ≡ rest (mod 2)`.
fn round_major(x: f64, half_step: f64, rest: i64) -> i64 {
    let z = (x / half_step).floor() as i64;
    if (z - rest).rem_euclid(2) == 0 {
        z
    } else {
        z + 1
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn for_each_coeff(dim: usize, window: i64, mut f: impl FnMut(&[i64])) {
    let mut a = vec![-window; dim];
    loop {
        f(&a);
        let mut i = 0;
        loop {
            if i == dim {
                return;
            }
            if a[i] < window {
                a[i] += 1;
                break;
            }
            a[i] = -window;
            i += 1;
        }
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = V_{d-2} * 2π / d
    let mut v = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if dim.is_multiple_of(2) { 2 } else { 3 };
    while k <= dim {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Axis-aligned box with sides `4+δ` along axis 1 and `2√3` along the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    origin: Point,
    extents: Vec<f64>,
}

impl SampleBox {
    pub fn new(params: &LatticeParams, origin: Point) -> Result<Self> {
        check_dim(params.dim(), origin.dim())?;
        let mut extents = vec![MINOR_STEP; params.dim()];
        extents[0] = params.major_step();
        Ok(SampleBox { origin, extents })
    }

    pub fn origin(&self) -> &Point {
        &self.origin
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn volume(&self) -> f64 {
        self.extents.iter().product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    /// Fraction of samples inside the union of unit balls.
    pub fraction: f64,
    /// Binomial standard error of `fraction`.
    pub stderr: f64,
    pub box_volume: f64,
    pub samples: u64,
}

impl VolumeEstimate {
    pub fn volume(&self) -> f64 {
        self.fraction * self.box_volume
    }

    pub fn volume_stderr(&self) -> f64 {
        self.stderr * self.box_volume
    }
}

/// Hit-or-miss estimate of the covered fraction of `sample_box`.
pub fn mc_volume_fraction(
    params: &LatticeParams,
    sample_box: &SampleBox,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimate> {
    check_dim(params.dim(), sample_box.origin.dim())?;
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = vec![0.0; params.dim()];
    let mut hits = 0u64;
    for _ in 0..samples {
        for (i, x) in q.iter_mut().enumerate() {
            *x = sample_box.origin[i] + rng.random::<f64>() * sample_box.extents[i];
        }
        if params.covered_slice(&q) {
            hits += 1;
        }
    }
    let n = samples as f64;
    let fraction = hits as f64 / n;
    Ok(VolumeEstimate {
        fraction,
        stderr: (fraction * (1.0 - fraction) / n).sqrt(),
        box_volume: sample_box.volume(),
        samples,
    })
}
