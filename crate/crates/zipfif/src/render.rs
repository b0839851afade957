//! Exact rendering of the attractor graph and pointwise evaluation of the
//! interpolant pair (f1, f2).
//!
//! Rendering refines the interpolation points through the system maps, so
//! every emitted sample lies exactly on the attractor (up to float roundoff).
//! Pointwise evaluation unrolls the functional equation, accumulating the
//! affine action of the shear maps until the composed matrix is small enough
//! to close with the piecewise-linear data interpolant.

use crate::error::RenderError;
use crate::model::ContractionMode;
use crate::system::ZipperSystem;

/// Default cap on the pre-dedup orbit point count.
pub const DEFAULT_POINT_CAP: u64 = 20_000_000;

/// Abscissa collision tolerance used when deduplicating samples.
pub const DEDUP_TOL: f64 = 1e-12;

/// Hard recursion cap for evaluation of systems without a contraction
/// guarantee (relaxed mode).
const RELAXED_LEVEL_CAP: usize = 64;

/// Safety cap for contractive systems; reached only for tolerances far below
/// what f64 supports.
const STRICT_LEVEL_CAP: usize = 4096;

/// Sorted exact samples (x, f1(x), f2(x)) of the attractor graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    points: Vec<[f64; 3]>,
}

impl CurveSample {
    /// Sorts by abscissa and drops collisions within [`DEDUP_TOL`], keeping
    /// the first point of each cluster.
    pub fn from_points(mut points: Vec<[f64; 3]>) -> Self {
        points.sort_by(|a, b| a[0].total_cmp(&b[0]));
        points.dedup_by(|next, kept| (next[0] - kept[0]).abs() <= DEDUP_TOL);
        Self { points }
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn into_points(self) -> Vec<[f64; 3]> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest sample index to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let j = self.points.partition_point(|p| p[0] < x);
        if j == 0 {
            return 0;
        }
        if j >= self.points.len() {
            return self.points.len() - 1;
        }
        if (self.points[j][0] - x).abs() < (x - self.points[j - 1][0]).abs() {
            j
        } else {
            j - 1
        }
    }

    /// Piecewise-linear interpolation between adjacent samples.
    pub fn interpolate(&self, x: f64) -> (f64, f64) {
        let j = self.points.partition_point(|p| p[0] < x);
        if j == 0 {
            let p = self.points[0];
            return (p[1], p[2]);
        }
        if j >= self.points.len() {
            let p = self.points[self.points.len() - 1];
            return (p[1], p[2]);
        }
        let (a, b) = (self.points[j - 1], self.points[j]);
        let w = if b[0] > a[0] { (x - a[0]) / (b[0] - a[0]) } else { 0.0 };
        (a[1] + w * (b[1] - a[1]), a[2] + w * (b[2] - a[2]))
    }

    pub fn max_x_gap(&self) -> f64 {
        self.points
            .windows(2)
            .fold(0.0_f64, |m, w| m.max(w[1][0] - w[0][0]))
    }
}

/// Applies the union-of-maps refinement `depth` times to the interpolation
/// points and returns the sorted, deduplicated sample.
pub fn refine_orbit(sys: &ZipperSystem, depth: u32) -> Result<CurveSample, RenderError> {
    refine_orbit_capped(sys, depth, DEFAULT_POINT_CAP)
}

pub fn refine_orbit_capped(
    sys: &ZipperSystem,
    depth: u32,
    cap: u64,
) -> Result<CurveSample, RenderError> {
    Ok(CurveSample::from_points(raw_orbit(sys, depth, cap)?))
}

/// The pre-dedup orbit point set: (n+1) * n^depth points.
pub fn raw_orbit(sys: &ZipperSystem, depth: u32, cap: u64) -> Result<Vec<[f64; 3]>, RenderError> {
    let n = sys.n() as u128;
    let projected = (n + 1).saturating_mul(n.saturating_pow(depth));
    if projected > cap as u128 {
        return Err(RenderError::DepthTooLarge {
            depth,
            points: projected,
            cap,
        });
    }
    let data = sys.data();
    let mut points: Vec<[f64; 3]> = (0..=sys.n())
        .map(|j| [data.knots()[j], data.y()[j], data.z()[j]])
        .collect();
    for _ in 0..depth {
        let mut next = Vec::with_capacity(points.len() * sys.n());
        for i in 1..=sys.n() {
            for &p in &points {
                next.push(sys.omega(i, p));
            }
        }
        points = next;
    }
    Ok(points)
}

/// Evaluates (f1(x), f2(x)) to within `tol` by unrolling the functional
/// equation. Knot abscissae return the data exactly.
///
/// Pre-image chains through the inverse interval maps expand float roundoff
/// by up to `1 / min|a_i|` per level, so an abscissa produced by composing
/// forward maps drifts off the knot it came from. Each level therefore snaps
/// to the nearest knot within a tolerance that grows by the same expansion
/// factor, which keeps evaluation consistent with orbit refinement.
pub fn evaluate_at(sys: &ZipperSystem, x: f64, tol: f64) -> Result<(f64, f64), RenderError> {
    if !(tol > 0.0) {
        return Err(RenderError::BadTolerance(tol));
    }
    let data = sys.data();
    let span = data.xn() - data.x0();
    let min_gap = data
        .knots()
        .windows(2)
        .fold(f64::INFINITY, |m, w| m.min(w[1] - w[0]));
    let growth = span / min_gap;
    let base_snap = 64.0 * f64::EPSILON * span;
    let snap = |x: f64, tol: f64| -> Option<usize> {
        let j = data.knots().partition_point(|&k| k < x);
        let cand = [j.saturating_sub(1), j.min(data.n())];
        cand.into_iter()
            .find(|&c| (data.knots()[c] - x).abs() <= tol)
    };
    if let Some(j) = snap(x, base_snap) {
        return Ok((data.y()[j], data.z()[j]));
    }
    // Composed affine action: f(x) = C * f(x_cur) + d.
    let mut c = [[1.0_f64, 0.0], [0.0, 1.0]];
    let mut d = [0.0_f64, 0.0];
    let mut x_cur = x;
    let bound = sys.value_bound();
    let cap = match sys.mode() {
        ContractionMode::Strict => STRICT_LEVEL_CAP,
        ContractionMode::Relaxed => RELAXED_LEVEL_CAP,
    };
    let norm = |m: &[[f64; 2]; 2]| {
        (m[0][0].abs() + m[0][1].abs()).max(m[1][0].abs() + m[1][1].abs())
    };
    let mut snap_tol = base_snap;
    for _ in 0..cap {
        snap_tol = (snap_tol * growth).min(min_gap / 8.0);
        let i = sys.interval_index(x_cur).map_err(RenderError::from)?;
        let x_prev = sys.l_inv(i, x_cur).clamp(data.x0(), data.xn());
        let m = sys.factor_matrix(i, sys.l(i, x_prev));
        let (r, rt) = sys.eval_offsets(i, x_prev).map_err(RenderError::from)?;
        d[0] += c[0][0] * r + c[0][1] * rt;
        d[1] += c[1][0] * r + c[1][1] * rt;
        c = [
            [
                c[0][0] * m[0][0] + c[0][1] * m[1][0],
                c[0][0] * m[0][1] + c[0][1] * m[1][1],
            ],
            [
                c[1][0] * m[0][0] + c[1][1] * m[1][0],
                c[1][0] * m[0][1] + c[1][1] * m[1][1],
            ],
        ];
        x_cur = x_prev;
        if let Some(j) = snap(x_cur, snap_tol) {
            // Landed on (or drifted just off) a knot: close with its data.
            let (y, z) = (data.y()[j], data.z()[j]);
            return Ok((c[0][0] * y + c[0][1] * z + d[0], c[1][0] * y + c[1][1] * z + d[1]));
        }
        if norm(&c) * 2.0 * bound <= tol {
            break;
        }
    }
    // Close with the piecewise-linear interpolant of the data.
    let (g1, g2) = linear_data_interp(sys, x_cur);
    Ok((
        c[0][0] * g1 + c[0][1] * g2 + d[0],
        c[1][0] * g1 + c[1][1] * g2 + d[1],
    ))
}

fn linear_data_interp(sys: &ZipperSystem, x: f64) -> (f64, f64) {
    let data = sys.data();
    let i = sys.interval_index(x).unwrap_or(1);
    let (lo, hi) = data.interval(i);
    let w = (x - lo) / (hi - lo);
    (
        data.y()[i - 1] + w * (data.y()[i] - data.y()[i - 1]),
        data.z()[i - 1] + w * (data.z()[i] - data.z()[i - 1]),
    )
}

/// `m` equally spaced samples across the domain, each accurate to `tol`.
pub fn sample_uniform(
    sys: &ZipperSystem,
    m: usize,
    tol: f64,
) -> Result<CurveSample, RenderError> {
    if m < 2 {
        return Err(RenderError::TooFewSamples(m));
    }
    let (x0, xn) = (sys.data().x0(), sys.data().xn());
    let mut points = Vec::with_capacity(m);
    for k in 0..m {
        let x = x0 + (xn - x0) * k as f64 / (m - 1) as f64;
        let x = if k == m - 1 { xn } else { x };
        let (f1, f2) = evaluate_at(sys, x, tol)?;
        points.push([x, f1, f2]);
    }
    Ok(CurveSample { points })
}
