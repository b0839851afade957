//! Empirical verification of the guarantees: interpolation of the knots,
//! containment properties of rendered samples, and the L1 distance to a
//! reference curve.

use crate::error::VerifyError;
use crate::model::ExtendedDataSet;
use crate::render::CurveSample;
use crate::shape::Line;

/// Outcome of one empirical check over a sampled curve.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub property: String,
    pub pass: bool,
    /// Largest violation found (0 when the property holds everywhere).
    pub worst_violation: f64,
    /// Sample location of the worst violation, when there is one.
    pub worst_x: Option<f64>,
    pub samples_checked: usize,
    /// Smallest margin by which the property held (how close it came).
    pub slack: f64,
}

impl VerificationReport {
    fn from_margins(property: String, margins: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut worst_violation = 0.0_f64;
        let mut worst_x = None;
        let mut slack = f64::INFINITY;
        let mut samples_checked = 0;
        for (x, margin) in margins {
            samples_checked += 1;
            slack = slack.min(margin);
            if -margin > worst_violation {
                worst_violation = -margin;
                worst_x = Some(x);
            }
        }
        VerificationReport {
            property,
            pass: worst_violation == 0.0,
            worst_violation,
            worst_x,
            samples_checked,
            slack,
        }
    }
}

/// Checks that the sample passes through every knot triple, within `tol`.
pub fn check_interpolation(
    sample: &CurveSample,
    data: &ExtendedDataSet,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    if sample.points().is_empty() {
        return Err(VerifyError::EmptySample);
    }
    let mut margins = Vec::with_capacity(data.n() + 1);
    for k in 0..=data.n() {
        let x = data.knots()[k];
        let p = sample.points()[sample.nearest(x)];
        if (p[0] - x).abs() > tol {
            return Err(VerifyError::MissingKnot(x));
        }
        let err = (p[1] - data.y()[k]).abs().max((p[2] - data.z()[k]).abs());
        margins.push((x, tol - err));
    }
    Ok(VerificationReport::from_margins(
        "interpolates the data".into(),
        margins.into_iter(),
    ))
}

/// Checks `k1 <= f1 <= k2` and `k1_tilde <= f2 <= k2_tilde` on the sample.
pub fn check_rectangle(
    sample: &CurveSample,
    k1: f64,
    k2: f64,
    k1_tilde: f64,
    k2_tilde: f64,
) -> Result<VerificationReport, VerifyError> {
    if sample.points().is_empty() {
        return Err(VerifyError::EmptySample);
    }
    Ok(VerificationReport::from_margins(
        format!("graph inside [{k1}, {k2}] x [{k1_tilde}, {k2_tilde}]"),
        sample.points().iter().map(|p| {
            let m = (p[1] - k1)
                .min(k2 - p[1])
                .min(p[2] - k1_tilde)
                .min(k2_tilde - p[2]);
            (p[0], m)
        }),
    ))
}

/// Checks `f1 >= 0` and `f2 >= 0` on the sample.
pub fn check_positive(sample: &CurveSample) -> Result<VerificationReport, VerifyError> {
    if sample.points().is_empty() {
        return Err(VerifyError::EmptySample);
    }
    Ok(VerificationReport::from_margins(
        "both components nonnegative".into(),
        sample.points().iter().map(|p| (p[0], p[1].min(p[2]))),
    ))
}

/// Side of the line constraint the visible component must respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineSide {
    Above,
    Below,
}

/// Checks the visible component against per-subinterval lines. A point on a
/// shared knot abscissa belongs to the interval on its right, except the
/// last knot which closes the final interval.
pub fn check_lines(
    sample: &CurveSample,
    data: &ExtendedDataSet,
    lines: &[Line],
    side: LineSide,
) -> Result<VerificationReport, VerifyError> {
    if sample.points().is_empty() {
        return Err(VerifyError::EmptySample);
    }
    let knots = data.knots();
    let n = data.n();
    let label = match side {
        LineSide::Above => "graph above the lower lines",
        LineSide::Below => "graph below the upper lines",
    };
    Ok(VerificationReport::from_margins(
        label.into(),
        sample.points().iter().map(|p| {
            let i = knots[1..n].partition_point(|k| *k <= p[0]);
            let line = lines[i].eval(p[0]);
            let m = match side {
                LineSide::Above => p[1] - line,
                LineSide::Below => line - p[1],
            };
            (p[0], m)
        }),
    ))
}

/// Partial sum of the classical nowhere-differentiable cosine series
/// `sum_s (1/2)^s cos(3^s pi x)`.
pub fn weierstrass(x: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    let mut amp = 1.0;
    let mut freq = std::f64::consts::PI;
    for _ in 0..terms {
        acc += amp * (freq * x).cos();
        amp *= 0.5;
        freq *= 3.0;
    }
    acc
}

/// Mean absolute deviation `(1 / (b - a)) * integral |f - g|` by the
/// midpoint rule on `cells` equal cells.
pub fn l1_error(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cells: usize,
) -> Result<f64, VerifyError> {
    if cells == 0 {
        return Err(VerifyError::EmptySample);
    }
    let h = (b - a) / cells as f64;
    let mut acc = 0.0;
    for k in 0..cells {
        let x = a + (k as f64 + 0.5) * h;
        acc += (f(x) - g(x)).abs();
    }
    Ok(acc / cells as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ContractionMode, ExtendedDataSet, ScalingFamily, Signature};
    use crate::render::refine_orbit;
    use crate::system::ZipperSystem;

    fn zigzag_system() -> ZipperSystem {
        let data = ExtendedDataSet::new(
            vec![-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
            vec![-4.0, 2.0, 0.0, 3.0, 1.0, 4.0, -2.0],
            vec![-3.0, 1.0, -2.0, 4.0, 3.0, 6.0, 2.0],
        )
        .unwrap();
        let sig = Signature::new(vec![0, 1, 0, 1, 0, 1]).unwrap();
        let fam = ScalingFamily::constants(
            &[0.5, -0.18, 0.53, -0.17, 0.52, 0.48],
            &[0.17, -0.054, 0.053, -0.034, 0.23, 0.14],
            &[0.36, -0.21, 0.33, -0.18, 0.34, 0.37],
            &[0.29, -0.05, 0.22, -0.14, 0.38, 0.23],
        );
        ZipperSystem::new(data, sig, fam, ContractionMode::Strict).unwrap()
    }

    #[test]
    fn interpolation_check_passes_on_an_orbit_sample() {
        let sys = zigzag_system();
        let sample = refine_orbit(&sys, 4).unwrap();
        let rep = check_interpolation(&sample, sys.data(), 1e-9).unwrap();
        assert!(rep.pass, "worst violation {}", rep.worst_violation);
        assert_eq!(rep.samples_checked, 7);
    }

    #[test]
    fn interpolation_check_reports_a_perturbed_knot() {
        let sys = zigzag_system();
        let mut points = refine_orbit(&sys, 2).unwrap().into_points();
        points[0][1] += 1e-3;
        let sample = CurveSample::from_points(points);
        let rep = check_interpolation(&sample, sys.data(), 1e-9).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.worst_x, Some(-1.0));
        assert!((rep.worst_violation - (1e-3 - 1e-9)).abs() < 1e-12);
    }

    #[test]
    fn interpolation_check_errors_when_a_knot_is_missing() {
        let sys = zigzag_system();
        let points: Vec<[f64; 3]> = refine_orbit(&sys, 2)
            .unwrap()
            .into_points()
            .into_iter()
            .filter(|p| (p[0] - 0.0).abs() > 1e-6)
            .collect();
        let sample = CurveSample::from_points(points);
        match check_interpolation(&sample, sys.data(), 1e-9) {
            Err(VerifyError::MissingKnot(x)) => assert_eq!(x, 0.0),
            other => panic!("expected MissingKnot, got {other:?}"),
        }
    }

    #[test]
    fn rectangle_check_flags_an_escaping_point() {
        let sample = CurveSample::from_points(vec![
            [0.0, 0.5, 0.0],
            [0.5, 11.0, 0.0],
            [1.0, 0.0, 0.0],
        ]);
        let rep = check_rectangle(&sample, -10.0, 10.0, -6.0, 8.0).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.worst_x, Some(0.5));
        assert!((rep.worst_violation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn positivity_check_reports_slack() {
        let sample = CurveSample::from_points(vec![[0.0, 0.5, 1.0], [1.0, 0.25, 2.0]]);
        let rep = check_positive(&sample).unwrap();
        assert!(rep.pass);
        assert!((rep.slack - 0.25).abs() < 1e-12);
    }

    #[test]
    fn line_check_uses_the_interval_on_the_right_of_a_knot() {
        let data = ExtendedDataSet::new(
            vec![0.0, 1.0, 2.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 0.0, 0.0],
        )
        .unwrap();
        // Lower line on the first interval would fail at x = 1, the one on
        // the second passes; check that x = 1 resolves to the second.
        let lines = vec![
            Line { slope: 2.0, intercept: -0.5 },
            Line { slope: 0.0, intercept: 0.0 },
        ];
        let sample = CurveSample::from_points(vec![
            [0.0, 1.0, 0.0],
            [1.0, 2.0, 0.0],
            [2.0, 1.0, 0.0],
        ]);
        let rep = check_lines(&sample, &data, &lines, LineSide::Above).unwrap();
        assert!(rep.pass, "worst {}", rep.worst_violation);
    }

    #[test]
    fn weierstrass_partial_sums_converge_geometrically() {
        let x = 0.3721;
        let a = weierstrass(x, 25);
        let b = weierstrass(x, 40);
        assert!((a - b).abs() < 2.0 * 0.5_f64.powi(25));
        // Value at 0 is the geometric series sum.
        assert!((weierstrass(0.0, 60) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l1_error_of_known_functions() {
        // mean of |x| on [-1, 1] is 1/2
        let err = l1_error(|x| x.abs(), |_| 0.0, -1.0, 1.0, 200_000).unwrap();
        assert!((err - 0.5).abs() < 1e-9);
        // identical functions
        let zero = l1_error(|x| x.sin(), |x| x.sin(), 0.0, 1.0, 100).unwrap();
        assert_eq!(zero, 0.0);
    }
}
