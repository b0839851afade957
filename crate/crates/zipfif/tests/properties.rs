//! Property tests over randomly generated data sets, signatures and factor
//! families.

mod common;

use proptest::prelude::*;

use common::{load, system};
use zipfif::render::refine_orbit;
use zipfif::verify::{check_interpolation, l1_error};
use zipfif::{ContractionMode, ExtendedDataSet, ScalingFamily, Signature, ZipperSystem};

/// Strictly increasing knots on [-1, 1] with ordinates in [-5, 5].
fn arb_data() -> impl Strategy<Value = ExtendedDataSet> {
    let n = 4usize;
    (
        proptest::collection::vec(0.05f64..1.0, n),
        proptest::collection::vec(-5.0f64..5.0, n + 1),
        proptest::collection::vec(-5.0f64..5.0, n + 1),
    )
        .prop_map(move |(gaps, y, z)| {
            let total: f64 = gaps.iter().sum();
            let mut knots = vec![-1.0];
            let mut acc = 0.0;
            for g in &gaps {
                acc += g;
                knots.push(-1.0 + 2.0 * acc / total);
            }
            knots[n] = 1.0;
            ExtendedDataSet::new(knots, y, z).unwrap()
        })
}

fn arb_signature(n: usize) -> impl Strategy<Value = Signature> {
    proptest::collection::vec(0u8..=1, n).prop_map(|f| Signature::new(f).unwrap())
}

fn arb_family(n: usize) -> impl Strategy<Value = ScalingFamily> {
    (
        proptest::collection::vec(-0.4f64..0.4, n),
        proptest::collection::vec(-0.2f64..0.2, n),
        proptest::collection::vec(-0.3f64..0.3, n),
        proptest::collection::vec(-0.2f64..0.2, n),
    )
        .prop_map(|(p, q, pt, qt)| ScalingFamily::constants(&p, &q, &pt, &qt))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interval_maps_round_trip(
        data in arb_data(),
        sig in arb_signature(4),
        fam in arb_family(4),
    ) {
        let sys = ZipperSystem::new(data, sig, fam, ContractionMode::Strict).unwrap();
        for i in 1..=sys.n() {
            for k in 0..=20 {
                let x = sys.data().x0()
                    + (sys.data().xn() - sys.data().x0()) * k as f64 / 20.0;
                let roundtrip = sys.l_inv(i, sys.l(i, x));
                prop_assert!((roundtrip - x).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn random_systems_interpolate_their_knots(
        data in arb_data(),
        sig in arb_signature(4),
        fam in arb_family(4),
    ) {
        let sys = ZipperSystem::new(data, sig, fam, ContractionMode::Strict).unwrap();
        let sample = refine_orbit(&sys, 4).unwrap();
        let r = check_interpolation(&sample, sys.data(), 1e-9).unwrap();
        prop_assert!(r.pass, "violated by {:.3e}", r.worst_violation);
    }

    #[test]
    fn renders_stay_inside_the_envelope(
        data in arb_data(),
        sig in arb_signature(4),
        fam in arb_family(4),
    ) {
        let sys = ZipperSystem::new(data, sig, fam, ContractionMode::Strict).unwrap();
        let env = sys.envelope().unwrap();
        let sample = refine_orbit(&sys, 5).unwrap();
        for &[_, f1, f2] in sample.points() {
            prop_assert!(f1.abs() <= env.u + 1e-10 && f2.abs() <= env.u_tilde + 1e-10);
        }
    }

    #[test]
    fn orbit_abscissae_are_nested_across_depths(
        data in arb_data(),
        sig in arb_signature(4),
        fam in arb_family(4),
    ) {
        let sys = ZipperSystem::new(data, sig, fam, ContractionMode::Strict).unwrap();
        let coarse = refine_orbit(&sys, 3).unwrap();
        let fine = refine_orbit(&sys, 4).unwrap();
        for &[x, _, _] in coarse.points() {
            let j = fine.nearest(x);
            prop_assert!((fine.points()[j][0] - x).abs() < 1e-9);
        }
    }
}

#[test]
fn l1_error_is_zero_on_identical_curves_and_symmetric() {
    let sys = system(&load("bounded-rectangle.toml"));
    let sample = refine_orbit(&sys, 5).unwrap();
    let f = |x: f64| sample.interpolate(x).0;
    let g = |x: f64| x.sin();
    let (a, b) = (sys.data().x0(), sys.data().xn());
    assert_eq!(l1_error(f, f, a, b, 10_000).unwrap(), 0.0);
    let fg = l1_error(f, g, a, b, 10_000).unwrap();
    let gf = l1_error(g, f, a, b, 10_000).unwrap();
    assert_eq!(fg, gf);
    assert!(fg > 0.0);
}

#[test]
fn l1_error_is_stable_under_refinement() {
    let sys = system(&load("bounded-rectangle.toml"));
    let sample = refine_orbit(&sys, 6).unwrap();
    let f = |x: f64| sample.interpolate(x).0;
    let g = |x: f64| zipfif::verify::weierstrass(x, 30);
    let (a, b) = (sys.data().x0(), sys.data().xn());
    let coarse = l1_error(f, g, a, b, 100_000).unwrap();
    let fine = l1_error(f, g, a, b, 200_000).unwrap();
    assert!(
        (coarse - fine).abs() < 1e-3,
        "midpoint rule unstable: {coarse} vs {fine}"
    );
}
