use gbspectra::{make_knots, ratio_bounds, GBSplineBasis, Refinement, SectionSpace};
use proptest::prelude::*;

/// Textbook Cox–de Boor recursion, independent of the library's integral
/// construction.
fn cox_de_boor(knots: &[f64], i: usize, p: usize, x: f64) -> f64 {
    if p == 0 {
        let last = knots[knots.len() - 1];
        let inside = knots[i] <= x && x < knots[i + 1];
        let closes_right = x == last && knots[i] < knots[i + 1] && knots[i + 1] == last;
        return if inside || closes_right { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    let d1 = knots[i + p] - knots[i];
    if d1 > 0.0 {
        v += (x - knots[i]) / d1 * cox_de_boor(knots, i, p - 1, x);
    }
    let d2 = knots[i + p + 1] - knots[i + 1];
    if d2 > 0.0 {
        v += (knots[i + p + 1] - x) / d2 * cox_de_boor(knots, i + 1, p - 1, x);
    }
    v
}

#[test]
fn polynomial_basis_matches_cox_de_boor() {
    for p in 1..=4 {
        for n in [2, 5, 9] {
            let kv = make_knots(n, p).unwrap();
            let basis = GBSplineBasis::new(kv.clone(), SectionSpace::polynomial()).unwrap();
            for k in 0..=300 {
                let x = k as f64 / 300.0;
                let got = basis.eval_basis(x, 0).unwrap();
                for (i, g) in got.iter().enumerate() {
                    let want = cox_de_boor(kv.knots(), i, p, x);
                    assert!(
                        (g - want).abs() < 1e-13,
                        "p={p} n={n} i={i} x={x}: {g} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn knot_vector_layout() {
    let kv = make_knots(4, 2).unwrap();
    assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0]);
    assert_eq!(
        GBSplineBasis::new(kv, SectionSpace::polynomial())
            .unwrap()
            .dim(),
        6
    );
    assert!(make_knots(1, 2).is_err());
    assert!(make_knots(4, 0).is_err());
}

#[test]
fn nested_trig_tends_to_polynomial() {
    let poly_dev = |n: usize| {
        let (lo, hi) = ratio_bounds(
            3,
            SectionSpace::trigonometric(1.0, Refinement::Nested),
            n,
            16,
        )
        .unwrap();
        (1.0 - lo).max(hi - 1.0)
    };
    let d: Vec<f64> = [16, 32, 64].iter().map(|&n| poly_dev(n)).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn ratio_bounds_bracket_one() {
    let (lo, hi) = ratio_bounds(
        3,
        SectionSpace::hyperbolic(1.0, Refinement::NonNested),
        32,
        16,
    )
    .unwrap();
    assert!(
        0.0 < lo && lo <= 1.0 && 1.0 <= hi && hi.is_finite(),
        "{lo} {hi}"
    );
    assert_eq!(
        ratio_bounds(2, SectionSpace::polynomial(), 16, 16).unwrap(),
        (1.0, 1.0)
    );
}

fn space_strategy() -> impl Strategy<Value = SectionSpace> {
    prop_oneof![
        Just(SectionSpace::polynomial()),
        (0.1f64..3.0).prop_map(|a| SectionSpace::hyperbolic(a, Refinement::NonNested)),
        (0.1f64..3.0).prop_map(|a| SectionSpace::hyperbolic(a, Refinement::Nested)),
        (0.1f64..3.0).prop_map(|a| SectionSpace::trigonometric(a, Refinement::NonNested)),
        (0.1f64..3.0).prop_map(|a| SectionSpace::trigonometric(a, Refinement::Nested)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_of_unity_and_sign(space in space_strategy(), p in 2usize..=4, n in 2usize..20, x in 0.0f64..=1.0) {
        let b = GBSplineBasis::uniform(n, p, space).unwrap();
        let v = b.eval_basis(x, 0).unwrap();
        let sum: f64 = v.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        prop_assert!(v.iter().all(|&vi| vi >= -1e-14));
        prop_assert_eq!(v.iter().filter(|&&vi| vi != 0.0).count() <= p + 1, true);
        let d: f64 = b.eval_basis(x, 1).unwrap().iter().sum();
        prop_assert!(d.abs() < 1e-9 * n as f64);
    }

    #[test]
    fn derivative_matches_difference_quotient(space in space_strategy(), p in 2usize..=4, n in 2usize..12, x in 0.05f64..0.95) {
        let b = GBSplineBasis::uniform(n, p, space).unwrap();
        let h = 1e-6;
        // stay inside one element so the quotient sees a smooth function
        let (_, t) = b.locate(x);
        prop_assume!(t > 1e-3 && t < 1.0 - 1e-3);
        let plus = b.eval_basis(x + h, 0).unwrap();
        let minus = b.eval_basis(x - h, 0).unwrap();
        let d = b.eval_basis(x, 1).unwrap();
        for i in 0..b.dim() {
            let fd = (plus[i] - minus[i]) / (2.0 * h);
            prop_assert!((fd - d[i]).abs() < 1e-5 * (n as f64).powi(2), "i={} fd={} d={}", i, fd, d[i]);
        }
    }
}
