use approx::assert_relative_eq;
use fracdrift_core::risk::cramer_rao_value;
use fracdrift_core::{
    cramer_rao_bound, inverse_norm_moment_check, quadratic_risk_mc, risk_difference_paired,
    stein_identity_check, unbiasedness_check, DriftSpec, Estimator, FbmModel, Method,
    RFunctionSpec, ShrinkageSpec,
};

fn model(d: usize, h: f64, n: usize) -> FbmModel {
    FbmModel::new(d, h, 1.0, n).unwrap()
}

#[test]
fn cramer_rao_examples() {
    assert_relative_eq!(cramer_rao_value(3, 0.25, 1.0), 2.0, max_relative = 1e-15);
    assert_relative_eq!(cramer_rao_value(1, 0.5, 1.0), 0.5, max_relative = 1e-15);
    assert_eq!(cramer_rao_value(4, 0.3, 0.0), 0.0);
    assert_relative_eq!(cramer_rao_bound(&model(3, 0.25, 8)), 2.0, max_relative = 1e-15);
}

#[test]
fn mle_risk_matches_bound_and_ignores_drift() {
    let m = model(3, 0.25, 128);
    let mle = Estimator::Mle;
    let zero = quadratic_risk_mc(&mle, &DriftSpec::zero(3), &m, Method::Circulant, 20_000, 21).unwrap();
    assert!((zero.mean - 2.0).abs() < 4.0 * zero.std_error + 0.01, "{zero:?}");
    let shifted =
        quadratic_risk_mc(&mle, &DriftSpec::linear(5.0, 3), &m, Method::Circulant, 20_000, 21).unwrap();
    assert_eq!(zero.mean.to_bits(), shifted.mean.to_bits());
    assert_eq!(zero.std_error.to_bits(), shifted.std_error.to_bits());
    assert_eq!(shifted.drift_label, DriftSpec::linear(5.0, 3).label());
}

#[test]
fn james_stein_risk_at_zero_drift() {
    let m = model(3, 0.25, 128);
    let js = Estimator::from_label("js", 1.0, 0.25).unwrap();
    let r = quadratic_risk_mc(&js, &DriftSpec::zero(3), &m, Method::Circulant, 20_000, 22).unwrap();
    assert!((r.mean / (4.0 / 3.0) - 1.0).abs() < 0.05, "{r:?}");
}

#[test]
fn paired_difference_examples() {
    let m = model(3, 0.25, 128);
    let zero = DriftSpec::zero(3);

    let spec = ShrinkageSpec::james_stein(1.0, 0.25).unwrap();
    let rep = risk_difference_paired(&spec, &zero, &m, Method::Circulant, 20_000, 23).unwrap();
    assert!((rep.delta_mean / (-2.0 / 3.0) - 1.0).abs() < 0.05, "{rep:?}");
    assert!(rep.certified_conditions);
    assert_eq!(rep.ci95_upper, rep.delta_mean + 1.96 * rep.delta_std_error);

    let boundary = ShrinkageSpec::james_stein(2.0, 0.25).unwrap();
    let rep = risk_difference_paired(&boundary, &zero, &m, Method::Circulant, 20_000, 24).unwrap();
    assert!(rep.delta_mean.abs() < 3.0 * rep.delta_std_error, "{rep:?}");

    let drift = DriftSpec::power_two_h(1.0, 0.25, 3);
    let rational = ShrinkageSpec::new(1.0, RFunctionSpec::rational(), 0.25).unwrap();
    let rep = risk_difference_paired(&rational, &drift, &m, Method::Circulant, 20_000, 25).unwrap();
    assert!(rep.ci95_upper < 0.0, "{rep:?}");
    assert!(rep.stein_agreement_z() < 4.0, "{rep:?}");
}

#[test]
fn uncertified_difference_can_be_positive() {
    // E‖B_t‖⁻⁴ is infinite for d <= 4, which makes the a² term heavy-tailed there
    let m = model(5, 0.25, 64);
    let spec = ShrinkageSpec::james_stein(8.0, 0.25).unwrap();
    let rep = risk_difference_paired(&spec, &DriftSpec::zero(5), &m, Method::Circulant, 10_000, 26).unwrap();
    assert!(!rep.certified_conditions);
    // a(a − 2(d−2))/(d−2) · T^{2H+1}/(2H+1)
    let want = 8.0 * 2.0 / 3.0 / 1.5;
    assert!((rep.delta_mean / want - 1.0).abs() < 0.05, "{rep:?}");
    assert!(rep.ci95_upper > 0.0);
}

#[test]
fn stein_identity_examples() {
    let zero_weight = RFunctionSpec::custom("0", |_| 0.0, |_| 0.0);
    let none = ShrinkageSpec::new(1.0, zero_weight, 0.25).unwrap();
    let c = stein_identity_check(&none, 1.0, &[0.0, 0.0, 0.0], 1_000, 1).unwrap();
    assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
    assert_eq!(c.z_score(), 0.0);

    let js = ShrinkageSpec::james_stein(1.0, 0.25).unwrap();
    for theta in [[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]] {
        let c = stein_identity_check(&js, 1.0, &theta, 200_000, 2).unwrap();
        assert!(c.z_score() < 4.0, "{theta:?}: {c:?}");
    }
    // rhs at θ = 0: −a t^{4H} (d−2) E[1/u] = −1
    let c = stein_identity_check(&js, 1.0, &[0.0, 0.0, 0.0], 200_000, 3).unwrap();
    assert!((c.rhs + 1.0).abs() < 4.0 * c.rhs_std_error + 1e-3, "{c:?}");
}

#[test]
fn inverse_norm_examples() {
    for (d, exact) in [(3, 2.0), (5, 2.0 / 3.0)] {
        let c = inverse_norm_moment_check(&model(d, 0.25, 256), Method::Circulant, 20_000, 31).unwrap();
        assert_relative_eq!(c.exact, exact, max_relative = 1e-14);
        assert!(c.relative_error() < 0.05, "d={d}: {c:?}");
    }
    assert!(inverse_norm_moment_check(&model(3, 0.6, 16), Method::Circulant, 100, 1).is_err());
    assert!(inverse_norm_moment_check(&model(2, 0.25, 16), Method::Circulant, 100, 1).is_err());
}

#[test]
fn unbiasedness_examples() {
    let m = model(3, 0.25, 32);
    for drift in [DriftSpec::zero(3), DriftSpec::linear(2.0, 3)] {
        let r = unbiasedness_check(&Estimator::Mle, &drift, &m, Method::Circulant, 20_000, 41).unwrap();
        assert!(r.within(4.0), "{}: max z {}", drift.label(), r.max_z);
    }
    let js = Estimator::from_label("js", 1.0, 0.25).unwrap();
    let r = unbiasedness_check(&js, &DriftSpec::linear(2.0, 3), &m, Method::Circulant, 20_000, 42).unwrap();
    assert!(!r.within(4.0), "shrinkage bias not detected: max z {}", r.max_z);
    assert!(r.max_discrepancy > 0.05);
}

#[test]
fn rejects_bad_inputs() {
    let m = model(3, 0.25, 16);
    let mle = Estimator::Mle;
    assert!(quadratic_risk_mc(&mle, &DriftSpec::zero(3), &m, Method::Circulant, 1, 0).is_err());
    assert!(quadratic_risk_mc(&mle, &DriftSpec::zero(2), &m, Method::Circulant, 100, 0).is_err());
}
