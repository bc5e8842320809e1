use approx::assert_relative_eq;
use fracdrift_core::frac::{inverse_scale, kernel_covariance, rl_integral_sampled};
use fracdrift_core::{
    apply_k, apply_k_inverse, apply_k_inverse_normalized, apply_k_inverse_smooth, beta_fn, c_h,
    fbm_covariance, fgn_autocovariance, gamma_fn, kernel_k, rl_derivative, rl_integral,
    AcFunction, SampledFunction, TimeGrid,
};
use proptest::prelude::*;

fn grid(n: usize) -> TimeGrid {
    TimeGrid::new(1.0, n).unwrap()
}

fn scale_of(v: &[f64]) -> f64 {
    v.iter().filter(|x| x.is_finite()).fold(1.0_f64, |m, x| m.max(x.abs()))
}

fn assert_combination(lhs: &SampledFunction, a: f64, f: &SampledFunction, b: f64, g: &SampledFunction, tol: f64) {
    let scale = scale_of(&f.values).max(scale_of(&g.values)) * (1.0 + a.abs() + b.abs());
    for j in 0..lhs.values.len() {
        let want = a * f.values[j] + b * g.values[j];
        let got = lhs.values[j];
        if want.is_nan() {
            assert!(got.is_nan());
            continue;
        }
        assert!((got - want).abs() <= tol * scale, "index {j}: {got} vs {want}");
    }
}

fn combo(a: f64, f: &AcFunction, b: f64, g: &AcFunction) -> AcFunction {
    let (f1, g1, f2, g2) = (f.clone(), g.clone(), f.clone(), g.clone());
    AcFunction::new(
        move |t| a * f1.value(t) + b * g1.value(t),
        move |t| a * f2.derivative(t) + b * g2.derivative(t),
    )
}

#[test]
fn gamma_and_beta_examples() {
    assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-13);
    assert_relative_eq!(gamma_fn(0.5).unwrap(), std::f64::consts::PI.sqrt(), max_relative = 1e-13);
    let want = gamma_fn(0.25).unwrap() * gamma_fn(0.75).unwrap();
    assert_relative_eq!(beta_fn(0.25, 0.75).unwrap(), want, max_relative = 1e-12);
}

#[test]
fn normalizing_constant_examples() {
    assert_relative_eq!(c_h(0.5).unwrap(), 1.0, max_relative = 1e-13);
    assert_relative_eq!(c_h(0.25).unwrap(), 0.645_998_003_740_752, max_relative = 1e-10);
    let smooth = c_h(0.75).unwrap();
    assert!(smooth.is_finite() && smooth > 0.0);
    assert!(c_h(0.0).is_err() && c_h(1.0).is_err());
}

#[test]
fn kernel_examples() {
    assert_eq!(kernel_k(1.0, 0.5, 0.5).unwrap(), 1.0);
    for h in [0.1, 0.25, 0.5, 0.75] {
        assert_eq!(kernel_k(0.5, 0.7, h).unwrap(), 0.0);
    }
    for h in [0.25, 0.4] {
        let got = kernel_covariance(1.0, 2.0, h, 64).unwrap();
        assert_relative_eq!(got, fbm_covariance(1.0, 2.0, h).unwrap(), max_relative = 1e-6);
    }
}

#[test]
fn covariance_examples() {
    assert_eq!(fbm_covariance(1.0, 1.0, 0.25).unwrap(), 1.0);
    assert_eq!(fbm_covariance(1.0, 2.0, 0.5).unwrap(), 1.0);
    assert_eq!(fbm_covariance(0.0, 3.0, 0.3).unwrap(), 0.0);
    assert_eq!(fgn_autocovariance(1, 0.5, 1.0).unwrap(), 0.0);
    assert_relative_eq!(fgn_autocovariance(0, 0.25, 1.0).unwrap(), 1.0, max_relative = 1e-15);
    let want = fbm_covariance(1.0, 2.0, 0.25).unwrap() - 1.0;
    assert_relative_eq!(fgn_autocovariance(1, 0.25, 1.0).unwrap(), want, max_relative = 1e-14);
    assert_relative_eq!(want, -0.292_893_218_813_452_5, max_relative = 1e-12);
}

#[test]
fn integral_examples() {
    let g = grid(64);
    let one = SampledFunction::from_fn(g, |_| 1.0);
    let first = rl_integral(&one, 1.0, &g).unwrap();
    for j in 0..=64 {
        assert_relative_eq!(first.values[j], g.time(j), epsilon = 1e-14);
    }

    let g = grid(512);
    let one = SampledFunction::from_fn(g, |_| 1.0);
    let half = rl_integral(&one, 0.5, &g).unwrap();
    let twice = rl_integral(&half, 0.5, &g).unwrap();
    // t >= T/10
    let sup = (52..=512)
        .map(|j| (twice.values[j] - g.time(j)).abs())
        .fold(0.0_f64, f64::max);
    assert!(sup < 1e-4, "semigroup sup error {sup:e}");

    let g = grid(64);
    let f = AcFunction::power(1.0, 0.5);
    let out = rl_integral(&f, 0.25, &g).unwrap();
    let c = gamma_fn(1.5).unwrap() / gamma_fn(1.75).unwrap();
    assert!(out.max_relative_error(|x| c * x.powf(0.75), 0.1) < 1e-3);
    // sampled data only carry piecewise-linear information about √y
    let err = |n: usize| {
        let g = grid(n);
        rl_integral(&f.sample(&g), 0.25, &g)
            .unwrap()
            .max_relative_error(|x| c * x.powf(0.75), 0.1)
    };
    let (coarse, fine) = (err(256), err(1024));
    assert!(coarse < 1e-3, "{coarse:e}");
    assert!(coarse / fine > 6.0, "order: {coarse:e} -> {fine:e}");
}

#[test]
fn derivative_examples() {
    let g = grid(64);
    let out = rl_derivative(&AcFunction::power(1.0, 0.5), 0.5, &g).unwrap();
    assert!(out.max_relative_error(|_| 0.886_226_925_452_758, 0.1) < 1e-3);

    for alpha in [0.25, 0.5, 0.75] {
        let lin = AcFunction::power(1.0, 1.0);
        let inner = rl_integral(&lin, alpha, &g).unwrap();
        let c = 1.0 / gamma_fn(2.0 + alpha).unwrap();
        let inner_fn = AcFunction::power(c, 1.0 + alpha);
        assert!(inner.max_relative_error(|x| inner_fn.value(x), 0.1) < 1e-6);
        let back = rl_derivative(&inner_fn, alpha, &g).unwrap();
        assert!(back.max_relative_error(|x| x, 1.0 / 64.0) < 1e-3, "alpha {alpha}");
    }

    let zero = rl_derivative(&AcFunction::zero(), 0.3, &g).unwrap();
    assert!(zero.values[1..].iter().all(|v| *v == 0.0));
}

#[test]
fn transform_examples() {
    let g = grid(32);
    let one = SampledFunction::from_fn(g, |_| 1.0);
    let brownian = apply_k(&one, 0.5).unwrap();
    for j in 0..=32 {
        assert_relative_eq!(brownian.values[j], g.time(j), epsilon = 1e-14);
    }
    let zero = SampledFunction::from_fn(g, |_| 0.0);
    assert!(apply_k(&zero, 0.25).unwrap().values.iter().all(|v| *v == 0.0));

    let g = grid(1024);
    let f = AcFunction::power(1.0, 0.5);
    let back = apply_k(&apply_k_inverse_normalized(&f, 0.25, &g).unwrap(), 0.25).unwrap();
    assert!(back.max_relative_error(|t| t.sqrt(), 0.1) < 1e-2);
}

#[test]
fn inverse_examples() {
    let g = grid(64);
    let f = AcFunction::power(1.0, 0.5);
    let out = apply_k_inverse(&f, 0.25, &g).unwrap();
    assert!(out.max_relative_error(|t| 0.612_709 * t.powf(-0.25), 0.1) < 1e-3);

    let lin = AcFunction::power(1.0, 1.0);
    for h in [0.1, 0.25, 0.4] {
        let c = gamma_fn(1.5 - h).unwrap() / gamma_fn(2.0 - 2.0 * h).unwrap();
        let out = apply_k_inverse(&lin, h, &g).unwrap();
        assert!(out.max_relative_error(|t| c * t.powf(0.5 - h), 0.1) < 1e-3, "H={h}");
    }
    let c = gamma_fn(0.75).unwrap() / gamma_fn(0.5).unwrap();
    let smooth = apply_k_inverse_smooth(&lin, 0.75, &g).unwrap();
    assert!(smooth.max_relative_error(|t| c * t.powf(-0.25), 0.1) < 1e-2);

    for out in [
        apply_k_inverse(&lin, 0.5, &g).unwrap(),
        apply_k_inverse_smooth(&lin, 0.5, &g).unwrap(),
    ] {
        assert!(out.values[1..].iter().all(|v| *v == 1.0));
    }
    for out in [
        apply_k_inverse(&AcFunction::zero(), 0.3, &g).unwrap(),
        apply_k_inverse_smooth(&AcFunction::zero(), 0.7, &g).unwrap(),
    ] {
        assert!(out.values[1..].iter().all(|v| *v == 0.0));
    }
    assert_relative_eq!(inverse_scale(0.5), 1.0, max_relative = 1e-13);
}

fn sampled(g: TimeGrid, values: Vec<f64>) -> SampledFunction {
    SampledFunction::new(g, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apply_k_is_linear(
        h in 0.05f64..0.95,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        fv in prop::collection::vec(-5.0f64..5.0, 17),
        gv in prop::collection::vec(-5.0f64..5.0, 17),
    ) {
        let g = grid(16);
        let f = sampled(g, fv.clone());
        let gg = sampled(g, gv.clone());
        let mix = sampled(g, fv.iter().zip(&gv).map(|(x, y)| a * x + b * y).collect());
        let kf = apply_k(&f, h).unwrap();
        let kg = apply_k(&gg, h).unwrap();
        assert_combination(&apply_k(&mix, h).unwrap(), a, &kf, b, &kg, 1e-12);
    }

    #[test]
    fn apply_k_preserves_sign_in_rough_regime(
        h in 0.05f64..0.5,
        fv in prop::collection::vec(0.0f64..5.0, 17),
    ) {
        let out = apply_k(&sampled(grid(16), fv), h).unwrap();
        prop_assert!(out.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn sampled_integral_is_linear(
        alpha in 0.05f64..1.0,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        fv in prop::collection::vec(-5.0f64..5.0, 33),
        gv in prop::collection::vec(-5.0f64..5.0, 33),
    ) {
        let g = grid(32);
        let f = sampled(g, fv.clone());
        let gg = sampled(g, gv.clone());
        let mix = sampled(g, fv.iter().zip(&gv).map(|(x, y)| a * x + b * y).collect());
        let lhs = rl_integral_sampled(&mix, alpha).unwrap();
        let ff = rl_integral_sampled(&f, alpha).unwrap();
        let fg = rl_integral_sampled(&gg, alpha).unwrap();
        assert_combination(&lhs, a, &ff, b, &fg, 1e-12);
    }

    #[test]
    fn callable_operators_are_linear(
        alpha in 0.1f64..0.9,
        p in 0.3f64..2.5,
        q in 0.3f64..2.5,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let g = grid(8);
        let f = AcFunction::power(1.0, p);
        let h = AcFunction::power(1.0, q);
        let mix = combo(a, &f, b, &h);

        let lhs = rl_integral(&mix, alpha, &g).unwrap();
        let (i_f, i_h) = (rl_integral(&f, alpha, &g).unwrap(), rl_integral(&h, alpha, &g).unwrap());
        assert_combination(&lhs, a, &i_f, b, &i_h, 1e-12);

        let lhs = rl_derivative(&mix, alpha, &g).unwrap();
        let (d_f, d_h) = (rl_derivative(&f, alpha, &g).unwrap(), rl_derivative(&h, alpha, &g).unwrap());
        assert_combination(&lhs, a, &d_f, b, &d_h, 1e-10);
    }

    #[test]
    fn inverse_is_linear(
        hurst in 0.05f64..0.5,
        p in 0.6f64..2.5,
        q in 0.6f64..2.5,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let g = grid(8);
        let f = AcFunction::power(1.0, p);
        let h = AcFunction::power(1.0, q);
        let lhs = apply_k_inverse(&combo(a, &f, b, &h), hurst, &g).unwrap();
        let (k_f, k_h) = (apply_k_inverse(&f, hurst, &g).unwrap(), apply_k_inverse(&h, hurst, &g).unwrap());
        assert_combination(&lhs, a, &k_f, b, &k_h, 1e-10);
    }

    #[test]
    fn integral_power_rule(alpha in 0.1f64..1.0, beta in 0.0f64..3.0) {
        let g = grid(16);
        let out = rl_integral(&AcFunction::power(1.0, beta), alpha, &g).unwrap();
        let c = gamma_fn(beta + 1.0).unwrap() / gamma_fn(beta + 1.0 + alpha).unwrap();
        prop_assert!(out.max_relative_error(|x| c * x.powf(beta + alpha), 0.1) < 1e-6);
    }

    #[test]
    fn kernel_is_self_similar(
        h in 0.05f64..0.95,
        t in 0.1f64..3.0,
        frac in 0.01f64..0.99,
        c in 0.2f64..5.0,
    ) {
        let s = frac * t;
        let base = kernel_k(t, s, h).unwrap();
        let scaled = kernel_k(c * t, c * s, h).unwrap();
        prop_assert!((scaled - c.powf(h - 0.5) * base).abs() <= 1e-9 * base.abs().max(1e-12));
    }

    #[test]
    fn covariance_is_symmetric_and_self_similar(
        h in 0.05f64..0.95,
        s in 0.0f64..3.0,
        t in 0.0f64..3.0,
        c in 0.2f64..5.0,
    ) {
        let v = fbm_covariance(s, t, h).unwrap();
        prop_assert_eq!(v, fbm_covariance(t, s, h).unwrap());
        let scaled = fbm_covariance(c * s, c * t, h).unwrap();
        prop_assert!((scaled - c.powf(2.0 * h) * v).abs() <= 1e-12 * (1.0 + scaled.abs()));
        let bound = (s.powf(2.0 * h) * t.powf(2.0 * h)).sqrt();
        prop_assert!(v.abs() <= bound * (1.0 + 1e-12));
    }
}
