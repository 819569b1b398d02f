use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use heatcert_core::spectral::{project_indicator, project_interval, DomainGeometry, Region, SineSeries, Transform};
use proptest::prelude::*;

fn example() -> DomainGeometry {
    DomainGeometry::symmetric_pi(FRAC_PI_4).unwrap()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn series(length: f64) -> impl Strategy<Value = SineSeries> {
    prop::collection::vec(-2.0..2.0f64, 1..40).prop_map(move |c| SineSeries::new(length, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn semigroup_law(s in series(PI), t in 0.0..2.0f64, sigma in 0.0..2.0f64) {
        let two_steps = s.apply_semigroup(t).unwrap().apply_semigroup(sigma).unwrap();
        let one_step = s.apply_semigroup(t + sigma).unwrap();
        prop_assert!(two_steps.max_coeff_diff(&one_step) <= 1e-12);
    }

    #[test]
    fn semigroup_never_grows_coefficients(s in series(2.5), t in 0.0..3.0f64) {
        let out = s.apply_semigroup(t).unwrap();
        for (a, b) in s.coeffs().iter().zip(out.coeffs()) {
            prop_assert!(b.abs() <= a.abs());
        }
    }

    #[test]
    fn operations_are_linear(
        a in prop::collection::vec(-2.0..2.0f64, 30),
        b in prop::collection::vec(-2.0..2.0f64, 30),
        ca in -3.0..3.0f64,
        cb in -3.0..3.0f64,
        t0 in 0.0..0.5f64,
        t1 in 0.5..1.5f64,
    ) {
        let sa = SineSeries::new(PI, a);
        let sb = SineSeries::new(PI, b);
        let mix = sa.scaled(ca).add(&sb.scaled(cb));
        let lin = |f: &dyn Fn(&SineSeries) -> SineSeries| {
            f(&mix).max_coeff_diff(&f(&sa).scaled(ca).add(&f(&sb).scaled(cb)))
        };
        prop_assert!(lin(&|s| s.apply_semigroup(t1).unwrap()) <= 1e-12);
        prop_assert!(lin(&|s| s.integrate_semigroup(t0, t1).unwrap()) <= 1e-12);
        prop_assert!(lin(&|s| s.double_integrate_semigroup(t0, t1, 1.5).unwrap()) <= 1e-12);
    }
}

#[test]
fn indicator_coefficients_match_quadrature() {
    let length = 2.0;
    let s = project_interval(length, 0.5, 1.5, 5);
    for k in 1..=5 {
        let w = k as f64 * PI / length;
        let oracle = (2.0 / length) * simpson(|x| (w * x).sin(), 0.5, 1.5, 2000);
        assert!((s.coeff(k) - oracle).abs() < 1e-10, "mode {k}");
    }
    let chi = project_indicator(&example(), Region::D, 8);
    assert!((chi.coeff(1) - 4.0 * FRAC_PI_4.cos() / PI).abs() < 1e-15);
    assert!((chi.coeff(1) - 0.9003).abs() < 5e-5);
    let omega = project_indicator(&example(), Region::Omega, 8);
    assert_eq!(omega.coeff(2), 0.0);
}

#[test]
fn indicator_partial_sum_away_from_jumps() {
    let omega = project_indicator(&example(), Region::Omega, 4001);
    assert!((omega.evaluate(FRAC_PI_2).unwrap() - 1.0).abs() < 0.01);
    assert_eq!(omega.evaluate(0.0).unwrap(), 0.0);
    assert!(omega.evaluate(PI + 0.1).is_err());
}

#[test]
fn example_pointwise_values() {
    let chi = project_indicator(&example(), Region::D, 4001);
    let m = chi.apply_semigroup(1.0).unwrap().evaluate(FRAC_PI_4).unwrap();
    assert_eq!((m * 100.0).round() / 100.0, 0.23);
    let c1 = chi.integrate_semigroup(0.0, 1.0).unwrap().evaluate(FRAC_PI_4).unwrap();
    assert_eq!((c1 * 100.0).round() / 100.0, 0.38);
}

#[test]
fn positivity_and_contraction_after_smoothing() {
    let geom = example();
    let xs: Vec<f64> = (0..=4000).map(|i| PI * i as f64 / 4000.0).collect();
    for which in [Region::D, Region::Omega] {
        let chi = project_indicator(&geom, which, 400);
        for t in [0.01, 0.05, 0.3, 1.0] {
            let s = chi.apply_semigroup(t).unwrap();
            let vals: Vec<f64> = xs.iter().map(|x| s.evaluate(*x).unwrap()).collect();
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(min >= -1e-6, "{which:?} t={t} min={min}");
            assert!(max <= 1.0 + 1e-6, "{which:?} t={t} max={max}");
        }
    }
}

#[test]
fn transform_examples() {
    let tr = Transform::new(PI, 64, 32).unwrap();
    let s = SineSeries::single_mode(PI, 32, 3, 1.0);
    let back = tr.analyze(&tr.synthesize(&s)).unwrap();
    assert!(back.max_coeff_diff(&s) < 1e-12);
    let zero = tr.analyze(&vec![0.0; 65]).unwrap();
    assert!(zero.coeffs().iter().all(|c| *c == 0.0));

    let tr = Transform::new(PI, 128, 127).unwrap();
    let values: Vec<f64> = tr.grid().iter().map(|x| x.sin() + 0.5 * (2.0 * x).sin()).collect();
    let s = tr.analyze(&values).unwrap();
    assert!((s.coeff(1) - 1.0).abs() < 1e-10);
    assert!((s.coeff(2) - 0.5).abs() < 1e-10);
    assert!(s.coeffs()[2..].iter().all(|c| c.abs() < 1e-10));
    assert!(Transform::new(PI, 64, 64).is_err());
}

#[test]
fn closed_form_weights_match_quadrature() {
    let length = PI;
    let (t0, t1, tmax) = (0.1, 0.6, 1.0);
    let chi = SineSeries::single_mode(length, 3, 3, 1.0);
    let lambda = 9.0;
    let got = chi.double_integrate_semigroup(t0, t1, tmax).unwrap().coeff(3);
    let inner = |t: f64| simpson(|tau| (-lambda * (t - tau)).exp(), t0, t.min(t1), 400);
    let oracle = simpson(inner, t0, t1, 800) + simpson(inner, t1, tmax, 800);
    assert!((got - oracle).abs() < 1e-9 * oracle.abs().max(1.0), "{got} vs {oracle}");
    let single = chi.integrate_semigroup(0.2, 0.7).unwrap().coeff(3);
    let oracle = simpson(|tau| (-lambda * tau).exp(), 0.2, 0.7, 2000);
    assert!((single - oracle).abs() < 1e-12);
}
