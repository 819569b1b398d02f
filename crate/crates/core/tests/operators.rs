use core::f64::consts::FRAC_PI_4;
use heatcert_core::constants::GrowthBounds;
use heatcert_core::expr::Expression;
use heatcert_core::field::{in_cone, SpaceTimeField};
use heatcert_core::operators::{
    nemytskii, Component, Discretization, FixedPointMap, NonlocalCondition, Operators, ProblemSpec,
};
use heatcert_core::spectral::{project_indicator, DomainGeometry, Region};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(f: &str, g: &str, alpha: NonlocalCondition, beta: NonlocalCondition, nx: usize, nt: usize) -> ProblemSpec {
    ProblemSpec {
        geometry: DomainGeometry::symmetric_pi(FRAC_PI_4).unwrap(),
        f: Expression::parse(f).unwrap(),
        g: Expression::parse(g).unwrap(),
        alpha,
        beta,
        discretization: Discretization { nx, nt, modes: nx - 1 },
    }
}

fn ops(f: &str, g: &str, nt: usize) -> Operators {
    Operators::new(spec(f, g, NonlocalCondition::zero(), NonlocalCondition::zero(), 64, nt)).unwrap()
}

fn max_error(a: &SpaceTimeField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let g = a.grid();
    let mut worst: f64 = 0.0;
    for n in 0..=g.nt {
        for j in 0..=g.nx {
            worst = worst.max((a.get(n, j) - exact(g.t(n), g.x(j))).abs());
        }
    }
    worst
}

/// Smooth nonnegative field built from a few random positive sine modes.
fn smooth_field(o: &Operators, rng: &mut ChaCha8Rng, scale: f64) -> SpaceTimeField {
    let amps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.random_range(0.0..scale), rng.random_range(0.0..2.0), rng.random_range(0.0..1.0)))
        .collect();
    SpaceTimeField::from_fn(*o.grid(), |t, x| {
        let base = (x).sin();
        amps.iter()
            .enumerate()
            .map(|(i, (a, rate, wobble))| {
                let k = (2 * i + 1) as f64;
                a * (-rate * t).exp() * base * (1.0 + wobble * (k * x).sin() * (k * x).sin())
            })
            .sum()
    })
}

#[test]
fn duhamel_constant_forcing() {
    let o = ops("0", "0", 200);
    let forcing = SpaceTimeField::from_fn(*o.grid(), |_, x| x.sin());
    let w = o.hat_s(&forcing).unwrap();
    let err = max_error(&w, |t, x| (1.0 - (-t).exp()) * x.sin());
    assert!(err < 1e-6, "{err}");
    assert_eq!(o.hat_s(&o.zero_field()).unwrap().sup_norm(), 0.0);
}

#[test]
fn duhamel_resonant_forcing_is_second_order() {
    let err = |nt: usize| {
        let o = ops("0", "0", nt);
        let forcing = SpaceTimeField::from_fn(*o.grid(), |t, x| (-t).exp() * x.sin());
        max_error(&o.hat_s(&forcing).unwrap(), |t, x| t * (-t).exp() * x.sin())
    };
    let (coarse, fine) = (err(100), err(200));
    assert!(fine < 1e-6, "{fine}");
    assert!(coarse / fine >= 3.5, "{coarse} / {fine}");
}

#[test]
fn bar_s_examples() {
    let o = ops("0", "0", 100);
    let u0: Vec<f64> = o.grid().xs().iter().map(|x| x.sin()).collect();
    let u = o.bar_s(&u0).unwrap();
    assert!(max_error(&u, |t, x| (-t).exp() * x.sin()) < 1e-10);
    assert_eq!(o.bar_s(&vec![0.0; 65]).unwrap().sup_norm(), 0.0);

    let o = Operators::new(spec("0", "0", NonlocalCondition::zero(), NonlocalCondition::zero(), 128, 100)).unwrap();
    let chi = project_indicator(&o.spec().geometry, Region::D, 127);
    let u = o.bar_s(&o.transform().synthesize(&chi)).unwrap();
    let at = u.get(100, 32);
    assert_eq!((at * 100.0).round() / 100.0, 0.23, "{at}");
}

#[test]
fn nemytskii_examples() {
    let o = ops("0", "0", 20);
    let g = *o.grid();
    let u = SpaceTimeField::from_fn(g, |t, x| (x.sin() - 0.2) * (1.0 + t));
    let v = SpaceTimeField::from_fn(g, |_, x| x.cos());
    let zero = nemytskii("f", &Expression::parse("0").unwrap(), &u, &v).unwrap();
    assert_eq!(zero.sup_norm(), 0.0);
    let same = nemytskii("f", &Expression::parse("u").unwrap(), &u, &v).unwrap();
    assert_eq!(same, u.map(|w| w.max(0.0)));
    let direct = nemytskii("f", &Expression::parse("sin(x)*exp(-t)").unwrap(), &u, &v).unwrap();
    assert!(max_error(&direct, |t, x| x.sin() * (-t).exp()) < 1e-15);
}

#[test]
fn integral_alpha_uses_trapezoid_in_time() {
    let alpha = NonlocalCondition::integral("u", "u", GrowthBounds::UNIT).unwrap();
    let o = Operators::new(spec("0", "0", alpha, NonlocalCondition::zero(), 64, 200)).unwrap();
    let u = SpaceTimeField::from_fn(*o.grid(), |t, x| (-t).exp() * x.sin());
    let a = o.nonlocal(Component::U, &u, &o.zero_field()).unwrap();
    let exact = 1.0 - (-1.0f64).exp();
    for (x, value) in o.grid().xs().iter().zip(&a) {
        assert!((value - exact * x.sin()).abs() < 1e-5);
    }
    let zero = o.nonlocal(Component::U, &o.zero_field(), &o.zero_field()).unwrap();
    assert!(zero.iter().all(|z| *z == 0.0));
}

#[test]
fn multipoint_alpha_snaps_times() {
    let alpha = NonlocalCondition::multipoint(vec![0.5, 2.0], vec![0.333, 1.0]);
    let o = Operators::new(spec("0", "0", alpha, NonlocalCondition::terminal(1.0), 64, 10)).unwrap();
    let u = SpaceTimeField::from_fn(*o.grid(), |t, x| (1.0 + t) * x.sin());
    let a = o.nonlocal(Component::U, &u, &u).unwrap();
    for (j, value) in a.iter().enumerate() {
        let expected = 0.5 * u.get(3, j) + 2.0 * u.get(10, j);
        assert!((value - expected).abs() < 1e-15);
    }
    let b = o.nonlocal(Component::V, &u, &u).unwrap();
    assert_eq!(b, u.last().to_vec());
    let snaps = o.snap_distances(Component::U);
    assert!((snaps[0].1 - 0.033).abs() < 1e-12);
    assert_eq!(snaps[1].1, 0.0);
}

#[test]
fn alpha_respects_growth_estimates() {
    let bounds = GrowthBounds::new(0.5, 0.8, 1.0, 1.5).unwrap();
    let alpha = NonlocalCondition::integral("0.5*u + 0.3*u*v/(1+v)", "u*(1 + 0.5*tanh(u))", bounds).unwrap();
    let o = Operators::new(spec("0", "0", alpha, NonlocalCondition::zero(), 64, 50)).unwrap();
    let plain = NonlocalCondition::integral("u", "u", GrowthBounds::UNIT).unwrap();
    let o_plain = Operators::new(spec("0", "0", plain, NonlocalCondition::zero(), 64, 50)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let u = smooth_field(&o, &mut rng, 3.0);
        let v = smooth_field(&o, &mut rng, 3.0);
        let a = o.nonlocal(Component::U, &u, &v).unwrap();
        let trapz = o_plain.nonlocal(Component::U, &u, &v).unwrap();
        for (value, w) in a.iter().zip(&trapz) {
            let slack = 1e-12 * (1.0 + w);
            assert!(value + slack >= 0.5 * w && *value <= 1.2 * w + slack);
        }
    }
}

#[test]
fn m_examples() {
    let o = ops("0", "0", 40);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = smooth_field(&o, &mut rng, 2.0);
    let image = o.m_apply(&u, &u).unwrap();
    assert_eq!(image.sup_norm(), 0.0);
    assert_eq!(o.residual(FixedPointMap::M, &o.zero_field(), &o.zero_field()).unwrap(), 0.0);
    assert!(o.residual(FixedPointMap::M, &u, &u).unwrap() > 0.0);

    let o = ops("sin(x)", "0", 200);
    let step = o.m_apply(&o.zero_field(), &o.zero_field()).unwrap();
    let forcing = SpaceTimeField::from_fn(*o.grid(), |_, x| x.sin());
    assert!(step.u.distance(&o.hat_s(&forcing).unwrap()).unwrap() < 1e-14);
    assert_eq!(step.v.sup_norm(), 0.0);
}

#[test]
fn n_reproduces_its_own_initial_value() {
    let alpha = NonlocalCondition::integral("u + 0.2*v", "u", GrowthBounds::new(1.0, 1.2, 1.0, 1.0).unwrap()).unwrap();
    let beta = NonlocalCondition::multipoint(vec![0.4, 0.3], vec![0.5, 1.0]);
    let o = Operators::new(spec("1 + u*v/(1+u)", "0.5*u + sin(x)", alpha, beta, 64, 60)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let u = smooth_field(&o, &mut rng, 2.0);
        let v = smooth_field(&o, &mut rng, 2.0);
        let n = o.n_apply(&u, &v).unwrap();
        let (fu, gv) = o.reactions(&u, &v).unwrap();
        let u_again = o.evolve(n.u.initial(), Some(&o.duhamel_coeffs(&fu).unwrap())).unwrap();
        let v_again = o.evolve(n.v.initial(), Some(&o.duhamel_coeffs(&gv).unwrap())).unwrap();
        assert!(u_again.distance(&n.u).unwrap() < 1e-8);
        assert!(v_again.distance(&n.v).unwrap() < 1e-8);
    }
}

#[test]
fn maps_send_nonnegative_inputs_into_the_cone() {
    let alpha = NonlocalCondition::integral("u", "u", GrowthBounds::UNIT).unwrap();
    let beta = NonlocalCondition::integral("v + 0.5*u", "u", GrowthBounds::new(1.0, 1.5, 1.0, 1.0).unwrap()).unwrap();
    let o = Operators::new(spec("3*min(u,1)*sin(x)", "exp(-t)*v*sin(x)", alpha, beta, 64, 50)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let u = smooth_field(&o, &mut rng, 4.0);
        let v = smooth_field(&o, &mut rng, 4.0);
        for map in [FixedPointMap::M, FixedPointMap::N] {
            let image = o.apply(map, &u, &v).unwrap();
            for w in [&image.u, &image.v] {
                let check = in_cone(w, o.transform(), 1e-6);
                assert!(check.holds, "{map:?} {check:?}");
            }
        }
    }
}

#[test]
fn m_is_monotone_for_nondecreasing_nonlinearities() {
    let alpha = NonlocalCondition::integral("u", "u", GrowthBounds::UNIT).unwrap();
    let beta = NonlocalCondition::terminal(1.0);
    let o = Operators::new(spec("2*tanh(u + v)*sin(x)", "min(u, 2)*sin(x)", alpha, beta, 64, 50)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let u = smooth_field(&o, &mut rng, 2.0);
        let v = smooth_field(&o, &mut rng, 2.0);
        let du = smooth_field(&o, &mut rng, 1.0);
        let dv = smooth_field(&o, &mut rng, 1.0);
        let low = o.m_apply(&u, &v).unwrap();
        let high = o.m_apply(&u.add(&du).unwrap(), &v.add(&dv).unwrap()).unwrap();
        for (a, b) in low.u.values().iter().zip(high.u.values()) {
            assert!(*a <= b + 1e-6);
        }
        for (a, b) in low.v.values().iter().zip(high.v.values()) {
            assert!(*a <= b + 1e-6);
        }
    }
}

#[test]
fn terminal_condition_without_reaction_only_admits_zero() {
    let o = Operators::new(spec(
        "0",
        "0",
        NonlocalCondition::terminal(1.0),
        NonlocalCondition::terminal(1.0),
        64,
        50,
    ))
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut u = smooth_field(&o, &mut rng, 5.0);
    for _ in 0..40 {
        u = o.m_apply(&u, &u).unwrap().u;
    }
    assert!(u.sup_norm() < 1e-12);
}
