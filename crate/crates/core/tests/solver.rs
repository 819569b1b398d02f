use core::f64::consts::FRAC_PI_4;
use heatcert_core::certificates::{certify_existence, estimate_bounds, CertificateConfig, Context, RadiiConfig};
use heatcert_core::constants::{compute_constants, ConstantsConfig, GrowthBounds};
use heatcert_core::expr::Expression;
use heatcert_core::operators::{Discretization, NonlocalCondition, Operators, Pair, ProblemSpec};
use heatcert_core::solver::{multi_start, picard_solve, seeds, RegionRadii, SolveConfig, Status};
use heatcert_core::spectral::DomainGeometry;

fn spec(f: &str, g: &str) -> ProblemSpec {
    ProblemSpec {
        geometry: DomainGeometry::symmetric_pi(FRAC_PI_4).unwrap(),
        f: Expression::parse(f).unwrap(),
        g: Expression::parse(g).unwrap(),
        alpha: NonlocalCondition::integral("u", "u", GrowthBounds::UNIT).unwrap(),
        beta: NonlocalCondition::integral("v", "u", GrowthBounds::UNIT).unwrap(),
        discretization: Discretization { nx: 64, nt: 100, modes: 63 },
    }
}

const EXISTENCE_F: &str = "3.2*min(5*u,1)+0.3*min(5*v,1)";
const EXISTENCE_G: &str = "3.2*min(5*v,1)+0.3*min(5*u,1)";

#[test]
fn zero_problem_has_only_the_zero_solution() {
    let mut s = spec("0", "0");
    s.alpha = NonlocalCondition::zero();
    s.beta = NonlocalCondition::zero();
    let ops = Operators::new(s).unwrap();
    let cfg = SolveConfig::default();
    let zero = picard_solve(&ops, &cfg, Pair::zeros(*ops.grid()), "zero", None);
    assert_eq!(zero.status, Status::Converged);
    assert_eq!(zero.iterations, 1);
    let ms = multi_start(&ops, &cfg, None, None);
    assert_eq!(ms.distinct.len(), 1);
    assert_eq!(ms.runs[ms.distinct[0]].solution.sup_norm(), 0.0);
}

#[test]
fn small_linear_reaction_contracts_to_zero() {
    let ops = Operators::new(spec("0.1*u", "0.1*v")).unwrap();
    let cfg = SolveConfig::default();
    let radii = RegionRadii { r: (1.0, 1.0), big_r: (20.0, 20.0), rho: None };
    let ms = multi_start(&ops, &cfg, Some(&radii), None);
    assert_eq!(ms.runs.len(), 8);
    for run in &ms.runs {
        assert_eq!(run.status, Status::Converged, "{}", run.label);
        assert!(run.residual <= 1e-8);
        assert!(run.solution.sup_norm() < 1e-7, "{}", run.label);
    }
    assert_eq!(ms.distinct.len(), 1);
}

#[test]
fn converged_solutions_pass_all_rechecks() {
    let geom = DomainGeometry::symmetric_pi(FRAC_PI_4).unwrap();
    let consts = compute_constants(&geom, &ConstantsConfig::default()).unwrap();
    let s = spec(EXISTENCE_F, EXISTENCE_G);
    let radii = RadiiConfig::existence((1.0, 1.0), (20.0, 20.0));
    let table = estimate_bounds(&s, &radii, consts.m, &CertificateConfig::default()).unwrap();
    let ctx = Context::new(&s, &consts, 1e-9).unwrap();
    let cert = certify_existence(&ctx, &table, radii.r, radii.big_r).unwrap();
    assert!(cert.holds);

    let ops = Operators::new(s).unwrap();
    let cfg = SolveConfig::default();
    let rr = RegionRadii { r: radii.r, big_r: radii.big_r, rho: None };
    let ms = multi_start(&ops, &cfg, Some(&rr), Some(consts.m));
    let mut nonzero = 0;
    for run in ms.runs.iter().filter(|r| r.converged()) {
        let checks = run.checks.expect("converged runs are re-checked");
        assert!(run.residual <= cfg.tol);
        assert!(checks.residual_n <= 10.0 * cfg.tol);
        assert!(checks.cone_u.holds && checks.cone_v.holds);
        assert!(checks.harnack_u.unwrap().holds && checks.harnack_v.unwrap().holds);
        if !run.is_trivial(10.0 * cfg.tol) {
            nonzero += 1;
            assert!(checks.positive_floor);
            let loc = run.localization;
            assert!(cert.asserted[0].contains((loc.norm_u, loc.norm_v), (loc.floor_u, loc.floor_v)));
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn relaxation_does_not_change_the_limit() {
    let ops = Operators::new(spec(EXISTENCE_F, EXISTENCE_G)).unwrap();
    let base = SolveConfig::default();
    let seed = seeds(&ops, &base, (20.0, 20.0)).remove(2).1;
    let a = picard_solve(&ops, &base, seed.clone(), "a", None);
    let other = SolveConfig { relaxation: 0.8, ..base };
    let b = picard_solve(&ops, &other, seed, "b", None);
    assert!(a.converged() && b.converged());
    assert!(a.solution.distance(&b.solution) <= 10.0 * base.tol);
}

#[test]
fn runs_are_reproducible() {
    let ops = Operators::new(spec("0.5*u + 0.2*min(v,1)", "0.4*v")).unwrap();
    let cfg = SolveConfig::default();
    let first = multi_start(&ops, &cfg, None, None);
    let second = multi_start(&ops, &cfg, None, None);
    for (a, b) in first.runs.iter().zip(&second.runs) {
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.iterations, b.iterations);
    }
}
