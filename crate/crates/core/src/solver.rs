//! Relaxed Picard iteration for fixed points of `M`, run from several seeds.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{harnack_check, in_cone, plateau, Check, SpaceTimeField};
use crate::operators::{FixedPointMap, OperatorError, Operators, Pair};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveConfig {
    /// `ω` in `x ← (1 - ω)x + ωM(x)`.
    pub relaxation: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// Iteration stops as diverged once the sup norm exceeds this.
    pub divergence_cap: f64,
    /// Number of pseudo-random seeds added to the deterministic ones.
    pub random_seeds: usize,
    pub rng_seed: u64,
    /// Tolerance of the Harnack check on converged solutions.
    pub harnack_tol: f64,
    pub cone_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            relaxation: 0.5,
            max_iters: 5000,
            tol: 1e-9,
            divergence_cap: 1e8,
            random_seeds: 4,
            rng_seed: 0x5eed,
            harnack_tol: 1e-4,
            cone_tol: 1e-6,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(format!("relaxation {} outside (0, 1]", self.relaxation));
        }
        if !(self.tol > 0.0) {
            return Err(format!("tolerance {} must be positive", self.tol));
        }
        if self.max_iters == 0 {
            return Err("max_iters must be positive".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Status {
    Converged,
    Diverged,
    MaxIters,
    Error(String),
}

/// `(|u|, |v|, ⌊u⌋, ⌊v⌋)` of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Localization {
    pub norm_u: f64,
    pub norm_v: f64,
    pub floor_u: f64,
    pub floor_v: f64,
}

impl Localization {
    pub fn of(ops: &Operators, p: &Pair) -> Self {
        let d = ops.subdomain();
        Localization {
            norm_u: p.u.sup_norm(),
            norm_v: p.v.sup_norm(),
            floor_u: p.u.floor(d),
            floor_v: p.v.floor(d),
        }
    }
}

/// Checks run on a converged solution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolutionChecks {
    pub residual_n: f64,
    pub cone_u: Check,
    pub cone_v: Check,
    /// Present when a Harnack constant was supplied.
    pub harnack_u: Option<Check>,
    pub harnack_v: Option<Check>,
    /// A nonzero component has a positive floor.
    pub positive_floor: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub label: String,
    pub status: Status,
    pub solution: Pair,
    /// `|M(x) - x|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub localization: Localization,
    pub checks: Option<SolutionChecks>,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Both components below `scale` in sup norm.
    pub fn is_trivial(&self, scale: f64) -> bool {
        self.localization.norm_u <= scale && self.localization.norm_v <= scale
    }
}

fn relax(cur: &Pair, image: &Pair, omega: f64) -> Pair {
    let mix = |a: &SpaceTimeField, b: &SpaceTimeField| {
        a.combine(1.0 - omega, b, omega)
            .expect("iterates share the operator grid")
    };
    Pair {
        u: mix(&cur.u, &image.u),
        v: mix(&cur.v, &image.v),
    }
}

/// Relaxed Picard iteration from `seed`. `m` enables the Harnack check.
pub fn picard_solve(
    ops: &Operators,
    cfg: &SolveConfig,
    seed: Pair,
    label: &str,
    m: Option<f64>,
) -> SolveResult {
    let mut cur = seed;
    let mut residual = f64::INFINITY;
    let mut status = Status::MaxIters;
    let mut iterations = 0;
    for it in 1..=cfg.max_iters {
        iterations = it;
        let image = match ops.m_apply(&cur.u, &cur.v) {
            Ok(p) => p,
            Err(e) => {
                status = Status::Error(e.to_string());
                break;
            }
        };
        residual = image.distance(&cur);
        if !residual.is_finite() || image.sup_norm() > cfg.divergence_cap {
            status = Status::Diverged;
            break;
        }
        if residual <= cfg.tol {
            status = Status::Converged;
            break;
        }
        cur = relax(&cur, &image, cfg.relaxation);
    }
    let localization = Localization::of(ops, &cur);
    let checks = if status == Status::Converged {
        match verify(ops, cfg, &cur, m) {
            Ok(c) => Some(c),
            Err(e) => {
                status = Status::Error(e.to_string());
                None
            }
        }
    } else {
        None
    };
    SolveResult {
        label: label.to_string(),
        status,
        solution: cur,
        residual,
        iterations,
        localization,
        checks,
    }
}

fn verify(
    ops: &Operators,
    cfg: &SolveConfig,
    p: &Pair,
    m: Option<f64>,
) -> Result<SolutionChecks, OperatorError> {
    let residual_n = ops.residual(FixedPointMap::N, &p.u, &p.v)?;
    let d = ops.subdomain();
    let g = ops.spec().geometry;
    let scale = p.sup_norm().max(1.0);
    let harnack = |u: &SpaceTimeField| {
        m.map(|m| harnack_check(u, d, (g.t0, g.t1), m, cfg.harnack_tol * scale))
    };
    let nonzero = 10.0 * cfg.tol;
    let floor_ok = |u: &SpaceTimeField| u.sup_norm() <= nonzero || u.floor(d) > 0.0;
    Ok(SolutionChecks {
        residual_n,
        cone_u: in_cone(&p.u, ops.transform(), cfg.cone_tol * scale),
        cone_v: in_cone(&p.v, ops.transform(), cfg.cone_tol * scale),
        harnack_u: harnack(&p.u),
        harnack_v: harnack(&p.v),
        positive_floor: floor_ok(&p.u) && floor_ok(&p.v),
    })
}

/// Seeds for [`multi_start`]: zero, the plateau `ψ` scaled by
/// `c·(R1, R2)` for `c ∈ {1/4, 1/2, 1}`, then `cfg.random_seeds`
/// nonnegative random profiles drawn from a ChaCha stream seeded by
/// `cfg.rng_seed`. All seeds are constant in time.
pub fn seeds(ops: &Operators, cfg: &SolveConfig, scale: (f64, f64)) -> Vec<(String, Pair)> {
    let grid = *ops.grid();
    let psi = plateau(&grid, ops.subdomain());
    let profile = |c: f64, base: &[f64]| {
        let scaled: Vec<f64> = base.iter().map(|p| c * p).collect();
        SpaceTimeField::constant_in_time(grid, &scaled)
    };
    let mut out = Vec::new();
    out.push(("zero".to_string(), Pair::zeros(grid)));
    for c in [0.25, 0.5, 1.0] {
        out.push((
            format!("plateau x{c}"),
            Pair {
                u: profile(c * scale.0, &psi),
                v: profile(c * scale.1, &psi),
            },
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let random_profile = |rng: &mut ChaCha8Rng, radius: f64| {
        let amps: [f64; 4] = core::array::from_fn(|_| rng.random::<f64>());
        let height = radius * rng.random::<f64>();
        let raw: Vec<f64> = (0..=grid.nx)
            .map(|j| {
                let s = j as f64 / grid.nx as f64;
                let sum: f64 = amps
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * libm::sin((k + 1) as f64 * core::f64::consts::PI * s))
                    .sum();
                sum.max(0.0)
            })
            .collect();
        let peak = raw.iter().fold(0.0f64, |m, v| m.max(*v));
        let c = if peak > 0.0 { height / peak } else { 0.0 };
        profile(c, &raw)
    };
    for i in 0..cfg.random_seeds {
        let u = random_profile(&mut rng, scale.0);
        let v = random_profile(&mut rng, scale.1);
        out.push((format!("random #{}", i + 1), Pair { u, v }));
    }
    out
}

/// Radii delimiting the regions of the three-solution localization.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionRadii {
    pub r: (f64, f64),
    pub big_r: (f64, f64),
    pub rho: Option<(f64, f64)>,
}

/// Where a solution sits relative to `W = {|u| < ρ1, |v| < ρ2}`,
/// `V = {⌊u⌋ < r1 or ⌊v⌋ < r2}` and the ball `C` of radii `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Region {
    W,
    VMinusW,
    CMinusV,
    OutsideC,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::W => "W",
            Region::VMinusW => "V\\W",
            Region::CMinusV => "C\\V",
            Region::OutsideC => "outside C",
        }
    }
}

/// Classifies by `(|·|, ⌊·⌋)`; without `ρ`, `W` shrinks to the zero
/// solution within `zero_tol`.
pub fn classify(loc: &Localization, radii: &RegionRadii, zero_tol: f64) -> Region {
    if loc.norm_u > radii.big_r.0 || loc.norm_v > radii.big_r.1 {
        return Region::OutsideC;
    }
    let in_w = match radii.rho {
        Some(rho) => loc.norm_u < rho.0 && loc.norm_v < rho.1,
        None => loc.norm_u <= zero_tol && loc.norm_v <= zero_tol,
    };
    if in_w {
        Region::W
    } else if loc.floor_u > radii.r.0 && loc.floor_v > radii.r.1 {
        Region::CMinusV
    } else {
        Region::VMinusW
    }
}

/// All seed runs plus the indices of the distinct converged ones.
#[derive(Debug, Clone)]
pub struct MultiStart {
    pub runs: Vec<SolveResult>,
    pub distinct: Vec<usize>,
    pub regions: Vec<Option<Region>>,
    pub rng_seed: u64,
}

impl MultiStart {
    pub fn distinct_results(&self) -> impl Iterator<Item = &SolveResult> {
        self.distinct.iter().map(move |i| &self.runs[*i])
    }
}

/// Keeps converged runs whose sup distance to every earlier kept run is at
/// least `10·tol`, in seed order.
pub fn deduplicate(runs: &[SolveResult], tol: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        if !r.converged() {
            continue;
        }
        if kept
            .iter()
            .all(|k| runs[*k].solution.distance(&r.solution) >= 10.0 * tol)
        {
            kept.push(i);
        }
    }
    kept
}

/// Assembles the multi-start report from runs already computed in seed order.
pub fn collect(
    runs: Vec<SolveResult>,
    cfg: &SolveConfig,
    radii: Option<&RegionRadii>,
) -> MultiStart {
    let distinct = deduplicate(&runs, cfg.tol);
    let regions = runs
        .iter()
        .map(|r| {
            radii
                .filter(|_| r.converged())
                .map(|rr| classify(&r.localization, rr, 10.0 * cfg.tol))
        })
        .collect();
    MultiStart {
        runs,
        distinct,
        regions,
        rng_seed: cfg.rng_seed,
    }
}

/// Sequential multi-start; seeds scale with `radii.big_r` when given.
pub fn multi_start(
    ops: &Operators,
    cfg: &SolveConfig,
    radii: Option<&RegionRadii>,
    m: Option<f64>,
) -> MultiStart {
    let scale = radii.map(|r| r.big_r).unwrap_or((1.0, 1.0));
    let runs = seeds(ops, cfg, scale)
        .into_iter()
        .map(|(label, seed)| picard_solve(ops, cfg, seed, &label, m))
        .collect();
    collect(runs, cfg, radii)
}
