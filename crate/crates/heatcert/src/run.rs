//! Subcommand dispatch. Seeds, scan points and bound tables run on a rayon
//! pool; results are gathered in input order so reports do not depend on
//! the thread count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context as _, Result};
use heatcert_core::certificates::{
    certify_existence, certify_nonexistence, certify_or_existence, certify_three_solutions,
    estimate_bounds, nested_tables, scan_nested_radii, BoundTable, CertificateReport, Context,
    RadiiConfig, Theorem,
};
use heatcert_core::constants::{
    compute_constants, nonexistence_constants, scan_argmin, scan_point, scan_values, thresholds,
    ConstantsBundle,
};
use heatcert_core::field::SpaceTimeField;
use heatcert_core::operators::{Component, Operators};
use heatcert_core::solver::{collect, picard_solve, seeds, RegionRadii, SolveResult};
use heatcert_core::spectral::{project_indicator, Region as SpectralRegion, Transform};
use rayon::prelude::*;

use crate::config::{Loaded, Problem, ScanConfig};
use crate::export;
use crate::report::{
    BoxLink, CertificateEntry, ConstantsReport, GridInfo, PerComponent, ProblemEcho, RunEntry,
    RunReport, Scalar, ScanReport, SnappedTime, SnappedTimes, SolveReport, ToolInfo,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    Certify,
    Solve,
    Scan,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Certify => "certify",
            Command::Solve => "solve",
            Command::Scan => "scan",
            Command::All => "all",
        }
    }

    fn constants(self) -> bool {
        !matches!(self, Command::Scan)
    }

    fn certify(self) -> bool {
        matches!(self, Command::Certify | Command::All)
    }

    fn solve(self) -> bool {
        matches!(self, Command::Solve | Command::All)
    }
}

/// Command-line replacements for problem-file settings.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub modes: Option<usize>,
    pub nx: Option<usize>,
    pub nt: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
}

impl Overrides {
    /// Reloads the problem with the overrides written into its file form, so
    /// they are validated like file settings and show up in the echo.
    pub fn apply(&self, problem: &Problem) -> Result<Loaded, crate::config::ConfigError> {
        let mut file = problem.to_file();
        if let Some(k) = self.modes {
            file.constants.get_or_insert_with(Default::default).modes = Some(k);
        }
        let disc = file.discretization.get_or_insert_with(Default::default);
        let old = problem.spec.discretization;
        if let Some(nx) = self.nx {
            disc.nx = Some(nx);
            disc.modes = Some(if old.modes + 1 == old.nx {
                nx.saturating_sub(1)
            } else {
                old.modes.min(nx.saturating_sub(1))
            });
        }
        if let Some(nt) = self.nt {
            disc.nt = Some(nt);
        }
        let solver = file.solver.get_or_insert_with(Default::default);
        if let Some(tol) = self.tol {
            solver.tol = Some(tol);
        }
        if let Some(seed) = self.seed {
            solver.rng_seed = Some(seed);
        }
        if let Some(steps) = self.steps {
            let s = problem.scan_config();
            file.scan = Some(crate::config::ScanSection {
                b_min: s.b_min.into(),
                b_max: s.b_max.into(),
                steps,
            });
        }
        Problem::from_file(&file)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    pub csv_dir: Option<PathBuf>,
}

struct Timer(BTreeMap<String, f64>);

impl Timer {
    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(phase.to_string(), start.elapsed().as_secs_f64());
        out
    }
}

pub fn run(command: Command, loaded: &Loaded, opts: &RunOptions) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .context("building the worker pool")?;
    pool.install(|| run_in_pool(command, loaded, opts))
}

fn run_in_pool(command: Command, loaded: &Loaded, opts: &RunOptions) -> Result<RunReport> {
    let problem = &loaded.problem;
    let mut timer = Timer(BTreeMap::new());
    let total = Instant::now();
    let mut files = Vec::new();
    if let Some(dir) = &opts.csv_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let echo = echo(problem)?;

    let consts = if command.constants() {
        let bundle = timer
            .time("constants", || compute_constants(&problem.spec.geometry, &problem.constants))
            .context("computing constants")?;
        if let Some(dir) = &opts.csv_dir {
            let field = evolved_indicator(problem)?;
            export::write_field(&dir.join("indicator.csv"), &field)?;
            files.push("indicator.csv".to_string());
        }
        Some(bundle)
    } else {
        None
    };

    let certificates = match (&consts, command.certify()) {
        (Some(c), true) => timer.time("certify", || certify(problem, c))?,
        _ => Vec::new(),
    };

    let solve = match (&consts, command.solve()) {
        (Some(c), true) => {
            let (report, results) = timer.time("solve", || solve(problem, c, &certificates))?;
            if let Some(dir) = &opts.csv_dir {
                for (k, i) in report.distinct.iter().enumerate() {
                    let name = format!("solution_{}.csv", k + 1);
                    export::write_solution(&dir.join(&name), &results[*i].solution)?;
                    files.push(name);
                }
            }
            Some(report)
        }
        _ => None,
    };

    let scan = if command == Command::Scan || (command == Command::All && problem.scan.is_some()) {
        let s = timer.time("scan", || scan(problem, problem.scan_config()))?;
        if let Some(dir) = &opts.csv_dir {
            export::write_scan(&dir.join("scan.csv"), &s.rows)?;
            files.push("scan.csv".to_string());
        }
        Some(s)
    } else {
        None
    };

    let constants = consts.map(|bundle| constants_report(problem, bundle));
    let mut timings = timer.0;
    timings.insert("total".to_string(), total.elapsed().as_secs_f64());
    Ok(RunReport {
        tool: ToolInfo::default(),
        command: command.name().to_string(),
        problem: echo,
        constants,
        certificates,
        solve,
        scan,
        files,
        timings,
        warnings: loaded.warnings.clone(),
    })
}

fn echo(problem: &Problem) -> Result<ProblemEcho> {
    let spec = &problem.spec;
    let grid = spec.grid()?;
    let subdomain = grid.snap_subdomain(spec.geometry.d_lo, spec.geometry.d_hi)?;
    let ops_free_snaps = |c: Component| -> Vec<SnappedTime> {
        match spec.condition(c) {
            heatcert_core::operators::NonlocalCondition::Multipoint(m) => m
                .times
                .iter()
                .map(|t| SnappedTime {
                    time: *t,
                    distance: grid.snap_time(*t).1,
                })
                .collect(),
            _ => Vec::new(),
        }
    };
    Ok(ProblemEcho {
        config: problem.to_toml(),
        settings: problem.to_file(),
        grid: GridInfo {
            nx: grid.nx,
            nt: grid.nt,
            modes: spec.discretization.modes,
            dx: grid.dx(),
            dt: grid.dt(),
            subdomain,
            time_window: grid.time_window(spec.geometry.t0, spec.geometry.t1),
            snapped_times: SnappedTimes {
                alpha: ops_free_snaps(Component::U),
                beta: ops_free_snaps(Component::V),
            },
        },
    })
}

/// `S(t)χ_D` on the problem grid.
pub fn evolved_indicator(problem: &Problem) -> Result<SpaceTimeField> {
    let spec = &problem.spec;
    let grid = spec.grid()?;
    let modes = spec.discretization.modes;
    let tr = Transform::new(spec.geometry.length, grid.nx, modes)?;
    let chi = project_indicator(&spec.geometry, SpectralRegion::D, modes);
    let mut field = SpaceTimeField::zeros(grid);
    for n in 0..=grid.nt {
        let row = tr.synthesize(&chi.apply_semigroup(grid.t(n))?);
        field.row_mut(n).copy_from_slice(&row);
    }
    Ok(field)
}

fn constants_report(problem: &Problem, bundle: ConstantsBundle) -> ConstantsReport {
    let tmax = problem.spec.geometry.tmax;
    let bounds = problem.spec.integral_bounds();
    let thr = bounds.map(|(a, b)| PerComponent {
        u: thresholds(&bundle, &a),
        v: thresholds(&bundle, &b),
    });
    ConstantsReport {
        summary: ConstantsReport::summary_of(&bundle),
        threshold_display: thr.map(|t| PerComponent {
            u: (Scalar::new(t.u.sup), Scalar::new(t.u.inf)),
            v: (Scalar::new(t.v.sup), Scalar::new(t.v.inf)),
        }),
        thresholds: thr,
        slopes: bounds.map(|(a, b)| PerComponent {
            u: nonexistence_constants(&bundle, &a, tmax),
            v: nonexistence_constants(&bundle, &b, tmax),
        }),
        bundle,
    }
}

fn entry(report: CertificateReport) -> CertificateEntry {
    CertificateEntry {
        report,
        parts: Vec::new(),
    }
}

fn certify(problem: &Problem, consts: &ConstantsBundle) -> Result<Vec<CertificateEntry>> {
    let spec = &problem.spec;
    let theorems = problem.selected_theorems();
    let ctx = match Context::new(spec, consts, problem.certificate.margin) {
        Ok(c) => c,
        Err(e) => {
            let list = if theorems.is_empty() {
                vec![Theorem::Existence]
            } else {
                theorems
            };
            return Ok(list
                .into_iter()
                .map(|t| entry(CertificateReport::refused(t, e.to_string())))
                .collect());
        }
    };
    let Some(radii) = &problem.radii else {
        let list = if theorems.is_empty() {
            vec![Theorem::Existence]
        } else {
            theorems
        };
        return Ok(list
            .into_iter()
            .map(|t| entry(CertificateReport::refused(t, "no [radii] section".to_string())))
            .collect());
    };

    let needs_table = theorems
        .iter()
        .any(|t| !matches!(t, Theorem::Nonexistence | Theorem::NestedScan));
    let needs_nested = theorems.contains(&Theorem::NestedScan);
    let cfg = &problem.certificate;
    let (table, nested) = rayon::join(
        || needs_table.then(|| estimate_bounds(spec, radii, consts.m, cfg)),
        || needs_nested.then(|| nested_tables(spec, radii, consts.m, cfg)),
    );

    let mut out = Vec::new();
    for theorem in theorems {
        let result = match theorem {
            Theorem::Nonexistence => certify_nonexistence(spec, &ctx, radii.big_r, cfg.density).map(entry),
            Theorem::NestedScan => match &nested {
                Some(Ok(tables)) => scan_nested_radii(&ctx, &radii.nested, tables).map(|(summary, parts)| {
                    CertificateEntry {
                        report: summary,
                        parts,
                    }
                }),
                Some(Err(e)) => Err(e.clone()),
                None => unreachable!("nested tables requested"),
            },
            _ => match &table {
                Some(Ok(t)) => from_table(theorem, &ctx, t, radii).map(entry),
                Some(Err(e)) => Err(e.clone()),
                None => unreachable!("bound table requested"),
            },
        };
        out.push(result.unwrap_or_else(|e| entry(CertificateReport::refused(theorem, e.to_string()))));
    }
    Ok(out)
}

fn from_table(
    theorem: Theorem,
    ctx: &Context,
    table: &BoundTable,
    radii: &RadiiConfig,
) -> Result<CertificateReport, heatcert_core::certificates::CertificateError> {
    match theorem {
        Theorem::Existence => certify_existence(ctx, table, radii.r, radii.big_r),
        Theorem::OrExistence => certify_or_existence(ctx, table, radii),
        Theorem::ThreeSolutions => certify_three_solutions(ctx, table, radii, false),
        Theorem::ThreeSolutionsStrengthened => certify_three_solutions(ctx, table, radii, true),
        Theorem::Nonexistence | Theorem::NestedScan => unreachable!("handled by the caller"),
    }
}

fn asserted_links(certificates: &[CertificateEntry], r: &SolveResult) -> Vec<BoxLink> {
    if !r.converged() {
        return Vec::new();
    }
    let loc = r.localization;
    let mut links = Vec::new();
    for (ci, c) in certificates.iter().enumerate() {
        if !c.report.holds {
            continue;
        }
        for (bi, b) in c.report.asserted.iter().enumerate() {
            if b.contains((loc.norm_u, loc.norm_v), (loc.floor_u, loc.floor_v)) {
                links.push(BoxLink {
                    certificate: ci,
                    index: bi,
                });
            }
        }
    }
    links
}

fn solve(
    problem: &Problem,
    consts: &ConstantsBundle,
    certificates: &[CertificateEntry],
) -> Result<(SolveReport, Vec<SolveResult>)> {
    let ops = Operators::new(problem.spec.clone())?;
    let cfg = &problem.solver;
    let region_radii = problem.radii.as_ref().map(|r| RegionRadii {
        r: r.r,
        big_r: r.big_r,
        rho: r.rho,
    });
    let scale = region_radii.map(|r| r.big_r).unwrap_or((1.0, 1.0));
    let runs: Vec<SolveResult> = seeds(&ops, cfg, scale)
        .into_par_iter()
        .map(|(label, seed)| picard_solve(&ops, cfg, seed, &label, Some(consts.m)))
        .collect();
    let ms = collect(runs, cfg, region_radii.as_ref());
    let entries = ms
        .runs
        .iter()
        .enumerate()
        .map(|(i, r)| RunEntry {
            label: r.label.clone(),
            status: r.status.clone(),
            residual: r.residual,
            iterations: r.iterations,
            localization: r.localization,
            region: ms.regions[i],
            checks: r.checks,
            same_as: if r.converged() && !ms.distinct.contains(&i) {
                ms.distinct
                    .iter()
                    .copied()
                    .find(|k| ms.runs[*k].solution.distance(&r.solution) < 10.0 * cfg.tol)
            } else {
                None
            },
            asserted_in: asserted_links(certificates, r),
        })
        .collect();
    let report = SolveReport {
        config: *cfg,
        radii: region_radii,
        runs: entries,
        distinct: ms.distinct.clone(),
    };
    Ok((report, ms.runs))
}

fn scan(problem: &Problem, s: ScanConfig) -> Result<ScanReport> {
    let base = problem.spec.geometry;
    let cfg = problem.constants;
    let rows = scan_values(s.b_min, s.b_max, s.steps)
        .into_par_iter()
        .map(|b| scan_point(&base, b, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let argmin = scan_argmin(&rows).context("empty scan")?;
    Ok(ScanReport {
        b_min: s.b_min,
        b_max: s.b_max,
        steps: s.steps,
        rows,
        argmin,
    })
}

/// Writes pretty JSON to `path`, or standard output when `None`.
pub fn write_report(report: &RunReport, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}
