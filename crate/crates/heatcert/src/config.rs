//! Problem files: TOML with the sections documented in `docs/config.md`.
//!
//! Numbers may be written as TOML numbers or as constant expressions in
//! quotes (`"pi/4"`). Loading collects every problem it finds before
//! failing; [`Problem::to_toml`] prints a file that loads back to an equal
//! problem.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use heatcert_core::certificates::{CertificateConfig, RadiiConfig, Theorem};
use heatcert_core::constants::{ConstantsConfig, GrowthBounds};
use heatcert_core::expr::{Expression, Point};
use heatcert_core::operators::{
    boundary_violations, check_growth_bounds, check_nonnegative, Component, Discretization,
    IntegralCondition, NonlocalCondition, ProblemSpec,
};
use heatcert_core::solver::SolveConfig;
use heatcert_core::spectral::DomainGeometry;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("syntax error: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("invalid problem:\n{}", .0.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<String>),
}

impl ConfigError {
    pub fn messages(&self) -> Vec<String> {
        match self {
            ConfigError::Invalid(v) => v.clone(),
            other => vec![other.to_string()],
        }
    }
}

/// A TOML number or a constant expression such as `"3*pi/4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Value(f64),
    Expr(String),
}

impl From<f64> for Number {
    fn from(v: f64) -> Self {
        Number::Value(v)
    }
}

/// One value for both components, or `[first, second]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Radius {
    Both(Number),
    Each([Number; 2]),
}

impl From<(f64, f64)> for Radius {
    fn from(p: (f64, f64)) -> Self {
        Radius::Each([p.0.into(), p.1.into()])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<NonlinearitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlocal: Option<NonlocalSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discretization: Option<DiscretizationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<RadiiSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub length: Number,
    pub d_lo: Number,
    pub d_hi: Number,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<Number>,
    pub tmax: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySection {
    pub f: String,
    pub g: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlocalSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ConditionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<ConditionSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConditionSection {
    Integral {
        inner: String,
        outer: String,
        p: Number,
        q: Number,
        #[serde(rename = "P")]
        big_p: Number,
        #[serde(rename = "Q")]
        big_q: Number,
    },
    Multipoint {
        weights: Vec<Number>,
        times: Vec<Number>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nt: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_gibbs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NestedPair {
    pub r: Radius,
    #[serde(rename = "R")]
    pub big_r: Radius,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiiSection {
    pub r: Radius,
    #[serde(rename = "R")]
    pub big_r: Radius,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Radius>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varrho: Option<Radius>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_tilde: Option<Radius>,
    #[serde(default, rename = "R_tilde", skip_serializing_if = "Option::is_none")]
    pub r_tilde: Option<Radius>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nested: Vec<NestedPair>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_seeds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harnack_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorems: Option<Vec<Theorem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz_f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz_g: Option<f64>,
    /// Per-axis sample count of the growth and sign checks run at load time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub b_min: Number,
    pub b_max: Number,
    pub steps: usize,
}

/// `b` sweep of the subdomain `[b, L - b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub b_min: f64,
    pub b_max: f64,
    pub steps: usize,
}

impl ScanConfig {
    /// `b ∈ [0.05 L, 0.45 L]` in 17 steps.
    pub fn default_for(length: f64) -> Self {
        ScanConfig {
            b_min: 0.05 * length,
            b_max: 0.45 * length,
            steps: 17,
        }
    }
}

pub const DEFAULT_CHECK_SAMPLES: usize = 16;

/// A validated problem with every run setting resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub constants: ConstantsConfig,
    pub radii: Option<RadiiConfig>,
    pub solver: SolveConfig,
    pub certificate: CertificateConfig,
    /// `None` selects by the configured radii.
    pub theorems: Option<Vec<Theorem>>,
    pub check_samples: usize,
    pub scan: Option<ScanConfig>,
}

/// A problem plus the non-fatal findings of loading it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub problem: Problem,
    pub warnings: Vec<String>,
}

fn eval_number(n: &Number, role: &str, errors: &mut Vec<String>) -> f64 {
    match n {
        Number::Value(v) => *v,
        Number::Expr(src) => match Expression::parse(src) {
            Ok(e) if e.variables().iter().next().is_none() => match e.eval(Point::new(0.0, 0.0, 0.0, 0.0)) {
                Ok(v) => v,
                Err(err) => {
                    errors.push(format!("{role}: {err}"));
                    f64::NAN
                }
            },
            Ok(_) => {
                errors.push(format!("{role}: `{src}` must be a constant expression"));
                f64::NAN
            }
            Err(err) => {
                errors.push(format!("{role}: {err}"));
                f64::NAN
            }
        },
    }
}

fn eval_radius(r: &Radius, role: &str, errors: &mut Vec<String>) -> (f64, f64) {
    match r {
        Radius::Both(n) => {
            let v = eval_number(n, role, errors);
            (v, v)
        }
        Radius::Each([a, b]) => (eval_number(a, role, errors), eval_number(b, role, errors)),
    }
}

fn parse_expr(src: &str, role: &str, errors: &mut Vec<String>) -> Option<Expression> {
    match Expression::parse(src) {
        Ok(e) => Some(e),
        Err(err) => {
            errors.push(format!("{role}: {err}"));
            None
        }
    }
}

fn condition(
    section: Option<&ConditionSection>,
    name: &str,
    errors: &mut Vec<String>,
) -> Option<NonlocalCondition> {
    let Some(section) = section else {
        errors.push(format!("missing section [nonlocal.{name}]"));
        return None;
    };
    match section {
        ConditionSection::Integral {
            inner,
            outer,
            p,
            q,
            big_p,
            big_q,
        } => {
            let inner = parse_expr(inner, &format!("nonlocal.{name}.inner"), errors);
            let outer = parse_expr(outer, &format!("nonlocal.{name}.outer"), errors);
            let role = |k: &str| format!("nonlocal.{name}.{k}");
            let bounds = GrowthBounds {
                p: eval_number(p, &role("p"), errors),
                q: eval_number(q, &role("q"), errors),
                big_p: eval_number(big_p, &role("P"), errors),
                big_q: eval_number(big_q, &role("Q"), errors),
            };
            Some(NonlocalCondition::Integral(IntegralCondition {
                inner: inner?,
                outer: outer?,
                bounds,
            }))
        }
        ConditionSection::Multipoint { weights, times } => {
            let role = |k: &str, i: usize| format!("nonlocal.{name}.{k}[{i}]");
            let weights = weights
                .iter()
                .enumerate()
                .map(|(i, w)| eval_number(w, &role("weights", i), errors))
                .collect();
            let times = times
                .iter()
                .enumerate()
                .map(|(i, t)| eval_number(t, &role("times", i), errors))
                .collect();
            Some(NonlocalCondition::multipoint(weights, times))
        }
    }
}

impl Problem {
    pub fn load(path: impl AsRef<Path>) -> Result<Loaded, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Problem::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Loaded, ConfigError> {
        let file: FileConfig = toml::from_str(text)?;
        Problem::from_file(&file)
    }

    pub fn from_file(file: &FileConfig) -> Result<Loaded, ConfigError> {
        let mut errors = Vec::new();

        let geometry = match &file.domain {
            None => {
                errors.push("missing section [domain]".to_string());
                None
            }
            Some(d) => {
                let length = eval_number(&d.length, "domain.length", &mut errors);
                let d_lo = eval_number(&d.d_lo, "domain.d_lo", &mut errors);
                let d_hi = eval_number(&d.d_hi, "domain.d_hi", &mut errors);
                let t0 = d
                    .t0
                    .as_ref()
                    .map_or(0.0, |t| eval_number(t, "domain.t0", &mut errors));
                let tmax = eval_number(&d.tmax, "domain.tmax", &mut errors);
                let t1 = d
                    .t1
                    .as_ref()
                    .map_or(tmax, |t| eval_number(t, "domain.t1", &mut errors));
                Some(DomainGeometry {
                    length,
                    d_lo,
                    d_hi,
                    t0,
                    t1,
                    tmax,
                })
            }
        };

        let (f, g) = match &file.nonlinearity {
            None => {
                errors.push("missing section [nonlinearity]".to_string());
                (None, None)
            }
            Some(n) => (
                parse_expr(&n.f, "nonlinearity.f", &mut errors),
                parse_expr(&n.g, "nonlinearity.g", &mut errors),
            ),
        };

        let nonlocal = file.nonlocal.clone().unwrap_or_default();
        let alpha = condition(nonlocal.alpha.as_ref(), "alpha", &mut errors);
        let beta = condition(nonlocal.beta.as_ref(), "beta", &mut errors);

        let disc = file.discretization.clone().unwrap_or_default();
        let defaults = Discretization::default();
        let nx = disc.nx.unwrap_or(defaults.nx);
        let discretization = Discretization {
            nx,
            nt: disc.nt.unwrap_or(defaults.nt),
            modes: disc.modes.unwrap_or(nx.saturating_sub(1)),
        };

        let cs = file.constants.clone().unwrap_or_default();
        let cd = ConstantsConfig::default();
        let constants = ConstantsConfig {
            modes: cs.modes,
            t_gibbs: cs.t_gibbs.unwrap_or(cd.t_gibbs),
            rel_tol: cs.rel_tol.unwrap_or(cd.rel_tol),
            max_levels: cs.max_levels.unwrap_or(cd.max_levels),
        };
        if constants.modes == Some(0) {
            errors.push("constants.modes must be positive".to_string());
        }

        let radii = file.radii.as_ref().map(|r| {
            let mut radius = |x: &Radius, role: &str| eval_radius(x, role, &mut errors);
            RadiiConfig {
                r: radius(&r.r, "radii.r"),
                big_r: radius(&r.big_r, "radii.R"),
                rho: r.rho.as_ref().map(|x| radius(x, "radii.rho")),
                varrho: r.varrho.as_ref().map(|x| radius(x, "radii.varrho")),
                rho_tilde: r.rho_tilde.as_ref().map(|x| radius(x, "radii.rho_tilde")),
                r_tilde: r.r_tilde.as_ref().map(|x| radius(x, "radii.R_tilde")),
                nested: r
                    .nested
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        (
                            radius(&p.r, &format!("radii.nested[{j}].r")),
                            radius(&p.big_r, &format!("radii.nested[{j}].R")),
                        )
                    })
                    .collect(),
            }
        });
        if let Some(r) = &radii {
            if let Err(errs) = r.validate() {
                errors.extend(errs.into_iter().map(|e| format!("radii: {e}")));
            }
        }

        let ss = file.solver.clone().unwrap_or_default();
        let sd = SolveConfig::default();
        let solver = SolveConfig {
            relaxation: ss.relaxation.unwrap_or(sd.relaxation),
            max_iters: ss.max_iters.unwrap_or(sd.max_iters),
            tol: ss.tol.unwrap_or(sd.tol),
            divergence_cap: ss.divergence_cap.unwrap_or(sd.divergence_cap),
            random_seeds: ss.random_seeds.unwrap_or(sd.random_seeds),
            rng_seed: ss.rng_seed.unwrap_or(sd.rng_seed),
            harnack_tol: ss.harnack_tol.unwrap_or(sd.harnack_tol),
            cone_tol: ss.cone_tol.unwrap_or(sd.cone_tol),
        };
        if let Err(e) = solver.validate() {
            errors.push(format!("solver: {e}"));
        }

        let cert = file.certificate.clone().unwrap_or_default();
        let cdef = CertificateConfig::default();
        let certificate = CertificateConfig {
            margin: cert.margin.unwrap_or(cdef.margin),
            density: cert.density.unwrap_or(cdef.density),
            lipschitz_f: cert.lipschitz_f,
            lipschitz_g: cert.lipschitz_g,
            overrides: cert.overrides.clone(),
        };
        if certificate.density < 2 || certificate.density % 2 != 0 {
            errors.push(format!("certificate.density must be even and at least 2, got {}", certificate.density));
        }
        if !(certificate.margin >= 0.0) {
            errors.push(format!("certificate.margin must be nonnegative, got {}", certificate.margin));
        }
        for name in certificate.overrides.keys() {
            if !heatcert_core::certificates::names::ALL.contains(&name.as_str()) {
                errors.push(format!("certificate.overrides: unknown bound `{name}`"));
            }
        }
        let check_samples = cert.check_samples.unwrap_or(DEFAULT_CHECK_SAMPLES);
        if check_samples == 0 {
            errors.push("certificate.check_samples must be positive".to_string());
        }

        let scan = file.scan.as_ref().map(|s| ScanConfig {
            b_min: eval_number(&s.b_min, "scan.b_min", &mut errors),
            b_max: eval_number(&s.b_max, "scan.b_max", &mut errors),
            steps: s.steps,
        });
        if let (Some(s), Some(g)) = (&scan, &geometry) {
            if !(0.0 < s.b_min && s.b_min <= s.b_max && s.b_max < 0.5 * g.length) || s.steps == 0 {
                errors.push(format!(
                    "scan: need 0 < b_min <= b_max < L/2 and steps > 0, got [{}, {}] in {} steps",
                    s.b_min, s.b_max, s.steps
                ));
            }
        }

        let (Some(geometry), Some(f), Some(g), Some(alpha), Some(beta)) = (geometry, f, g, alpha, beta) else {
            return Err(ConfigError::Invalid(errors));
        };
        let spec = ProblemSpec {
            geometry,
            f,
            g,
            alpha,
            beta,
            discretization,
        };
        let structural_ok = match spec.validate() {
            Ok(()) => true,
            Err(errs) => {
                errors.extend(errs.into_iter().map(|e| e.to_string()));
                false
            }
        };

        let mut warnings = Vec::new();
        if structural_ok && errors.is_empty() {
            let reach = radii.as_ref().map_or((1.0, 1.0), sample_reach);
            sample_checks(&spec, reach, check_samples, &mut errors, &mut warnings);
        }
        if !errors.is_empty() {
            return Err(ConfigError::Invalid(errors));
        }
        Ok(Loaded {
            problem: Problem {
                spec,
                constants,
                radii,
                solver,
                certificate,
                theorems: cert.theorems,
                check_samples,
                scan,
            },
            warnings,
        })
    }

    /// The file this problem was loaded from, up to formatting. Every number
    /// is written out in full.
    pub fn to_file(&self) -> FileConfig {
        let g = self.spec.geometry;
        let cond = |c: &NonlocalCondition| match c {
            NonlocalCondition::Integral(i) => ConditionSection::Integral {
                inner: i.inner.source().to_string(),
                outer: i.outer.source().to_string(),
                p: i.bounds.p.into(),
                q: i.bounds.q.into(),
                big_p: i.bounds.big_p.into(),
                big_q: i.bounds.big_q.into(),
            },
            NonlocalCondition::Multipoint(m) => ConditionSection::Multipoint {
                weights: m.weights.iter().map(|w| Number::Value(*w)).collect(),
                times: m.times.iter().map(|t| Number::Value(*t)).collect(),
            },
        };
        let d = self.spec.discretization;
        let s = self.solver;
        FileConfig {
            domain: Some(DomainSection {
                length: g.length.into(),
                d_lo: g.d_lo.into(),
                d_hi: g.d_hi.into(),
                t0: Some(g.t0.into()),
                t1: Some(g.t1.into()),
                tmax: g.tmax.into(),
            }),
            nonlinearity: Some(NonlinearitySection {
                f: self.spec.f.source().to_string(),
                g: self.spec.g.source().to_string(),
            }),
            nonlocal: Some(NonlocalSection {
                alpha: Some(cond(&self.spec.alpha)),
                beta: Some(cond(&self.spec.beta)),
            }),
            discretization: Some(DiscretizationSection {
                nx: Some(d.nx),
                nt: Some(d.nt),
                modes: Some(d.modes),
            }),
            constants: Some(ConstantsSection {
                modes: self.constants.modes,
                t_gibbs: Some(self.constants.t_gibbs),
                rel_tol: Some(self.constants.rel_tol),
                max_levels: Some(self.constants.max_levels),
            }),
            radii: self.radii.as_ref().map(|r| RadiiSection {
                r: r.r.into(),
                big_r: r.big_r.into(),
                rho: r.rho.map(Into::into),
                varrho: r.varrho.map(Into::into),
                rho_tilde: r.rho_tilde.map(Into::into),
                r_tilde: r.r_tilde.map(Into::into),
                nested: r
                    .nested
                    .iter()
                    .map(|(a, b)| NestedPair {
                        r: (*a).into(),
                        big_r: (*b).into(),
                    })
                    .collect(),
            }),
            solver: Some(SolverSection {
                relaxation: Some(s.relaxation),
                max_iters: Some(s.max_iters),
                tol: Some(s.tol),
                divergence_cap: Some(s.divergence_cap),
                random_seeds: Some(s.random_seeds),
                rng_seed: Some(s.rng_seed),
                harnack_tol: Some(s.harnack_tol),
                cone_tol: Some(s.cone_tol),
            }),
            certificate: Some(CertificateSection {
                theorems: self.theorems.clone(),
                margin: Some(self.certificate.margin),
                density: Some(self.certificate.density),
                lipschitz_f: self.certificate.lipschitz_f,
                lipschitz_g: self.certificate.lipschitz_g,
                check_samples: Some(self.check_samples),
                overrides: self.certificate.overrides.clone(),
            }),
            scan: self.scan.map(|s| ScanSection {
                b_min: s.b_min.into(),
                b_max: s.b_max.into(),
                steps: s.steps,
            }),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("problem files serialize")
    }

    /// The certificates to run: the configured list, or those the radii
    /// support.
    pub fn selected_theorems(&self) -> Vec<Theorem> {
        if let Some(t) = &self.theorems {
            return t.clone();
        }
        let Some(r) = &self.radii else {
            return Vec::new();
        };
        let mut out = vec![Theorem::Existence, Theorem::OrExistence];
        if r.rho.is_some() {
            out.push(Theorem::ThreeSolutions);
            out.push(Theorem::ThreeSolutionsStrengthened);
        }
        if !r.nested.is_empty() {
            out.push(Theorem::NestedScan);
        }
        out.push(Theorem::Nonexistence);
        out
    }

    pub fn scan_config(&self) -> ScanConfig {
        self.scan
            .unwrap_or_else(|| ScanConfig::default_for(self.spec.geometry.length))
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_toml())
    }
}

/// Largest radii any certificate will sample at.
fn sample_reach(r: &RadiiConfig) -> (f64, f64) {
    let mut reach = r.big_r;
    for (_, big) in &r.nested {
        reach = (reach.0.max(big.0), reach.1.max(big.1));
    }
    reach
}

fn sample_checks(
    spec: &ProblemSpec,
    reach: (f64, f64),
    samples: usize,
    errors: &mut Vec<String>,
    warnings: &mut Vec<String>,
) {
    let geom = &spec.geometry;
    for (c, cond) in [(Component::U, &spec.alpha), (Component::V, &spec.beta)] {
        if let NonlocalCondition::Integral(ic) = cond {
            if let Err(e) = check_growth_bounds(c, ic, reach, geom.tmax, samples) {
                errors.push(format!("growth bound violated: {e}"));
            }
        }
    }
    let coarse = samples.min(8);
    for (role, e) in [("f", &spec.f), ("g", &spec.g)] {
        match check_nonnegative(role, e, geom, reach, coarse) {
            Ok(Some(p)) => errors.push(format!(
                "{role} is negative at t={}, x={}, u={}, v={}",
                p.t, p.x, p.u, p.v
            )),
            Ok(None) => {}
            Err(e) => errors.push(e.to_string()),
        }
        match boundary_violations(role, e, geom, samples) {
            Ok(v) if !v.is_empty() => warnings.push(format!(
                "{role}(t, x, 0, 0) is nonzero at {} boundary samples, first at t={}, x={}",
                v.len(),
                v[0].t,
                v[0].x
            )),
            Ok(_) => {}
            Err(e) => errors.push(e.to_string()),
        }
    }
}
