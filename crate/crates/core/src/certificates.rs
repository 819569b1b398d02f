//! Sampled bounds of the reaction terms over the boxes of the existence,
//! multiplicity and non-existence theorems, and certificates that evaluate
//! each theorem's hypotheses.
//!
//! All boxes of one estimation share per-axis sample sets (the union of a
//! uniform grid on every registered interval), so an estimate over a
//! sub-box always sees a subset of the points of its super-box. Sup-type
//! estimates from samples are lower bounds of the true supremum, and
//! inf-type estimates upper bounds of the infimum; such certificates are
//! reported as approximate.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::constants::{nonexistence_constants, ConstantsBundle, GrowthBounds};
use crate::expr::{Expression, Point, Var};
use crate::operators::{eval_at, OperatorError, ProblemSpec};
use crate::spectral::DomainGeometry;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error("radii: {0}")]
    Radii(String),
    #[error("certificates need integral-kind nonlocal conditions")]
    NotIntegral,
    #[error("bound `{0}` was not estimated")]
    MissingBound(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

type Pair = (f64, f64);

/// Radii of the localization theorems. Optional entries enable the
/// three-solution test and its refinements, the `or` variant and the
/// nested scan.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadiiConfig {
    pub r: Pair,
    pub big_r: Pair,
    pub rho: Option<Pair>,
    pub varrho: Option<Pair>,
    pub rho_tilde: Option<Pair>,
    pub r_tilde: Option<Pair>,
    pub nested: Vec<(Pair, Pair)>,
}

fn positive(p: Pair) -> bool {
    p.0 > 0.0 && p.1 > 0.0 && p.0.is_finite() && p.1.is_finite()
}

fn below(a: Pair, b: Pair) -> bool {
    a.0 < b.0 && a.1 < b.1
}

fn at_most(a: Pair, b: Pair) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}

impl RadiiConfig {
    pub fn existence(r: Pair, big_r: Pair) -> Self {
        RadiiConfig {
            r,
            big_r,
            ..RadiiConfig::default()
        }
    }

    /// All ordering problems, not just the first.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if !positive(self.r) || !below(self.r, self.big_r) {
            errs.push(format!("need 0 < r < R, got r={:?}, R={:?}", self.r, self.big_r));
        }
        if let Some(rho) = self.rho {
            if !positive(rho) || !below(rho, self.r) {
                errs.push(format!("need 0 < rho < r, got rho={rho:?}, r={:?}", self.r));
            }
        }
        match (self.varrho, self.rho) {
            (Some(vr), Some(rho)) => {
                if !positive(vr) || !below(vr, rho) {
                    errs.push(format!("need 0 < varrho < rho, got varrho={vr:?}, rho={rho:?}"));
                }
            }
            (Some(_), None) => errs.push("varrho needs rho".to_string()),
            _ => {}
        }
        match (self.rho_tilde, self.rho) {
            (Some(rt), Some(rho)) => {
                if !positive(rt) || !at_most(rt, rho) {
                    errs.push(format!("need 0 < rho_tilde <= rho, got {rt:?}"));
                }
            }
            (Some(_), None) => errs.push("rho_tilde needs rho".to_string()),
            _ => {}
        }
        if let Some(rt) = self.r_tilde {
            if !positive(rt) || !at_most(rt, self.big_r) {
                errs.push(format!("need 0 < R_tilde <= R, got {rt:?}"));
            }
        }
        if let Err(e) = validate_nesting(&self.nested) {
            errs.push(e);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    pub fn r_tilde_or_big_r(&self) -> Pair {
        self.r_tilde.unwrap_or(self.big_r)
    }
}

/// Each pair `0 < r^j < R^j` and `R^j < r^{j+1}` componentwise.
pub fn validate_nesting(pairs: &[(Pair, Pair)]) -> Result<(), String> {
    for (j, (r, big_r)) in pairs.iter().enumerate() {
        if !positive(*r) || !below(*r, *big_r) {
            return Err(format!("nested pair {}: need 0 < r < R", j + 1));
        }
        if let Some((next_r, _)) = pairs.get(j + 1) {
            if !below(*big_r, *next_r) {
                return Err(format!(
                    "nested pairs {} and {} overlap: need R^{} < r^{}",
                    j + 1,
                    j + 2,
                    j + 1,
                    j + 2
                ));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundMethod {
    GridSample,
    /// Grid value widened by `Lipschitz·h/2`.
    LipschitzSlack,
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundEstimate {
    pub value: f64,
    pub method: BoundMethod,
    /// Uniform intervals per registered axis range at the reported level.
    pub density: usize,
    /// `|value - value at half density|`, plus a rounding floor.
    pub delta: f64,
    /// Where the extremum was sampled, as `(t, x, u, v)`.
    pub at: Option<[f64; 4]>,
}

impl BoundEstimate {
    pub fn user(value: f64) -> Self {
        BoundEstimate {
            value,
            method: BoundMethod::UserSupplied,
            density: 0,
            delta: 0.0,
            at: None,
        }
    }

    pub fn rigorous(&self) -> bool {
        self.method != BoundMethod::GridSample
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Extreme {
    Sup,
    Inf,
}

/// `[t] × [x] × [u] × [v]` ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleBox {
    pub t: Pair,
    pub x: Pair,
    pub u: Pair,
    pub v: Pair,
}

impl SampleBox {
    fn axis(&self, i: usize) -> Pair {
        [self.t, self.x, self.u, self.v][i]
    }
}

fn axis_points(ranges: &[Pair], intervals: usize) -> Vec<f64> {
    let mut pts = Vec::new();
    for &(a, b) in ranges {
        for i in 0..=intervals {
            pts.push(if i == intervals {
                b
            } else {
                a + (b - a) * i as f64 / intervals as f64
            });
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Shared sample sets for a family of boxes.
#[derive(Debug, Clone)]
pub struct BoxSampler {
    ranges: [Vec<Pair>; 4],
}

impl BoxSampler {
    pub fn new(boxes: &[SampleBox]) -> Self {
        let mut ranges: [Vec<Pair>; 4] = Default::default();
        for b in boxes {
            for (i, r) in ranges.iter_mut().enumerate() {
                let a = b.axis(i);
                if !r.contains(&a) {
                    r.push(a);
                }
            }
        }
        BoxSampler { ranges }
    }

    fn points(&self, b: &SampleBox, axis: usize, intervals: usize, used: bool) -> Vec<f64> {
        let (lo, hi) = b.axis(axis);
        if !used {
            return alloc::vec![lo];
        }
        let mut ranges = self.ranges[axis].clone();
        if !ranges.contains(&(lo, hi)) {
            ranges.push((lo, hi));
        }
        axis_points(&ranges, intervals)
            .into_iter()
            .filter(|p| *p >= lo && *p <= hi)
            .collect()
    }

    /// Extremum of `e / divisor` over the sample points of `b`, with
    /// `intervals` uniform steps per registered range. Returns the value,
    /// the arg-extremum and the largest gap between neighbouring samples
    /// along the variables `e` depends on.
    fn extremum(
        &self,
        role: &str,
        e: &Expression,
        b: &SampleBox,
        ext: Extreme,
        intervals: usize,
    ) -> Result<(f64, [f64; 4], f64), OperatorError> {
        let vars = e.variables();
        let used = [Var::T, Var::X, Var::U, Var::V].map(|v| vars.contains(v));
        let axes: [Vec<f64>; 4] = core::array::from_fn(|i| self.points(b, i, intervals, used[i]));
        let mut gap = 0.0f64;
        for (i, pts) in axes.iter().enumerate() {
            if used[i] {
                for w in pts.windows(2) {
                    gap = gap.max(w[1] - w[0]);
                }
            }
        }
        let mut best = match ext {
            Extreme::Sup => f64::NEG_INFINITY,
            Extreme::Inf => f64::INFINITY,
        };
        let mut at = [0.0; 4];
        for &t in &axes[0] {
            for &x in &axes[1] {
                for &u in &axes[2] {
                    for &v in &axes[3] {
                        let val = eval_at(role, e, Point::new(t, x, u, v))?;
                        let better = match ext {
                            Extreme::Sup => val > best,
                            Extreme::Inf => val < best,
                        };
                        if better {
                            best = val;
                            at = [t, x, u, v];
                        }
                    }
                }
            }
        }
        Ok((best, at, gap))
    }

    /// Grid estimate of `ext e / divisor` over `b` at `density` intervals,
    /// with the change from `density / 2` as `delta`. A Lipschitz constant
    /// (in the max norm of `(t, x, u, v)`) widens the value by `L·h/2`.
    pub fn estimate(
        &self,
        role: &str,
        e: &Expression,
        b: &SampleBox,
        ext: Extreme,
        divisor: f64,
        density: usize,
        lipschitz: Option<f64>,
    ) -> Result<BoundEstimate, OperatorError> {
        let density = density.max(2) & !1;
        let (coarse, _, _) = self.extremum(role, e, b, ext, density / 2)?;
        let (fine, at, gap) = self.extremum(role, e, b, ext, density)?;
        let rounding = 1e-12 * (1.0 + fine.abs());
        let (value, method) = match lipschitz {
            Some(lip) => {
                let widen = lip * gap / 2.0;
                let v = match ext {
                    Extreme::Sup => fine + widen,
                    Extreme::Inf => fine - widen,
                };
                (v, BoundMethod::LipschitzSlack)
            }
            None => (fine, BoundMethod::GridSample),
        };
        Ok(BoundEstimate {
            value: value / divisor,
            method,
            density,
            delta: ((fine - coarse).abs() + rounding) / divisor,
            at: Some(at),
        })
    }
}

/// Sampling controls and certificate tolerances.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateConfig {
    /// Strict inequalities must hold by more than this.
    pub margin: f64,
    /// Sample intervals per registered axis range (even).
    pub density: usize,
    pub lipschitz_f: Option<f64>,
    pub lipschitz_g: Option<f64>,
    /// Closed-form values replacing sampled bounds, keyed by bound name.
    pub overrides: BTreeMap<String, f64>,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig {
            margin: 1e-9,
            density: 32,
            lipschitz_f: None,
            lipschitz_g: None,
            overrides: BTreeMap::new(),
        }
    }
}

/// Names of the estimated quantities. `f`/`g` prefix, then the kind.
pub mod names {
    pub const F_SUP_R: &str = "f_sup_R";
    pub const G_SUP_R: &str = "g_sup_R";
    pub const F_INF_R: &str = "f_inf_rR";
    pub const G_INF_R: &str = "g_inf_rR";
    pub const F0_INF_R: &str = "f0_inf_rR";
    pub const G0_INF_R: &str = "g0_inf_rR";
    pub const F00_INF_R: &str = "f00_inf_rRt";
    pub const G00_INF_R: &str = "g00_inf_rRt";
    pub const F_SUP_RHO: &str = "f_sup_rho";
    pub const G_SUP_RHO: &str = "g_sup_rho";
    pub const F_INF_RHO: &str = "f_inf_varrho_rho";
    pub const G_INF_RHO: &str = "g_inf_varrho_rho";
    pub const F00_INF_RHO: &str = "f00_inf_varrho_rhot";
    pub const G00_INF_RHO: &str = "g00_inf_varrho_rhot";

    pub const ALL: [&str; 14] = [
        F_SUP_R, G_SUP_R, F_INF_R, G_INF_R, F0_INF_R, G0_INF_R, F00_INF_R, G00_INF_R, F_SUP_RHO,
        G_SUP_RHO, F_INF_RHO, G_INF_RHO, F00_INF_RHO, G00_INF_RHO,
    ];
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NamedBound {
    pub name: String,
    pub extreme: Extreme,
    pub sample_box: Option<SampleBox>,
    pub divisor: f64,
    pub estimate: BoundEstimate,
}

/// Estimated bounds keyed by name.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundTable {
    pub entries: Vec<NamedBound>,
}

impl BoundTable {
    pub fn get(&self, name: &str) -> Option<&NamedBound> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn value(&self, name: &str) -> Result<f64, CertificateError> {
        self.get(name)
            .map(|e| e.estimate.value)
            .ok_or_else(|| CertificateError::MissingBound(name.to_string()))
    }

    /// Table of user-supplied values only.
    pub fn from_values(values: &[(&str, f64)]) -> Self {
        BoundTable {
            entries: values
                .iter()
                .map(|(n, v)| NamedBound {
                    name: n.to_string(),
                    extreme: if n.contains("sup") { Extreme::Sup } else { Extreme::Inf },
                    sample_box: None,
                    divisor: 1.0,
                    estimate: BoundEstimate::user(*v),
                })
                .collect(),
        }
    }

    fn rigorous(&self, names: &[&str]) -> bool {
        names
            .iter()
            .all(|n| self.get(n).map(|b| b.estimate.rigorous()).unwrap_or(false))
    }
}

struct Request {
    name: &'static str,
    f_side: bool,
    extreme: Extreme,
    sample_box: SampleBox,
    divisor: f64,
}

/// Every bound the configured radii call for, over the boxes of their
/// defining suprema and infima. `m` is the Harnack constant.
pub fn estimate_bounds(
    spec: &ProblemSpec,
    radii: &RadiiConfig,
    m: f64,
    cfg: &CertificateConfig,
) -> Result<BoundTable, CertificateError> {
    estimate_bounds_for(spec, radii, radii.r, radii.big_r, m, cfg)
}

fn estimate_bounds_for(
    spec: &ProblemSpec,
    radii: &RadiiConfig,
    r: Pair,
    big_r: Pair,
    m: f64,
    cfg: &CertificateConfig,
) -> Result<BoundTable, CertificateError> {
    use names::*;
    let g = &spec.geometry;
    let full = |u: Pair, v: Pair| SampleBox {
        t: (0.0, g.tmax),
        x: (0.0, g.length),
        u,
        v,
    };
    let inner = |u: Pair, v: Pair| SampleBox {
        t: (g.t0, g.t1),
        x: (g.d_lo, g.d_hi),
        u,
        v,
    };
    let mut reqs = Vec::new();
    let mut push = |name, f_side, extreme, sample_box, divisor| {
        reqs.push(Request {
            name,
            f_side,
            extreme,
            sample_box,
            divisor,
        })
    };
    let (r1, r2) = r;
    let (big_r1, big_r2) = big_r;
    push(F_SUP_R, true, Extreme::Sup, full((0.0, big_r1), (0.0, big_r2)), big_r1);
    push(G_SUP_R, false, Extreme::Sup, full((0.0, big_r1), (0.0, big_r2)), big_r2);
    let corner = inner((m * r1, big_r1), (m * r2, big_r2));
    push(F_INF_R, true, Extreme::Inf, corner, r1);
    push(G_INF_R, false, Extreme::Inf, corner, r2);
    push(F0_INF_R, true, Extreme::Inf, inner((m * r1, big_r1), (0.0, big_r2)), r1);
    push(G0_INF_R, false, Extreme::Inf, inner((0.0, big_r1), (m * r2, big_r2)), r2);
    let rt = if big_r == radii.big_r {
        radii.r_tilde_or_big_r()
    } else {
        big_r
    };
    push(F00_INF_R, true, Extreme::Inf, inner((0.0, rt.0), (0.0, rt.1)), r1);
    push(G00_INF_R, false, Extreme::Inf, inner((0.0, rt.0), (0.0, rt.1)), r2);
    if let (Some(rho), true) = (radii.rho, big_r == radii.big_r) {
        push(F_SUP_RHO, true, Extreme::Sup, full((0.0, rho.0), (0.0, rho.1)), rho.0);
        push(G_SUP_RHO, false, Extreme::Sup, full((0.0, rho.0), (0.0, rho.1)), rho.1);
        if let Some(vr) = radii.varrho {
            let lower = inner((m * vr.0, rho.0), (m * vr.1, rho.1));
            push(F_INF_RHO, true, Extreme::Inf, lower, vr.0);
            push(G_INF_RHO, false, Extreme::Inf, lower, vr.1);
            let rt = radii.rho_tilde.unwrap_or(rho);
            push(F00_INF_RHO, true, Extreme::Inf, inner((0.0, rt.0), (0.0, rt.1)), vr.0);
            push(G00_INF_RHO, false, Extreme::Inf, inner((0.0, rt.0), (0.0, rt.1)), vr.1);
        }
    }
    let boxes: Vec<SampleBox> = reqs.iter().map(|q| q.sample_box).collect();
    let sampler = BoxSampler::new(&boxes);
    let mut entries = Vec::with_capacity(reqs.len());
    for q in reqs {
        let estimate = match cfg.overrides.get(q.name) {
            Some(v) => BoundEstimate::user(*v),
            None => {
                let (role, e, lip) = if q.f_side {
                    ("f", &spec.f, cfg.lipschitz_f)
                } else {
                    ("g", &spec.g, cfg.lipschitz_g)
                };
                sampler.estimate(role, e, &q.sample_box, q.extreme, q.divisor, cfg.density, lip)?
            }
        };
        entries.push(NamedBound {
            name: q.name.to_string(),
            extreme: q.extreme,
            sample_box: Some(q.sample_box),
            divisor: q.divisor,
            estimate,
        });
    }
    Ok(BoundTable { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Relation {
    #[cfg_attr(feature = "serde", serde(rename = "<="))]
    Le,
    #[cfg_attr(feature = "serde", serde(rename = "<"))]
    Lt,
    #[cfg_attr(feature = "serde", serde(rename = ">="))]
    Ge,
    #[cfg_attr(feature = "serde", serde(rename = ">"))]
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// One evaluated inequality `lhs relation rhs`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Inequality {
    pub label: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    /// Positive when the inequality holds with room to spare.
    pub slack: f64,
    pub holds: bool,
    /// `|slack| ≤ margin`.
    pub boundary: bool,
    pub bounds_used: Vec<String>,
}

impl Inequality {
    pub fn new(label: &str, lhs: f64, relation: Relation, rhs: f64, margin: f64, bounds_used: &[&str]) -> Self {
        let slack = match relation {
            Relation::Le | Relation::Lt => rhs - lhs,
            Relation::Ge | Relation::Gt => lhs - rhs,
        };
        let holds = match relation {
            Relation::Le | Relation::Ge => slack >= 0.0,
            Relation::Lt | Relation::Gt => slack > margin,
        };
        Inequality {
            label: label.to_string(),
            lhs,
            relation,
            rhs,
            slack,
            holds,
            boundary: slack.abs() <= margin,
            bounds_used: bounds_used.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Combine {
    All,
    Any,
}

/// A named group of inequalities; `required` groups decide the certificate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Condition {
    pub name: String,
    pub combine: Combine,
    pub required: bool,
    pub holds: bool,
    pub inequalities: Vec<Inequality>,
}

impl Condition {
    fn new(name: &str, combine: Combine, required: bool, inequalities: Vec<Inequality>) -> Self {
        let holds = match combine {
            Combine::All => inequalities.iter().all(|i| i.holds),
            Combine::Any => inequalities.iter().any(|i| i.holds),
        };
        Condition {
            name: name.to_string(),
            combine,
            required,
            holds,
            inequalities,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Theorem {
    Existence,
    OrExistence,
    ThreeSolutions,
    ThreeSolutionsStrengthened,
    Nonexistence,
    NestedScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Rigor {
    Rigorous,
    Approximate,
}

/// A conclusion the theorem asserts once its required conditions hold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Conclusion {
    pub code: String,
    pub statement: String,
}

fn conclusion(code: &str, statement: String) -> Conclusion {
    Conclusion {
        code: code.to_string(),
        statement,
    }
}

/// Existence with `|u| ≤ R1, |v| ≤ R2, ⌊u⌋ > r1, ⌊v⌋ > r2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssertedBox {
    pub r: Pair,
    pub big_r: Pair,
}

impl AssertedBox {
    pub fn contains(&self, norm: Pair, floor: Pair) -> bool {
        norm.0 <= self.big_r.0 && norm.1 <= self.big_r.1 && floor.0 > self.r.0 && floor.1 > self.r.1
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateReport {
    pub theorem: Theorem,
    pub holds: bool,
    pub rigor: Rigor,
    pub margin: f64,
    pub conditions: Vec<Condition>,
    /// Present only when `holds`.
    pub conclusions: Vec<Conclusion>,
    /// Boxes in which solutions are asserted, when the theorem gives one.
    pub asserted: Vec<AssertedBox>,
    pub bounds: Vec<NamedBound>,
    pub notes: Vec<String>,
}

impl CertificateReport {
    fn assemble(
        theorem: Theorem,
        conditions: Vec<Condition>,
        table: &BoundTable,
        used: &[&str],
        margin: f64,
    ) -> Self {
        let holds = conditions.iter().filter(|c| c.required).all(|c| c.holds);
        let rigor = if table.rigorous(used) {
            Rigor::Rigorous
        } else {
            Rigor::Approximate
        };
        let bounds = used.iter().filter_map(|n| table.get(n).cloned()).collect();
        CertificateReport {
            theorem,
            holds,
            rigor,
            margin,
            conditions,
            conclusions: Vec::new(),
            asserted: Vec::new(),
            bounds,
            notes: Vec::new(),
        }
    }

    /// A certificate refused before evaluation, e.g. after a failed growth
    /// check.
    pub fn refused(theorem: Theorem, reason: String) -> Self {
        CertificateReport {
            theorem,
            holds: false,
            rigor: Rigor::Approximate,
            margin: 0.0,
            conditions: Vec::new(),
            conclusions: Vec::new(),
            asserted: Vec::new(),
            bounds: Vec::new(),
            notes: alloc::vec![reason],
        }
    }

    pub fn has_conclusion(&self, code: &str) -> bool {
        self.conclusions.iter().any(|c| c.code == code)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Constants, growth bounds and margin shared by the certificate checks.
#[derive(Debug, Clone, Copy)]
pub struct Context<'a> {
    pub consts: &'a ConstantsBundle,
    pub alpha: GrowthBounds,
    pub beta: GrowthBounds,
    pub margin: f64,
}

impl<'a> Context<'a> {
    pub fn new(spec: &ProblemSpec, consts: &'a ConstantsBundle, margin: f64) -> Result<Self, CertificateError> {
        let (alpha, beta) = spec.integral_bounds().ok_or(CertificateError::NotIntegral)?;
        Ok(Context {
            consts,
            alpha,
            beta,
            margin,
        })
    }

    /// `qQ·C1 + s·(qQ·C2 + C1) ≤ 1`.
    fn sup_condition(&self, label: &str, gb: &GrowthBounds, sup: f64, name: &str, strict: bool) -> Inequality {
        let c = self.consts;
        let qq = gb.upper();
        let lhs = qq * c.cap_c1 + sup * (qq * c.cap_c2 + c.cap_c1);
        let rel = if strict { Relation::Lt } else { Relation::Le };
        Inequality::new(label, lhs, rel, 1.0, self.margin, &[name])
    }

    /// `pP·(c1 + s·c2) > 1`.
    fn inf_condition(&self, label: &str, gb: &GrowthBounds, inf: f64, name: &str) -> Inequality {
        let c = self.consts;
        let lhs = gb.lower() * (c.c1 + inf * c.c2);
        Inequality::new(label, lhs, Relation::Gt, 1.0, self.margin, &[name])
    }

    /// `s ≥ (pP·c2)^{-1}`.
    fn or_condition(&self, label: &str, gb: &GrowthBounds, inf: f64, name: &str) -> Inequality {
        let rhs = 1.0 / (gb.lower() * self.consts.c2);
        Inequality::new(label, inf, Relation::Ge, rhs, self.margin, &[name])
    }

    fn sup_pair(&self, table: &BoundTable, names: (&str, &str), strict: bool) -> Result<Vec<Inequality>, CertificateError> {
        Ok(alloc::vec![
            self.sup_condition("u", &self.alpha, table.value(names.0)?, names.0, strict),
            self.sup_condition("v", &self.beta, table.value(names.1)?, names.1, strict),
        ])
    }

    fn inf_pair(&self, table: &BoundTable, names: (&str, &str)) -> Result<Vec<Inequality>, CertificateError> {
        Ok(alloc::vec![
            self.inf_condition("u", &self.alpha, table.value(names.0)?, names.0),
            self.inf_condition("v", &self.beta, table.value(names.1)?, names.1),
        ])
    }
}

fn fmt_pair(p: Pair) -> String {
    format!("({}, {})", p.0, p.1)
}

/// Upper bounds `(q Q C1 + f^R(q Q C2 + C1) ≤ 1)` and lower bounds
/// `(p P (c1 + f_{r,R} c2) > 1)`; asserts a solution with
/// `|u| ≤ R1, |v| ≤ R2, ⌊u⌋ > r1, ⌊v⌋ > r2`.
pub fn certify_existence(
    ctx: &Context,
    table: &BoundTable,
    r: Pair,
    big_r: Pair,
) -> Result<CertificateReport, CertificateError> {
    use names::*;
    let conditions = alloc::vec![
        Condition::new("upper", Combine::All, true, ctx.sup_pair(table, (F_SUP_R, G_SUP_R), false)?),
        Condition::new("lower", Combine::All, true, ctx.inf_pair(table, (F_INF_R, G_INF_R))?),
    ];
    let used = [F_SUP_R, G_SUP_R, F_INF_R, G_INF_R];
    let mut rep = CertificateReport::assemble(Theorem::Existence, conditions, table, &used, ctx.margin);
    if rep.holds {
        rep.conclusions.push(conclusion(
            "solution_in_box",
            format!(
                "a nonnegative solution exists with |u| <= {}, |v| <= {}, floor(u) > {}, floor(v) > {}",
                big_r.0, big_r.1, r.0, r.1
            ),
        ));
        rep.asserted.push(AssertedBox { r, big_r });
    }
    Ok(rep)
}

/// Upper bounds plus `f⁰⁰_{r,R̃} ≥ (pP c2)^{-1}` or the same for `g`.
pub fn certify_or_existence(
    ctx: &Context,
    table: &BoundTable,
    radii: &RadiiConfig,
) -> Result<CertificateReport, CertificateError> {
    use names::*;
    let or = alloc::vec![
        ctx.or_condition("u", &ctx.alpha, table.value(F00_INF_R)?, F00_INF_R),
        ctx.or_condition("v", &ctx.beta, table.value(G00_INF_R)?, G00_INF_R),
    ];
    let conditions = alloc::vec![
        Condition::new("upper", Combine::All, true, ctx.sup_pair(table, (F_SUP_R, G_SUP_R), false)?),
        Condition::new("lower_or", Combine::Any, true, or),
    ];
    let used = [F_SUP_R, G_SUP_R, F00_INF_R, G00_INF_R];
    let mut rep = CertificateReport::assemble(Theorem::OrExistence, conditions, table, &used, ctx.margin);
    if rep.holds {
        let (r, big_r, rt) = (radii.r, radii.big_r, radii.r_tilde_or_big_r());
        let statement = if rt == big_r {
            format!(
                "a nontrivial nonnegative solution exists with |u| <= {}, |v| <= {} and (floor(u) >= {} or floor(v) >= {})",
                big_r.0, big_r.1, r.0, r.1
            )
        } else {
            format!(
                "a nontrivial nonnegative solution exists with |u| <= {}, |v| <= {} and (floor(u) >= {} or floor(v) >= {} or |u| > {} or |v| > {})",
                big_r.0, big_r.1, r.0, r.1, rt.0, rt.1
            )
        };
        rep.conclusions.push(conclusion("nontrivial_solution", statement));
    }
    Ok(rep)
}

/// Upper bounds at `R` and at `ρ`, lower bounds at `(r, R)` (with `f⁰`
/// when `strengthened`), and the optional refinements on `ϱ`.
pub fn certify_three_solutions(
    ctx: &Context,
    table: &BoundTable,
    radii: &RadiiConfig,
    strengthened: bool,
) -> Result<CertificateReport, CertificateError> {
    use names::*;
    let rho = radii
        .rho
        .ok_or_else(|| CertificateError::Radii("three-solution test needs rho".to_string()))?;
    let lower_names = if strengthened {
        (F0_INF_R, G0_INF_R)
    } else {
        (F_INF_R, G_INF_R)
    };
    let mut conditions = alloc::vec![
        Condition::new("upper_R", Combine::All, true, ctx.sup_pair(table, (F_SUP_R, G_SUP_R), false)?),
        Condition::new("upper_rho", Combine::All, true, ctx.sup_pair(table, (F_SUP_RHO, G_SUP_RHO), false)?),
        Condition::new("lower", Combine::All, true, ctx.inf_pair(table, lower_names)?),
    ];
    let mut used = alloc::vec![F_SUP_R, G_SUP_R, F_SUP_RHO, G_SUP_RHO, lower_names.0, lower_names.1];
    let refine = radii.varrho.is_some() && table.get(F_INF_RHO).is_some();
    if refine {
        conditions.push(Condition::new(
            "refinement_i",
            Combine::All,
            false,
            ctx.inf_pair(table, (F_INF_RHO, G_INF_RHO))?,
        ));
        conditions.push(Condition::new(
            "refinement_ii",
            Combine::Any,
            false,
            alloc::vec![
                ctx.or_condition("u", &ctx.alpha, table.value(F00_INF_RHO)?, F00_INF_RHO),
                ctx.or_condition("v", &ctx.beta, table.value(G00_INF_RHO)?, G00_INF_RHO),
            ],
        ));
        used.extend([F_INF_RHO, G_INF_RHO, F00_INF_RHO, G00_INF_RHO]);
    }
    let theorem = if strengthened {
        Theorem::ThreeSolutionsStrengthened
    } else {
        Theorem::ThreeSolutions
    };
    let mut rep = CertificateReport::assemble(theorem, conditions, table, &used, ctx.margin);
    if rep.holds {
        let r = radii.r;
        rep.conclusions.push(conclusion(
            "solution_1",
            format!("|u1| < {}, |v1| < {} (possibly the zero solution)", rho.0, rho.1),
        ));
        let floors = if strengthened {
            format!("floor(u2) < {} and floor(v2) < {}", r.0, r.1)
        } else {
            format!("floor(u2) < {} or floor(v2) < {}", r.0, r.1)
        };
        rep.conclusions.push(conclusion(
            "solution_2",
            format!("{floors}; |u2| > {} or |v2| > {}", rho.0, rho.1),
        ));
        rep.conclusions.push(conclusion(
            "solution_3",
            format!("floor(u3) > {}, floor(v3) > {} (both components nonzero)", r.0, r.1),
        ));
        if let Some(vr) = radii.varrho {
            if rep.condition("refinement_i").map(|c| c.holds).unwrap_or(false) {
                rep.conclusions.push(conclusion(
                    "solution_1_floor",
                    format!("floor(u1) >= {} and floor(v1) >= {}", vr.0, vr.1),
                ));
            }
            if rep.condition("refinement_ii").map(|c| c.holds).unwrap_or(false) {
                let rt = radii.rho_tilde.unwrap_or(rho);
                rep.conclusions.push(conclusion(
                    "solution_1_or",
                    format!(
                        "floor(u1) >= {} or floor(v1) >= {} or |u1| > {} or |v1| > {}",
                        vr.0, vr.1, rt.0, rt.1
                    ),
                ));
            }
        }
    }
    Ok(rep)
}

/// Runs the existence test on every pair of a nested family; all passing
/// gives `n` solutions, and strict upper bounds add `n - 1` more between
/// consecutive pairs.
pub fn scan_nested_radii(
    ctx: &Context,
    pairs: &[(Pair, Pair)],
    tables: &[BoundTable],
) -> Result<(CertificateReport, Vec<CertificateReport>), CertificateError> {
    use names::*;
    validate_nesting(pairs).map_err(CertificateError::Radii)?;
    if pairs.is_empty() || pairs.len() != tables.len() {
        return Err(CertificateError::Radii("one bound table per nested pair".to_string()));
    }
    let mut per_pair = Vec::new();
    let mut conditions = Vec::new();
    let mut strict = Vec::new();
    for (j, ((r, big_r), table)) in pairs.iter().zip(tables).enumerate() {
        let rep = certify_existence(ctx, table, *r, *big_r)?;
        conditions.push(Condition::new(
            &format!("pair_{}", j + 1),
            Combine::All,
            true,
            rep.conditions.iter().flat_map(|c| c.inequalities.clone()).collect(),
        ));
        strict.push(Condition::new(
            &format!("strict_upper_{}", j + 1),
            Combine::All,
            false,
            ctx.sup_pair(table, (F_SUP_R, G_SUP_R), true)?,
        ));
        per_pair.push(rep);
    }
    let all_strict = strict.iter().all(|c| c.holds);
    conditions.extend(strict);
    let rigorous = per_pair.iter().all(|r| r.rigor == Rigor::Rigorous);
    let holds = per_pair.iter().all(|r| r.holds);
    let mut rep = CertificateReport {
        theorem: Theorem::NestedScan,
        holds,
        rigor: if rigorous { Rigor::Rigorous } else { Rigor::Approximate },
        margin: ctx.margin,
        conditions,
        conclusions: Vec::new(),
        asserted: Vec::new(),
        bounds: Vec::new(),
        notes: Vec::new(),
    };
    if holds {
        let n = pairs.len();
        rep.conclusions.push(conclusion(
            "nontrivial_solutions",
            format!("at least {n} nontrivial solutions"),
        ));
        for (j, (r, big_r)) in pairs.iter().enumerate() {
            rep.conclusions.push(conclusion(
                &format!("solution_{}", j + 1),
                format!(
                    "|u| <= {}, |v| <= {}, floor(u) > {}, floor(v) > {}",
                    big_r.0, big_r.1, r.0, r.1
                ),
            ));
            rep.asserted.push(AssertedBox { r: *r, big_r: *big_r });
        }
        if all_strict && n > 1 {
            for j in 0..n - 1 {
                let (_, big_r) = pairs[j];
                let (r_next, big_r_next) = pairs[j + 1];
                rep.conclusions.push(conclusion(
                    &format!("intermediate_{}", j + 1),
                    format!(
                        "|u| < {}, |v| < {}; |u| > {} or |v| > {}; floor(u) < {} or floor(v) < {}",
                        big_r_next.0, big_r_next.1, big_r.0, big_r.1, r_next.0, r_next.1
                    ),
                ));
            }
        }
    }
    Ok((rep, per_pair))
}

/// Extremum of `e(t, x, u, v) / w` over sample points with `w > 0`, where
/// `w` is `u` or `v`.
fn ratio_extremum(
    role: &str,
    e: &Expression,
    b: &SampleBox,
    by_u: bool,
    ext: Extreme,
    density: usize,
) -> Result<(f64, [f64; 4]), OperatorError> {
    let vars = e.variables();
    let pts = |range: Pair, used: bool| -> Vec<f64> {
        if used {
            axis_points(&[range], density)
        } else {
            alloc::vec![range.0]
        }
    };
    let ts = pts(b.t, vars.contains(Var::T));
    let xs = pts(b.x, vars.contains(Var::X));
    let us = pts(b.u, true);
    let vs = pts(b.v, true);
    let mut best = match ext {
        Extreme::Sup => f64::NEG_INFINITY,
        Extreme::Inf => f64::INFINITY,
    };
    let mut at = [0.0; 4];
    for &t in &ts {
        for &x in &xs {
            for &u in &us {
                for &v in &vs {
                    let w = if by_u { u } else { v };
                    if w <= 0.0 {
                        continue;
                    }
                    let ratio = eval_at(role, e, Point::new(t, x, u, v))? / w;
                    let better = match ext {
                        Extreme::Sup => ratio > best,
                        Extreme::Inf => ratio < best,
                    };
                    if better {
                        best = ratio;
                        at = [t, x, u, v];
                    }
                }
            }
        }
    }
    Ok((best, at))
}

/// Non-existence slopes and sampled comparisons of `f/u` and `g/v` with
/// them over `[0, R1] × [0, R2]`.
pub fn certify_nonexistence(
    spec: &ProblemSpec,
    ctx: &Context,
    sample_box: Pair,
    density: usize,
) -> Result<CertificateReport, CertificateError> {
    let g: &DomainGeometry = &spec.geometry;
    let full = SampleBox {
        t: (0.0, g.tmax),
        x: (0.0, g.length),
        u: (0.0, sample_box.0),
        v: (0.0, sample_box.1),
    };
    let inner = SampleBox {
        t: (g.t0, g.t1),
        x: (g.d_lo, g.d_hi),
        ..full
    };
    let c = ctx.consts;
    let su = nonexistence_constants(c, &ctx.alpha, g.tmax);
    let sv = nonexistence_constants(c, &ctx.beta, g.tmax);
    let margin = ctx.margin;
    let mut conditions = Vec::new();
    let mut notes = Vec::new();
    for (name, role, e, by_u, slopes, gb) in [
        ("u", "f", &spec.f, true, su, ctx.alpha),
        ("v", "g", &spec.g, false, sv, ctx.beta),
    ] {
        let (sup, at_sup) = ratio_extremum(role, e, &full, by_u, Extreme::Sup, density)?;
        let (inf, at_inf) = ratio_extremum(role, e, &inner, by_u, Extreme::Inf, density)?;
        let label1 = format!("{role}/{name} < e_upper on [0,tmax] x Omega");
        let label2 = format!("{role}/{name} > e_lower on [t0,t1] x D");
        let label3 = "pP c1 > 1";
        let ineqs = alloc::vec![
            Inequality::new(&label1, sup, Relation::Lt, slopes.upper, margin, &[]),
            Inequality::new(&label2, inf, Relation::Gt, slopes.lower, margin, &[]),
            Inequality::new(label3, gb.lower() * c.c1, Relation::Gt, 1.0, margin, &[]),
        ];
        notes.push(format!(
            "{name}: sup {role}/{name} = {sup} at {at_sup:?}, inf {role}/{name} = {inf} at {at_inf:?}"
        ));
        conditions.push(Condition::new(&format!("{name}_vanishes"), Combine::Any, false, ineqs));
    }
    let u_zero = conditions[0].holds;
    let v_zero = conditions[1].holds;
    let mut rep = CertificateReport {
        theorem: Theorem::Nonexistence,
        holds: u_zero || v_zero,
        rigor: Rigor::Approximate,
        margin,
        conditions,
        conclusions: Vec::new(),
        asserted: Vec::new(),
        bounds: Vec::new(),
        notes,
    };
    if u_zero {
        rep.conclusions.push(conclusion("u_vanishes", "every nonnegative solution has u = 0".to_string()));
    }
    if v_zero {
        rep.conclusions.push(conclusion("v_vanishes", "every nonnegative solution has v = 0".to_string()));
    }
    if u_zero || v_zero {
        rep.conclusions.push(conclusion("no_positive", "there are no positive solutions".to_string()));
    }
    if u_zero && v_zero {
        rep.conclusions.push(conclusion(
            "no_nontrivial_nonnegative",
            "there are no nontrivial nonnegative solutions".to_string(),
        ));
    }
    Ok(rep)
}

/// Bound tables for each pair of a nested family.
pub fn nested_tables(
    spec: &ProblemSpec,
    radii: &RadiiConfig,
    m: f64,
    cfg: &CertificateConfig,
) -> Result<Vec<BoundTable>, CertificateError> {
    validate_nesting(&radii.nested).map_err(CertificateError::Radii)?;
    radii
        .nested
        .iter()
        .map(|(r, big_r)| estimate_bounds_for(spec, radii, *r, *big_r, m, cfg))
        .collect()
}

/// Human-readable ranges of a sample box.
pub fn describe_box(b: &SampleBox) -> String {
    format!(
        "t in {}, x in {}, u in {}, v in {}",
        fmt_pair(b.t),
        fmt_pair(b.x),
        fmt_pair(b.u),
        fmt_pair(b.v)
    )
}
