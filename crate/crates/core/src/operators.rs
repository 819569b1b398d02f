//! Problem description and the operators built from it: the Nemytskii maps,
//! the nonlocal initial-value maps `α, β`, the free evolution `S̄`, the
//! Duhamel integral `Ŝ`, and the fixed-point maps `M` and `N`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::constants::{ConstantsError, GrowthBounds};
use crate::expr::{EvalError, Expression, Point, Var};
use crate::field::{FieldError, Grid, SpaceTimeField, Subdomain};
use crate::spectral::{eigenvalue, DomainGeometry, GeometryError, SpectralError, Transform};

/// Which unknown a nonlocal condition prescribes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Component {
    U,
    V,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::U => "u",
            Component::V => "v",
        }
    }
}

/// `G(∫_0^{tmax} g(u(t), v(t)) dt)` with `p·w ≤ g ≤ q·w` in the prescribed
/// component `w` and `P·s ≤ G(s) ≤ Q·s`. `G` reads its argument from `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralCondition {
    pub inner: Expression,
    pub outer: Expression,
    pub bounds: GrowthBounds,
}

/// `Σ_s a_s w(t_s)`; an empty list is the zero map.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipointCondition {
    pub weights: Vec<f64>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NonlocalCondition {
    Integral(IntegralCondition),
    Multipoint(MultipointCondition),
}

impl NonlocalCondition {
    pub fn integral(inner: &str, outer: &str, bounds: GrowthBounds) -> Result<Self, SpecError> {
        let parse = |role: &str, src: &str| {
            Expression::parse(src).map_err(|e| SpecError::Parse {
                role: role.to_string(),
                message: e.to_string(),
            })
        };
        Ok(NonlocalCondition::Integral(IntegralCondition {
            inner: parse("inner", inner)?,
            outer: parse("outer", outer)?,
            bounds,
        }))
    }

    pub fn multipoint(weights: Vec<f64>, times: Vec<f64>) -> Self {
        NonlocalCondition::Multipoint(MultipointCondition { weights, times })
    }

    /// `w(0) = 0` whatever the trajectory.
    pub fn zero() -> Self {
        NonlocalCondition::multipoint(Vec::new(), Vec::new())
    }

    /// `w(0) = w(tmax)`.
    pub fn terminal(tmax: f64) -> Self {
        NonlocalCondition::multipoint(vec![1.0], vec![tmax])
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NonlocalCondition::Integral(_) => "integral",
            NonlocalCondition::Multipoint(_) => "multipoint",
        }
    }

    pub fn growth_bounds(&self) -> Option<GrowthBounds> {
        match self {
            NonlocalCondition::Integral(c) => Some(c.bounds),
            NonlocalCondition::Multipoint(_) => None,
        }
    }

    fn validate(&self, name: &str, tmax: f64, errors: &mut Vec<SpecError>) {
        match self {
            NonlocalCondition::Integral(c) => {
                if !c.inner.variables().is_subset_of(&[Var::U, Var::V]) {
                    errors.push(SpecError::Variables {
                        role: format!("{name}.inner"),
                        allowed: "u, v",
                    });
                }
                if !c.outer.variables().is_subset_of(&[Var::U]) {
                    errors.push(SpecError::Variables {
                        role: format!("{name}.outer"),
                        allowed: "u",
                    });
                }
                let b = c.bounds;
                if let Err(e) = GrowthBounds::new(b.p, b.q, b.big_p, b.big_q) {
                    errors.push(SpecError::Bounds {
                        role: name.to_string(),
                        source: e,
                    });
                } else if b.p > b.q || b.big_p > b.big_q {
                    errors.push(SpecError::BoundOrder {
                        role: name.to_string(),
                    });
                }
            }
            NonlocalCondition::Multipoint(c) => {
                if c.weights.len() != c.times.len() {
                    errors.push(SpecError::MultipointShape {
                        role: name.to_string(),
                        weights: c.weights.len(),
                        times: c.times.len(),
                    });
                }
                for &w in &c.weights {
                    if !(w > 0.0 && w.is_finite()) {
                        errors.push(SpecError::MultipointWeight {
                            role: name.to_string(),
                            weight: w,
                        });
                    }
                }
                for &t in &c.times {
                    if !(t > 0.0 && t <= tmax) {
                        errors.push(SpecError::MultipointTime {
                            role: name.to_string(),
                            time: t,
                            tmax,
                        });
                    }
                }
            }
        }
    }
}

/// Space intervals `Nx`, time steps `Nt`, retained sine modes `K ≤ Nx - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Discretization {
    pub nx: usize,
    pub nt: usize,
    pub modes: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            nx: 128,
            nt: 200,
            modes: 127,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("{role}: {message}")]
    Parse { role: String, message: String },
    #[error("{role} may only use the variables {allowed}")]
    Variables { role: String, allowed: &'static str },
    #[error("{role}: {source}")]
    Bounds { role: String, source: ConstantsError },
    #[error("{role}: growth bounds need p <= q and P <= Q")]
    BoundOrder { role: String },
    #[error("{role}: {weights} weights but {times} times")]
    MultipointShape {
        role: String,
        weights: usize,
        times: usize,
    },
    #[error("{role}: weight {weight} is not positive")]
    MultipointWeight { role: String, weight: f64 },
    #[error("{role}: time {time} outside (0, {tmax}]")]
    MultipointTime { role: String, time: f64, tmax: f64 },
    #[error("discretization: need nx >= 2, nt >= 1 and 1 <= modes <= nx - 1 (nx={nx}, nt={nt}, modes={modes})")]
    Discretization { nx: usize, nt: usize, modes: usize },
    #[error("subdomain: {0}")]
    Subdomain(FieldError),
}

/// A complete problem: geometry, reaction terms `f, g` in `(t, x, u, v)`,
/// nonlocal conditions `α` (for `u`) and `β` (for `v`), and the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub geometry: DomainGeometry,
    pub f: Expression,
    pub g: Expression,
    pub alpha: NonlocalCondition,
    pub beta: NonlocalCondition,
    pub discretization: Discretization,
}

impl ProblemSpec {
    /// Every structural problem, not just the first.
    pub fn validate(&self) -> Result<(), Vec<SpecError>> {
        let mut errors = Vec::new();
        if let Err(e) = self.geometry.validate() {
            errors.push(SpecError::Geometry(e));
        }
        let d = self.discretization;
        if d.nx < 2 || d.nt < 1 || d.modes == 0 || d.modes > d.nx - 1 {
            errors.push(SpecError::Discretization {
                nx: d.nx,
                nt: d.nt,
                modes: d.modes,
            });
        } else if errors.is_empty() {
            if let Err(e) = self.grid().and_then(|g| g.snap_subdomain(self.geometry.d_lo, self.geometry.d_hi)) {
                errors.push(SpecError::Subdomain(e));
            }
        }
        self.alpha.validate("alpha", self.geometry.tmax, &mut errors);
        self.beta.validate("beta", self.geometry.tmax, &mut errors);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    pub fn grid(&self) -> Result<Grid, FieldError> {
        Grid::new(
            self.geometry.length,
            self.geometry.tmax,
            self.discretization.nx,
            self.discretization.nt,
        )
    }

    /// Certificates need both conditions of integral kind.
    pub fn integral_bounds(&self) -> Option<(GrowthBounds, GrowthBounds)> {
        Some((self.alpha.growth_bounds()?, self.beta.growth_bounds()?))
    }

    pub fn reaction(&self, c: Component) -> &Expression {
        match c {
            Component::U => &self.f,
            Component::V => &self.g,
        }
    }

    pub fn condition(&self, c: Component) -> &NonlocalCondition {
        match c {
            Component::U => &self.alpha,
            Component::V => &self.beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("{role} = {expression} at t={t}, x={x}, u={u}, v={v}: {error}")]
    Eval {
        role: String,
        expression: String,
        t: f64,
        x: f64,
        u: f64,
        v: f64,
        error: EvalError,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Growth(#[from] GrowthViolation),
}

/// Evaluates `e` at a point, attaching the location to any domain error.
pub fn eval_at(role: &str, e: &Expression, p: Point) -> Result<f64, OperatorError> {
    e.eval(p).map_err(|error| OperatorError::Eval {
        role: role.to_string(),
        expression: e.source().to_string(),
        t: p.t,
        x: p.x,
        u: p.u,
        v: p.v,
        error,
    })
}

/// `F(u, v)(t_n, x_j) = e(t_n, x_j, u⁺, v⁺)` with `w⁺ = max(w, 0)`.
pub fn nemytskii(
    role: &str,
    e: &Expression,
    u: &SpaceTimeField,
    v: &SpaceTimeField,
) -> Result<SpaceTimeField, OperatorError> {
    let grid = *u.grid();
    if v.grid() != &grid {
        return Err(FieldError::Shape.into());
    }
    let mut values = Vec::with_capacity(u.values().len());
    for n in 0..=grid.nt {
        let t = grid.t(n);
        for (j, (a, b)) in u.row(n).iter().zip(v.row(n)).enumerate() {
            let p = Point::new(t, grid.x(j), a.max(0.0), b.max(0.0));
            values.push(eval_at(role, e, p)?);
        }
    }
    Ok(SpaceTimeField::from_values(grid, values)?)
}

/// Second-order exponential integrator weights for one mode and step `h`:
/// `w⁺ = decay·w + prev·f_n + next·f_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct EtdStep {
    decay: f64,
    prev: f64,
    next: f64,
}

impl EtdStep {
    fn new(lambda: f64, h: f64) -> Self {
        let z = lambda * h;
        let phi1 = if z == 0.0 { 1.0 } else { -libm::expm1(-z) / z };
        // (z - 1 + e^{-z}) / z², by series where it cancels
        let psi = if z < 0.1 {
            let mut term = 0.5;
            let mut sum = 0.0;
            for n in 0..12 {
                sum += term;
                term *= -z / (n as f64 + 3.0);
            }
            sum
        } else {
            (z + libm::expm1(-z)) / (z * z)
        };
        EtdStep {
            decay: libm::exp(-z),
            prev: h * (phi1 - psi),
            next: h * psi,
        }
    }
}

/// Operator context for one problem: grid, transform and cached weights.
#[derive(Debug, Clone)]
pub struct Operators {
    spec: ProblemSpec,
    grid: Grid,
    subdomain: Subdomain,
    transform: Transform,
    // decay[n * K + k] = e^{-λ_{k+1} t_n}
    decay: Vec<f64>,
    etd: Vec<EtdStep>,
}

impl Operators {
    pub fn new(spec: ProblemSpec) -> Result<Self, OperatorError> {
        if let Err(mut errs) = spec.validate() {
            return Err(OperatorError::Spec(errs.remove(0)));
        }
        let grid = spec.grid()?;
        let subdomain = grid.snap_subdomain(spec.geometry.d_lo, spec.geometry.d_hi)?;
        let k_max = spec.discretization.modes;
        let transform = Transform::new(grid.length, grid.nx, k_max)?;
        let lambdas: Vec<f64> = (1..=k_max).map(|k| eigenvalue(grid.length, k)).collect();
        let mut decay = Vec::with_capacity((grid.nt + 1) * k_max);
        for n in 0..=grid.nt {
            let t = grid.t(n);
            decay.extend(lambdas.iter().map(|l| libm::exp(-l * t)));
        }
        let etd = lambdas.iter().map(|l| EtdStep::new(*l, grid.dt())).collect();
        Ok(Operators {
            spec,
            grid,
            subdomain,
            transform,
            decay,
            etd,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn subdomain(&self) -> &Subdomain {
        &self.subdomain
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn zero_field(&self) -> SpaceTimeField {
        SpaceTimeField::zeros(self.grid)
    }

    fn modes(&self) -> usize {
        self.spec.discretization.modes
    }

    /// `S̄(u0)(t_n) = S(t_n)u0` on the grid.
    pub fn bar_s(&self, u0: &[f64]) -> Result<SpaceTimeField, OperatorError> {
        self.evolve(u0, None)
    }

    /// `Ŝ(f)(t) = ∫_0^t S(t - τ) f(τ) dτ` with `f` linear between time nodes.
    pub fn hat_s(&self, forcing: &SpaceTimeField) -> Result<SpaceTimeField, OperatorError> {
        let w = self.duhamel_coeffs(forcing)?;
        self.evolve(&vec![0.0; self.grid.nx + 1], Some(&w))
    }

    /// Sine coefficients of `Ŝ(f)` at every time node, row-major `(Nt+1) × K`.
    pub fn duhamel_coeffs(&self, forcing: &SpaceTimeField) -> Result<Vec<f64>, OperatorError> {
        if forcing.grid() != &self.grid {
            return Err(FieldError::Shape.into());
        }
        let k = self.modes();
        let mut out = vec![0.0; (self.grid.nt + 1) * k];
        let mut prev = vec![0.0; k];
        let mut next = vec![0.0; k];
        self.transform.analyze_into(forcing.row(0), &mut prev);
        for n in 0..self.grid.nt {
            self.transform.analyze_into(forcing.row(n + 1), &mut next);
            let (done, rest) = out.split_at_mut((n + 1) * k);
            let w = &done[n * k..];
            for (i, step) in self.etd.iter().enumerate() {
                rest[i] = step.decay * w[i] + step.prev * prev[i] + step.next * next[i];
            }
            core::mem::swap(&mut prev, &mut next);
        }
        Ok(out)
    }

    /// `S̄(u0) + Ŝ(f)` given the Duhamel coefficients of `f`, synthesized
    /// once per row.
    pub fn evolve(&self, u0: &[f64], duhamel: Option<&[f64]>) -> Result<SpaceTimeField, OperatorError> {
        let a = self.transform.analyze(u0)?;
        let k = self.modes();
        let mut out = SpaceTimeField::zeros(self.grid);
        let mut scratch = vec![0.0; k];
        for n in 0..=self.grid.nt {
            let weights = &self.decay[n * k..(n + 1) * k];
            for ((s, c), w) in scratch.iter_mut().zip(a.coeffs()).zip(weights) {
                *s = c * w;
            }
            if let Some(d) = duhamel {
                for (s, h) in scratch.iter_mut().zip(&d[n * k..(n + 1) * k]) {
                    *s += h;
                }
            }
            self.transform.synthesize_into(&scratch, out.row_mut(n));
        }
        Ok(out)
    }

    /// Initial profile `α(u, v)` or `β(u, v)` on the space grid.
    pub fn nonlocal(
        &self,
        which: Component,
        u: &SpaceTimeField,
        v: &SpaceTimeField,
    ) -> Result<Vec<f64>, OperatorError> {
        let grid = self.grid;
        let own = match which {
            Component::U => u,
            Component::V => v,
        };
        match self.spec.condition(which) {
            NonlocalCondition::Multipoint(c) => {
                let mut out = vec![0.0; grid.nx + 1];
                for (a, t) in c.weights.iter().zip(&c.times) {
                    let (n, _) = grid.snap_time(*t);
                    for (o, w) in out.iter_mut().zip(own.row(n)) {
                        *o += a * w;
                    }
                }
                Ok(out)
            }
            NonlocalCondition::Integral(c) => {
                let role_inner = format!("{}.inner", condition_name(which));
                let role_outer = format!("{}.outer", condition_name(which));
                let h = grid.dt();
                let mut out = vec![0.0; grid.nx + 1];
                for (j, o) in out.iter_mut().enumerate() {
                    let x = grid.x(j);
                    let mut sum = 0.0;
                    for n in 0..=grid.nt {
                        let p = Point::new(grid.t(n), x, u.get(n, j).max(0.0), v.get(n, j).max(0.0));
                        let val = eval_at(&role_inner, &c.inner, p)?;
                        let weight = if n == 0 || n == grid.nt { 0.5 } else { 1.0 };
                        sum += weight * val;
                    }
                    let integral = h * sum;
                    *o = eval_at(&role_outer, &c.outer, Point::new(0.0, x, integral, 0.0))?;
                }
                Ok(out)
            }
        }
    }

    /// Distance from each multipoint time to the grid node it was snapped to.
    pub fn snap_distances(&self, which: Component) -> Vec<(f64, f64)> {
        match self.spec.condition(which) {
            NonlocalCondition::Multipoint(c) => c
                .times
                .iter()
                .map(|t| (*t, self.grid.snap_time(*t).1))
                .collect(),
            NonlocalCondition::Integral(_) => Vec::new(),
        }
    }

    pub fn reactions(
        &self,
        u: &SpaceTimeField,
        v: &SpaceTimeField,
    ) -> Result<(SpaceTimeField, SpaceTimeField), OperatorError> {
        Ok((
            nemytskii("f", &self.spec.f, u, v)?,
            nemytskii("g", &self.spec.g, u, v)?,
        ))
    }

    /// `M(u, v) = (S̄α(u,v) + ŜF(u,v), S̄β(u,v) + ŜG(u,v))`.
    pub fn m_apply(&self, u: &SpaceTimeField, v: &SpaceTimeField) -> Result<Pair, OperatorError> {
        let (fu, gv) = self.reactions(u, v)?;
        let a = self.nonlocal(Component::U, u, v)?;
        let b = self.nonlocal(Component::V, u, v)?;
        Ok(Pair {
            u: self.evolve(&a, Some(&self.duhamel_coeffs(&fu)?))?,
            v: self.evolve(&b, Some(&self.duhamel_coeffs(&gv)?))?,
        })
    }

    /// `N(u, v)`: the nonlocal maps are applied to the trajectories
    /// `ū = S̄(u(0)) + ŜF(u,v)`, `v̄ = S̄(v(0)) + ŜG(u,v)`.
    pub fn n_apply(&self, u: &SpaceTimeField, v: &SpaceTimeField) -> Result<Pair, OperatorError> {
        let (fu, gv) = self.reactions(u, v)?;
        let hat_f = self.duhamel_coeffs(&fu)?;
        let hat_g = self.duhamel_coeffs(&gv)?;
        let u_bar = self.evolve(u.initial(), Some(&hat_f))?;
        let v_bar = self.evolve(v.initial(), Some(&hat_g))?;
        let a = self.nonlocal(Component::U, &u_bar, &v_bar)?;
        let b = self.nonlocal(Component::V, &u_bar, &v_bar)?;
        Ok(Pair {
            u: self.evolve(&a, Some(&hat_f))?,
            v: self.evolve(&b, Some(&hat_g))?,
        })
    }

    pub fn apply(&self, map: FixedPointMap, u: &SpaceTimeField, v: &SpaceTimeField) -> Result<Pair, OperatorError> {
        match map {
            FixedPointMap::M => self.m_apply(u, v),
            FixedPointMap::N => self.n_apply(u, v),
        }
    }

    /// `max(|map₁(u,v) - u|, |map₂(u,v) - v|)`.
    pub fn residual(
        &self,
        map: FixedPointMap,
        u: &SpaceTimeField,
        v: &SpaceTimeField,
    ) -> Result<f64, OperatorError> {
        let image = self.apply(map, u, v)?;
        Ok(image.u.distance(u)?.max(image.v.distance(v)?))
    }
}

fn condition_name(c: Component) -> &'static str {
    match c {
        Component::U => "alpha",
        Component::V => "beta",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FixedPointMap {
    M,
    N,
}

/// A pair of fields `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub u: SpaceTimeField,
    pub v: SpaceTimeField,
}

impl Pair {
    pub fn zeros(grid: Grid) -> Self {
        Pair {
            u: SpaceTimeField::zeros(grid),
            v: SpaceTimeField::zeros(grid),
        }
    }

    /// Sup distance over both components.
    pub fn distance(&self, other: &Pair) -> f64 {
        self.u
            .distance(&other.u)
            .unwrap_or(f64::INFINITY)
            .max(self.v.distance(&other.v).unwrap_or(f64::INFINITY))
    }

    pub fn sup_norm(&self) -> f64 {
        self.u.sup_norm().max(self.v.sup_norm())
    }
}

/// A sampled point where a growth bound fails.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{role}: {lower} <= {value} <= {upper} fails at {argument}")]
pub struct GrowthViolation {
    pub role: String,
    pub argument: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

fn grid_points(hi: f64, samples: usize) -> impl Iterator<Item = f64> {
    (0..=samples).map(move |i| hi * i as f64 / samples as f64)
}

fn within(value: f64, lower: f64, upper: f64) -> bool {
    let slack = 1e-12 * (1.0 + lower.abs().max(upper.abs()));
    value >= lower - slack && value <= upper + slack
}

/// Samples `p·w ≤ g(u, v) ≤ q·w` on `[0, R1] × [0, R2]` and
/// `P·s ≤ G(s) ≤ Q·s` on `[0, q·max(R1,R2)·tmax]`.
pub fn check_growth_bounds(
    which: Component,
    cond: &IntegralCondition,
    radii: (f64, f64),
    tmax: f64,
    samples: usize,
) -> Result<(), OperatorError> {
    let name = condition_name(which);
    let b = cond.bounds;
    let role = format!("{name}.inner");
    for u in grid_points(radii.0, samples) {
        for v in grid_points(radii.1, samples) {
            let w = if which == Component::U { u } else { v };
            let value = eval_at(&role, &cond.inner, Point::new(0.0, 0.0, u, v))?;
            if !within(value, b.p * w, b.q * w) {
                return Err(violation(&role, format!("u={u}, v={v}"), value, b.p * w, b.q * w));
            }
        }
    }
    let role = format!("{name}.outer");
    let s_max = b.q * radii.0.max(radii.1) * tmax;
    for s in grid_points(s_max, samples * samples) {
        let value = eval_at(&role, &cond.outer, Point::new(0.0, 0.0, s, 0.0))?;
        if !within(value, b.big_p * s, b.big_q * s) {
            return Err(violation(&role, format!("u={s}"), value, b.big_p * s, b.big_q * s));
        }
    }
    Ok(())
}

fn violation(role: &str, argument: String, value: f64, lower: f64, upper: f64) -> OperatorError {
    OperatorError::Growth(GrowthViolation {
        role: role.to_string(),
        argument,
        value,
        lower,
        upper,
    })
}

/// Samples `e ≥ 0` over `[0, tmax] × [0, L] × [0, R1] × [0, R2]`; returns the
/// first negative sample.
pub fn check_nonnegative(
    role: &str,
    e: &Expression,
    geom: &DomainGeometry,
    radii: (f64, f64),
    samples: usize,
) -> Result<Option<Point>, OperatorError> {
    for t in grid_points(geom.tmax, samples) {
        for x in grid_points(geom.length, samples) {
            for u in grid_points(radii.0, samples) {
                for v in grid_points(radii.1, samples) {
                    let p = Point::new(t, x, u, v);
                    if eval_at(role, e, p)? < 0.0 {
                        return Ok(Some(p));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Times `t` where `e(t, x, 0, 0) ≠ 0` at `x = 0` or `x = L`.
pub fn boundary_violations(
    role: &str,
    e: &Expression,
    geom: &DomainGeometry,
    samples: usize,
) -> Result<Vec<Point>, OperatorError> {
    let mut out = Vec::new();
    for t in grid_points(geom.tmax, samples) {
        for x in [0.0, geom.length] {
            let p = Point::new(t, x, 0.0, 0.0);
            if eval_at(role, e, p)?.abs() > 1e-12 {
                out.push(p);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    fn spec(f: &str, g: &str, alpha: NonlocalCondition, beta: NonlocalCondition) -> ProblemSpec {
        ProblemSpec {
            geometry: DomainGeometry::symmetric_pi(FRAC_PI_4).unwrap(),
            f: Expression::parse(f).unwrap(),
            g: Expression::parse(g).unwrap(),
            alpha,
            beta,
            discretization: Discretization {
                nx: 64,
                nt: 200,
                modes: 63,
            },
        }
    }

    fn unit_integral() -> NonlocalCondition {
        NonlocalCondition::integral("u", "u", GrowthBounds::UNIT).unwrap()
    }

    #[test]
    fn etd_weights_are_exact_for_linear_forcing() {
        // y' = -λy + (a + b s) from y(0) = 0 over one step
        let (lambda, h, a, b) = (3.0f64, 0.2f64, 1.5f64, -0.7f64);
        let s = EtdStep::new(lambda, h);
        let y = s.prev * a + s.next * (a + b * h);
        let exact = a / lambda * (1.0 - (-lambda * h).exp())
            + b * (h / lambda - (1.0 - (-lambda * h).exp()) / (lambda * lambda));
        assert!((y - exact).abs() < 1e-15);
        let small = EtdStep::new(1e-3, 0.05);
        let large = EtdStep::new(2.0, 0.05);
        assert!(small.prev > 0.0 && small.next > 0.0 && large.prev > 0.0);
        assert!((small.prev + small.next - 0.05 * (-(-5e-5f64).exp_m1() / 5e-5)).abs() < 1e-16);
    }

    #[test]
    fn validation_collects_all_errors() {
        let mut s = spec(
            "u",
            "v",
            NonlocalCondition::integral("t*u", "v", GrowthBounds::UNIT).unwrap(),
            NonlocalCondition::multipoint(vec![1.0, -1.0], vec![0.0]),
        );
        s.discretization.modes = 64;
        let errs = s.validate().unwrap_err();
        assert_eq!(errs.len(), 6, "{errs:?}");
    }

    #[test]
    fn nemytskii_reports_location() {
        let s = spec("log(u)", "v", unit_integral(), unit_integral());
        let ops = Operators::new(s).unwrap();
        let z = ops.zero_field();
        let err = ops.reactions(&z, &z).unwrap_err();
        match err {
            OperatorError::Eval { role, t, x, .. } => {
                assert_eq!(role, "f");
                assert_eq!((t, x), (0.0, 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multipoint_terminal_returns_last_row() {
        let s = spec("0", "0", NonlocalCondition::terminal(1.0), NonlocalCondition::zero());
        let ops = Operators::new(s).unwrap();
        let u = SpaceTimeField::from_fn(*ops.grid(), |t, x| (1.0 + t) * x.sin());
        let z = ops.zero_field();
        assert_eq!(ops.nonlocal(Component::U, &u, &z).unwrap(), u.last());
        assert!(ops.nonlocal(Component::V, &u, &z).unwrap().iter().all(|w| *w == 0.0));
        assert_eq!(ops.snap_distances(Component::U), vec![(1.0, 0.0)]);
    }

    #[test]
    fn growth_sampling_finds_violation() {
        let bad = IntegralCondition {
            inner: Expression::parse("2*u").unwrap(),
            outer: Expression::parse("u").unwrap(),
            bounds: GrowthBounds::new(0.5, 1.5, 1.0, 1.0).unwrap(),
        };
        let err = check_growth_bounds(Component::U, &bad, (1.0, 1.0), 1.0, 8).unwrap_err();
        assert!(err.to_string().contains("u=0.125"), "{err}");
        let ok = IntegralCondition {
            inner: Expression::parse("u*(1 + 0.5*v/(1+v))").unwrap(),
            outer: Expression::parse("u").unwrap(),
            bounds: GrowthBounds::new(1.0, 1.5, 1.0, 1.0).unwrap(),
        };
        check_growth_bounds(Component::U, &ok, (2.0, 2.0), 1.0, 8).unwrap();
    }

    #[test]
    fn boundary_assumption_sampling() {
        let g = DomainGeometry::symmetric_pi(FRAC_PI_4).unwrap();
        let e = Expression::parse("sin(x) + u").unwrap();
        assert!(boundary_violations("f", &e, &g, 4).unwrap().is_empty());
        let e = Expression::parse("1 + u").unwrap();
        assert_eq!(boundary_violations("f", &e, &g, 4).unwrap().len(), 10);
        let e = Expression::parse("x - 1").unwrap();
        let p = check_nonnegative("f", &e, &g, (1.0, 1.0), 4).unwrap().unwrap();
        assert_eq!(p.x, 0.0);
    }
}
