//! Harnack-type constant `m(t0, t1)`, the integral constants `c1, c2, C1, C2`,
//! the non-existence slopes and the certificate thresholds.
//!
//! All quantities are extrema over `D` or `Ω` of closed-form sine series,
//! located by a grid scan refined until successive levels agree, followed by
//! a golden-section polish around the best node. Each constant carries an
//! error estimate `|value(K) - value(2K)| + tail bound`.

use alloc::vec::Vec;

use thiserror::Error;

use crate::spectral::{
    integral_tail_bound, modes_for_tolerance, project_indicator, semigroup_tail_bound,
    DomainGeometry, GeometryError, Region, SineSeries,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("minimum search did not settle after {levels} refinements (last change {change:e})")]
    NoConvergence { levels: usize, change: f64 },
    #[error("parameters must be positive, got {0}")]
    Parameter(f64),
}

/// Resolution controls for the constant computations.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstantsConfig {
    /// Sine modes; `None` picks the order whose integral tail is below `1e-8`.
    pub modes: Option<usize>,
    /// Pointwise minima skip `(0, t_gibbs)` where indicator partial sums ring.
    pub t_gibbs: f64,
    /// Relative agreement required between successive grid refinements.
    pub rel_tol: f64,
    pub max_levels: usize,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig {
            modes: None,
            t_gibbs: 0.01,
            rel_tol: 1e-3,
            max_levels: 8,
        }
    }
}

impl ConstantsConfig {
    pub fn modes_for(&self, length: f64) -> usize {
        self.modes.unwrap_or_else(|| modes_for_tolerance(length, 1e-8))
    }
}

/// Location and value of an extremum found by scan-and-polish.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Extremum {
    pub value: f64,
    pub at: f64,
    pub levels: usize,
}

/// `m(t0, t1)` together with where it was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HarnackMinimum {
    pub value: f64,
    pub at_t: f64,
    pub at_x: f64,
    pub levels: usize,
    /// Lower end of the scanned time window.
    pub t_start: f64,
    /// True when `t0 < t_gibbs` and the slices near `t_gibbs` did not confirm
    /// that values only grow toward `t = 0`; `value` is then the smaller of
    /// the interior minimum and the `t_gibbs` slice minimum.
    pub gibbs_flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstantErrors {
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    pub cap_c1: f64,
    pub cap_c2: f64,
}

/// `m, c1, c2, C1, C2` for one geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstantsBundle {
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    pub cap_c1: f64,
    pub cap_c2: f64,
    pub modes_used: usize,
    pub levels_used: usize,
    pub est_error: ConstantErrors,
    pub m_detail: HarnackMinimum,
    pub geometry: DomainGeometry,
}

/// Golden-section minimization of `f` on `[a, b]`.
fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn linspace(a: f64, b: f64, intervals: usize) -> impl Iterator<Item = f64> {
    (0..=intervals).map(move |i| {
        if i == intervals {
            b
        } else {
            a + (b - a) * i as f64 / intervals as f64
        }
    })
}

fn scan_min(f: &impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> (f64, f64) {
    let h = (b - a) / intervals as f64;
    let (mut best_x, mut best) = (a, f64::INFINITY);
    for x in linspace(a, b, intervals) {
        let v = f(x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    let (px, pv) = golden_min(f, (best_x - h).max(a), (best_x + h).min(b));
    if pv < best {
        (px, pv)
    } else {
        (best_x, best)
    }
}

/// Minimum of `f` on `[a, b]`, refining the scan until two successive
/// levels agree to `rel_tol`.
pub fn minimize_1d(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &ConstantsConfig,
) -> Result<Extremum, ConstantsError> {
    let mut intervals = 32;
    let (mut at, mut value) = scan_min(&f, a, b, intervals);
    let mut change = f64::INFINITY;
    for level in 1..=cfg.max_levels {
        intervals *= 2;
        let (x, v) = scan_min(&f, a, b, intervals);
        change = (v - value).abs();
        let (x, v) = if v < value { (x, v) } else { (at, value) };
        let settled = change <= cfg.rel_tol * v.abs().max(1e-300);
        at = x;
        value = v;
        if settled {
            return Ok(Extremum {
                value,
                at,
                levels: level,
            });
        }
    }
    Err(ConstantsError::NoConvergence {
        levels: cfg.max_levels,
        change,
    })
}

pub fn maximize_1d(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &ConstantsConfig,
) -> Result<Extremum, ConstantsError> {
    let e = minimize_1d(|x| -f(x), a, b, cfg)?;
    Ok(Extremum {
        value: -e.value,
        ..e
    })
}

fn slice_min(series: &SineSeries, t: f64, lo: f64, hi: f64, intervals: usize) -> (f64, f64) {
    let evolved = series.apply_semigroup(t).expect("t >= 0");
    scan_min(&|x| evolved.evaluate_unchecked(x), lo, hi, intervals)
}

fn tensor_min(
    series: &SineSeries,
    t_lo: f64,
    t_hi: f64,
    x_lo: f64,
    x_hi: f64,
    nt: usize,
    nx: usize,
) -> (f64, f64, f64) {
    let mut best = (f64::INFINITY, t_lo, x_lo);
    for t in linspace(t_lo, t_hi, nt) {
        let (x, v) = slice_min(series, t, x_lo, x_hi, nx);
        if v < best.0 {
            best = (v, t, x);
        }
    }
    // polish in t at the best x, then once more in x
    let ht = if nt > 0 { (t_hi - t_lo) / nt as f64 } else { 0.0 };
    if ht > 0.0 {
        let at_x = |t: f64| {
            series
                .apply_semigroup(t)
                .expect("t >= 0")
                .evaluate_unchecked(best.2)
        };
        let (t, v) = golden_min(&at_x, (best.1 - ht).max(t_lo), (best.1 + ht).min(t_hi));
        if v < best.0 {
            let (x, v2) = slice_min(series, t, x_lo, x_hi, nx);
            best = if v2 < v { (v2, t, x) } else { (v, t, best.2) };
        }
    }
    best
}

/// `m(t0, t1) = min_{t∈[t0,t1], x∈D} (S(t)χ_D)(x)`, scanning from
/// `max(t0, t_gibbs)` as described on [`HarnackMinimum`].
pub fn compute_m(
    geom: &DomainGeometry,
    modes: usize,
    cfg: &ConstantsConfig,
) -> Result<HarnackMinimum, ConstantsError> {
    geom.validate()?;
    let chi = project_indicator(geom, Region::D, modes);
    let t_start = geom.t0.max(cfg.t_gibbs).min(geom.t1);
    let (lo, hi) = (geom.d_lo, geom.d_hi);
    let (mut nt, mut nx) = (8, 32);
    let mut best = tensor_min(&chi, t_start, geom.t1, lo, hi, nt, nx);
    let mut levels = 0;
    let mut change = f64::INFINITY;
    for level in 1..=cfg.max_levels {
        nt *= 2;
        nx *= 2;
        let next = tensor_min(&chi, t_start, geom.t1, lo, hi, nt, nx);
        change = (next.0 - best.0).abs();
        if next.0 < best.0 {
            best = next;
        }
        if change <= cfg.rel_tol * best.0.abs().max(1e-300) {
            levels = level;
            break;
        }
    }
    if levels == 0 {
        return Err(ConstantsError::NoConvergence {
            levels: cfg.max_levels,
            change,
        });
    }

    let mut gibbs_flagged = false;
    let mut value = best.0;
    if geom.t0 < t_start {
        // values must not dip on the way down to t_gibbs
        let (_, at_gibbs) = slice_min(&chi, t_start, lo, hi, nx);
        let (_, further) = slice_min(&chi, (2.0 * t_start).min(geom.t1), lo, hi, nx);
        let monotone = at_gibbs >= further && at_gibbs >= value;
        if !monotone {
            gibbs_flagged = true;
            value = value.min(at_gibbs);
        }
    }
    Ok(HarnackMinimum {
        value,
        at_t: best.1,
        at_x: best.2,
        levels,
        t_start,
        gibbs_flagged,
    })
}

/// `c1 = ⌊∫_0^{tmax} S(τ)χ_D dτ⌋` and
/// `c2 = ⌊∫_{t0}^{tmax} ∫_{t0}^{min(t,t1)} S(t-τ)χ_D dτ dt⌋`.
pub fn compute_c1_c2(
    geom: &DomainGeometry,
    modes: usize,
    cfg: &ConstantsConfig,
) -> Result<(Extremum, Extremum), ConstantsError> {
    geom.validate()?;
    let chi = project_indicator(geom, Region::D, modes);
    let single = chi.integrate_semigroup(0.0, geom.tmax).expect("valid times");
    let double = chi
        .double_integrate_semigroup(geom.t0, geom.t1, geom.tmax)
        .expect("valid times");
    let c1 = minimize_1d(|x| single.evaluate_unchecked(x), geom.d_lo, geom.d_hi, cfg)?;
    let c2 = minimize_1d(|x| double.evaluate_unchecked(x), geom.d_lo, geom.d_hi, cfg)?;
    Ok((c1, c2))
}

/// `C1 = |∫_0^{tmax} S(τ)χ_Ω dτ|` and `C2 = |∫_0^{tmax} ∫_0^t S(τ)χ_Ω dτ dt|`.
pub fn compute_cap_c1_c2(
    geom: &DomainGeometry,
    modes: usize,
    cfg: &ConstantsConfig,
) -> Result<(Extremum, Extremum), ConstantsError> {
    geom.validate()?;
    let chi = project_indicator(geom, Region::Omega, modes);
    let single = chi.integrate_semigroup(0.0, geom.tmax).expect("valid times");
    let double = chi
        .double_integrate_semigroup(0.0, geom.tmax, geom.tmax)
        .expect("valid times");
    let cap_c1 = maximize_1d(|x| single.evaluate_unchecked(x), 0.0, geom.length, cfg)?;
    let cap_c2 = maximize_1d(|x| double.evaluate_unchecked(x), 0.0, geom.length, cfg)?;
    Ok((cap_c1, cap_c2))
}

fn rounding(value: f64) -> f64 {
    64.0 * f64::EPSILON * value.abs()
}

struct RawConstants {
    m: HarnackMinimum,
    c1: Extremum,
    c2: Extremum,
    cap_c1: Extremum,
    cap_c2: Extremum,
}

fn raw_constants(
    geom: &DomainGeometry,
    modes: usize,
    cfg: &ConstantsConfig,
) -> Result<RawConstants, ConstantsError> {
    let m = compute_m(geom, modes, cfg)?;
    let (c1, c2) = compute_c1_c2(geom, modes, cfg)?;
    let (cap_c1, cap_c2) = compute_cap_c1_c2(geom, modes, cfg)?;
    Ok(RawConstants {
        m,
        c1,
        c2,
        cap_c1,
        cap_c2,
    })
}

/// All five constants at `K` modes, with errors estimated against `2K`.
pub fn compute_constants(
    geom: &DomainGeometry,
    cfg: &ConstantsConfig,
) -> Result<ConstantsBundle, ConstantsError> {
    geom.validate()?;
    let modes = cfg.modes_for(geom.length);
    let base = raw_constants(geom, modes, cfg)?;
    let fine = raw_constants(geom, 2 * modes, cfg)?;
    let tail = integral_tail_bound(geom.length, modes);
    let m_tail = semigroup_tail_bound(geom.length, modes, base.m.t_start);
    let levels_used = [
        base.m.levels,
        base.c1.levels,
        base.c2.levels,
        base.cap_c1.levels,
        base.cap_c2.levels,
    ]
    .into_iter()
    .max()
    .unwrap_or(0);
    Ok(ConstantsBundle {
        m: base.m.value,
        c1: base.c1.value,
        c2: base.c2.value,
        cap_c1: base.cap_c1.value,
        cap_c2: base.cap_c2.value,
        modes_used: modes,
        levels_used,
        est_error: ConstantErrors {
            m: (base.m.value - fine.m.value).abs() + m_tail + rounding(base.m.value),
            c1: (base.c1.value - fine.c1.value).abs() + tail + rounding(base.c1.value),
            c2: (base.c2.value - fine.c2.value).abs() + tail + rounding(base.c2.value),
            cap_c1: (base.cap_c1.value - fine.cap_c1.value).abs() + tail + rounding(base.cap_c1.value),
            cap_c2: (base.cap_c2.value - fine.cap_c2.value).abs() + tail + rounding(base.cap_c2.value),
        },
        m_detail: base.m,
        geometry: *geom,
    })
}

/// Growth bounds of one nonlocal condition:
/// `p·u ≤ g(u, v) ≤ q·u` and `P·w ≤ G(w) ≤ Q·w`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GrowthBounds {
    pub p: f64,
    pub q: f64,
    pub big_p: f64,
    pub big_q: f64,
}

impl GrowthBounds {
    pub const UNIT: GrowthBounds = GrowthBounds {
        p: 1.0,
        q: 1.0,
        big_p: 1.0,
        big_q: 1.0,
    };

    pub fn new(p: f64, q: f64, big_p: f64, big_q: f64) -> Result<Self, ConstantsError> {
        for v in [p, q, big_p, big_q] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConstantsError::Parameter(v));
            }
        }
        Ok(GrowthBounds { p, q, big_p, big_q })
    }

    /// `p·P`.
    pub fn lower(&self) -> f64 {
        self.p * self.big_p
    }

    /// `q·Q`.
    pub fn upper(&self) -> f64 {
        self.q * self.big_q
    }
}

/// Slopes below/above which a linear comparison rules out a nonzero component.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NonexistenceSlopes {
    /// `max((1 - qQC1)/(qQC2 + C1), (1 - qQ·tmax)/C1)`.
    pub upper: f64,
    /// `((pP)^{-1} - c1)/(m·c2)`.
    pub lower: f64,
    /// `pP·c1 > 1`: the component vanishes whatever the nonlinearity.
    pub unconditional: bool,
}

pub fn nonexistence_constants(
    consts: &ConstantsBundle,
    bounds: &GrowthBounds,
    tmax: f64,
) -> NonexistenceSlopes {
    let qq = bounds.upper();
    let pp = bounds.lower();
    let first = (1.0 - qq * consts.cap_c1) / (qq * consts.cap_c2 + consts.cap_c1);
    let second = (1.0 - qq * tmax) / consts.cap_c1;
    NonexistenceSlopes {
        upper: first.max(second),
        lower: (1.0 / pp - consts.c1) / (consts.m * consts.c2),
        unconditional: pp * consts.c1 > 1.0,
    }
}

/// Thresholds for `f^R` (upper) and `f_{r,R}` (lower) in the existence test.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Thresholds {
    /// `(1 - qQ·C1)/(qQ·C2 + C1)`: `f^R` must not exceed this.
    pub sup: f64,
    /// `((pP)^{-1} - c1)/c2`: `f_{r,R}` must exceed this.
    pub inf: f64,
    /// `qQ·C1 < 1`; otherwise no nonnegative `f^R` can pass.
    pub sup_feasible: bool,
    /// `pP·c1 > 1`; the lower condition then holds for any `f ≥ 0`.
    pub inf_vacuous: bool,
}

pub fn thresholds(consts: &ConstantsBundle, bounds: &GrowthBounds) -> Thresholds {
    let qq = bounds.upper();
    let pp = bounds.lower();
    Thresholds {
        sup: (1.0 - qq * consts.cap_c1) / (qq * consts.cap_c2 + consts.cap_c1),
        inf: (1.0 / pp - consts.c1) / consts.c2,
        sup_feasible: qq * consts.cap_c1 < 1.0,
        inf_vacuous: pp * consts.c1 > 1.0,
    }
}

/// One row of the subdomain-width scan on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanRow {
    pub b: f64,
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    /// `(1 - c1)/(c2·m)`.
    pub ratio: f64,
}

/// `m, c1, c2` and `(1 - c1)/(c2·m)` for `D = [b, L - b]`, keeping the
/// lengths and times of `base`.
pub fn scan_point(
    base: &DomainGeometry,
    b: f64,
    cfg: &ConstantsConfig,
) -> Result<ScanRow, ConstantsError> {
    let geom = DomainGeometry::new(base.length, b, base.length - b, base.t0, base.t1, base.tmax)?;
    let modes = cfg.modes_for(geom.length);
    let m = compute_m(&geom, modes, cfg)?.value;
    let (c1, c2) = compute_c1_c2(&geom, modes, cfg)?;
    Ok(ScanRow {
        b,
        m,
        c1: c1.value,
        c2: c2.value,
        ratio: (1.0 - c1.value) / (c2.value * m),
    })
}

/// `steps` equally spaced values of `b` over `[b_min, b_max]`.
pub fn scan_values(b_min: f64, b_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return alloc::vec![b_min];
    }
    linspace(b_min, b_max, steps - 1).collect()
}

/// Index of the smallest ratio.
pub fn scan_argmin(rows: &[ScanRow]) -> Option<usize> {
    rows.iter()
        .enumerate()
        .min_by(|a, b| a.1.ratio.total_cmp(&b.1.ratio))
        .map(|(i, _)| i)
}
