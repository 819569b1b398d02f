//! Dirichlet sine eigenbasis on `[0, L]` and the heat semigroup acting on it.
//!
//! A function is represented by coefficients `a_k` of `sin(kπx/L)`,
//! `k = 1..=K`. Mode `k` has eigenvalue `λ_k = (kπ/L)²`, so the semigroup,
//! its time integral and the nested double integral used by the lower-bound
//! constants all act diagonally with closed-form weights.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpectralError {
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("invalid time interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
    #[error("position {x} outside [0, {length}]")]
    OutOfDomain { x: f64, length: f64 },
    #[error("{modes} modes cannot be resolved on a grid with {nx} intervals")]
    TooManyModes { modes: usize, nx: usize },
    #[error("at least one mode is required")]
    NoModes,
    #[error("expected {expected} grid values, got {found}")]
    GridLength { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("interval length must be positive and finite, got {0}")]
    Length(f64),
    #[error("subdomain [{lo}, {hi}] must satisfy 0 < lo < hi < {length}")]
    Subdomain { lo: f64, hi: f64, length: f64 },
    #[error("times must satisfy 0 <= t0 < t1 <= tmax, got t0={t0}, t1={t1}, tmax={tmax}")]
    Times { t0: f64, t1: f64, tmax: f64 },
}

/// Interval `Ω = [0, L]`, compactly contained `D = [d_lo, d_hi]`, and the
/// time window `[t0, t1] ⊂ [0, tmax]` on which lower bounds are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainGeometry {
    pub length: f64,
    pub d_lo: f64,
    pub d_hi: f64,
    pub t0: f64,
    pub t1: f64,
    pub tmax: f64,
}

impl DomainGeometry {
    pub fn new(
        length: f64,
        d_lo: f64,
        d_hi: f64,
        t0: f64,
        t1: f64,
        tmax: f64,
    ) -> Result<Self, GeometryError> {
        let g = DomainGeometry {
            length,
            d_lo,
            d_hi,
            t0,
            t1,
            tmax,
        };
        g.validate()?;
        Ok(g)
    }

    /// `Ω = [0, π]`, `D = [b, π - b]`, `t0 = 0`, `t1 = tmax = 1`.
    pub fn symmetric_pi(b: f64) -> Result<Self, GeometryError> {
        DomainGeometry::new(PI, b, PI - b, 0.0, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(GeometryError::Length(self.length));
        }
        if !(0.0 < self.d_lo && self.d_lo < self.d_hi && self.d_hi < self.length) {
            return Err(GeometryError::Subdomain {
                lo: self.d_lo,
                hi: self.d_hi,
                length: self.length,
            });
        }
        if !(0.0 <= self.t0 && self.t0 < self.t1 && self.t1 <= self.tmax && self.tmax.is_finite())
        {
            return Err(GeometryError::Times {
                t0: self.t0,
                t1: self.t1,
                tmax: self.tmax,
            });
        }
        Ok(())
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        eigenvalue(self.length, k)
    }
}

/// `λ_k = (kπ/L)²`.
pub fn eigenvalue(length: f64, k: usize) -> f64 {
    let w = k as f64 * PI / length;
    w * w
}

/// `e^{-λt}`.
pub fn semigroup_weight(lambda: f64, t: f64) -> f64 {
    libm::exp(-lambda * t)
}

/// `∫_a^b e^{-λτ} dτ = (e^{-λa} - e^{-λb}) / λ`.
pub fn integral_weight(lambda: f64, a: f64, b: f64) -> f64 {
    // e^{-λa}(1 - e^{-λ(b-a)}) keeps the small-interval case accurate
    -libm::exp(-lambda * a) * libm::expm1(-lambda * (b - a)) / lambda
}

/// `∫_{t0}^{tmax} ∫_{t0}^{min(t, t1)} e^{-λ(t-τ)} dτ dt`.
///
/// Splitting the outer integral at `t1` gives
/// `(t1-t0)/λ - (1 - e^{-λ(t1-t0)})/λ²` for `t ∈ [t0, t1]` and
/// `[(1 - e^{-λ(tmax-t1)}) - e^{-λ(t1-t0)}(1 - e^{-λ(tmax-t1)})]/λ²`
/// for `t ∈ [t1, tmax]`.
pub fn double_integral_weight(lambda: f64, t0: f64, t1: f64, tmax: f64) -> f64 {
    let window = t1 - t0;
    let tail = tmax - t1;
    let z = lambda * window;
    // (z - (1 - e^{-z})) / λ², with a series for small z
    let inner = if z < 1e-3 {
        window * window * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0)
    } else {
        (z + libm::expm1(-z)) / (lambda * lambda)
    };
    let decay_tail = -libm::expm1(-lambda * tail);
    let after = decay_tail * (-libm::expm1(-z)) / (lambda * lambda);
    inner + after
}

/// Which indicator to expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Region {
    D,
    Omega,
}

/// Coefficients of `Σ a_k sin(kπx/L)`, stored densely for `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    length: f64,
    coeffs: Vec<f64>,
}

impl SineSeries {
    pub fn new(length: f64, coeffs: Vec<f64>) -> Self {
        SineSeries { length, coeffs }
    }

    pub fn zeros(length: f64, modes: usize) -> Self {
        SineSeries::new(length, vec![0.0; modes])
    }

    /// Unit coefficient on mode `k` (1-based).
    pub fn single_mode(length: f64, modes: usize, k: usize, amplitude: f64) -> Self {
        let mut s = SineSeries::zeros(length, modes);
        s.coeffs[k - 1] = amplitude;
        s
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of mode `k` (1-based).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k - 1]
    }

    /// Multiplies coefficient `k` by `weight(λ_k)`.
    pub fn map_modes(&self, weight: impl Fn(f64) -> f64) -> SineSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if *a == 0.0 {
                    0.0
                } else {
                    a * weight(eigenvalue(self.length, i + 1))
                }
            })
            .collect();
        SineSeries::new(self.length, coeffs)
    }

    /// `S(t)` applied mode by mode. `t = 0` returns an exact copy.
    pub fn apply_semigroup(&self, t: f64) -> Result<SineSeries, SpectralError> {
        if !(t >= 0.0) {
            return Err(SpectralError::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        Ok(self.map_modes(|lambda| semigroup_weight(lambda, t)))
    }

    /// `∫_a^b S(τ) dτ` applied to the series.
    pub fn integrate_semigroup(&self, a: f64, b: f64) -> Result<SineSeries, SpectralError> {
        if !(a >= 0.0 && a <= b) {
            return Err(SpectralError::InvalidInterval(a, b));
        }
        Ok(self.map_modes(|lambda| integral_weight(lambda, a, b)))
    }

    /// `∫_{t0}^{tmax} ∫_{t0}^{min(t,t1)} S(t-τ) dτ dt` applied to the series.
    pub fn double_integrate_semigroup(
        &self,
        t0: f64,
        t1: f64,
        tmax: f64,
    ) -> Result<SineSeries, SpectralError> {
        if !(t0 >= 0.0 && t0 <= t1 && t1 <= tmax) {
            return Err(SpectralError::InvalidInterval(t0, tmax));
        }
        Ok(self.map_modes(|lambda| double_integral_weight(lambda, t0, t1, tmax)))
    }

    /// Number of leading coefficients up to the last nonzero one.
    fn active_modes(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|a| *a != 0.0)
            .map_or(0, |i| i + 1)
    }

    /// Partial sum at `x`, accumulated in ascending `k`.
    pub fn evaluate(&self, x: f64) -> Result<f64, SpectralError> {
        let slop = 1e-12 * self.length;
        if !(x >= -slop && x <= self.length + slop) {
            return Err(SpectralError::OutOfDomain {
                x,
                length: self.length,
            });
        }
        Ok(self.evaluate_unchecked(x.clamp(0.0, self.length)))
    }

    pub(crate) fn evaluate_unchecked(&self, x: f64) -> f64 {
        let theta = PI * x / self.length;
        let n = self.active_modes();
        let mut sum = 0.0;
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if *a != 0.0 {
                sum += a * libm::sin((i + 1) as f64 * theta);
            }
        }
        sum
    }

    pub fn scaled(&self, factor: f64) -> SineSeries {
        SineSeries::new(self.length, self.coeffs.iter().map(|a| a * factor).collect())
    }

    /// Coefficient-wise sum. Series of different order are zero-padded.
    pub fn add(&self, other: &SineSeries) -> SineSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).copied().unwrap_or(0.0) + other.coeffs.get(i).copied().unwrap_or(0.0))
            .collect();
        SineSeries::new(self.length, coeffs)
    }

    pub fn max_coeff_diff(&self, other: &SineSeries) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| {
                libm::fabs(
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        - other.coeffs.get(i).copied().unwrap_or(0.0),
                )
            })
            .fold(0.0, f64::max)
    }
}

/// Sine coefficients of the indicator of `[a, b] ⊂ [0, L]`:
/// `(2/L)∫_a^b sin(kπx/L) dx = 2(cos(kπa/L) - cos(kπb/L))/(kπ)`.
pub fn project_interval(length: f64, a: f64, b: f64, modes: usize) -> SineSeries {
    let coeffs = (1..=modes)
        .map(|k| {
            let w = k as f64 * PI / length;
            2.0 * (libm::cos(w * a) - libm::cos(w * b)) / (k as f64 * PI)
        })
        .collect();
    SineSeries::new(length, coeffs)
}

/// Indicator of `D` or of the whole interval, expanded to `modes` terms.
pub fn project_indicator(geom: &DomainGeometry, which: Region, modes: usize) -> SineSeries {
    match which {
        Region::D => project_interval(geom.length, geom.d_lo, geom.d_hi, modes),
        Region::Omega => {
            // cos(kπ) is ±1 exactly; avoid the rounding of cos(w·L)
            let coeffs = (1..=modes)
                .map(|k| if k % 2 == 1 { 4.0 / (k as f64 * PI) } else { 0.0 })
                .collect();
            SineSeries::new(geom.length, coeffs)
        }
    }
}

/// Upper bound on `Σ_{k>K} |c_k| w_k` for indicator coefficients
/// (`|c_k| ≤ 4/(kπ)`) when `w_k ≤ 1/λ_k`: `2L²/(π³K²)`.
pub fn integral_tail_bound(length: f64, modes: usize) -> f64 {
    let k = modes.max(1) as f64;
    2.0 * length * length / (PI * PI * PI * k * k)
}

/// Same bound when `w_k = e^{-λ_k t}`, `t > 0`.
pub fn semigroup_tail_bound(length: f64, modes: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return f64::INFINITY;
    }
    // Σ_{k>K} 4/(kπ) e^{-λ_k t} ≤ 4/((K+1)π) e^{-λ_{K+1} t} / (1 - e^{-(2K+3)(π/L)² t})
    let k1 = (modes + 1) as f64;
    let first = 4.0 / (k1 * PI) * semigroup_weight(eigenvalue(length, modes + 1), t);
    let ratio = libm::exp(-(2.0 * k1 + 1.0) * (PI / length) * (PI / length) * t);
    first / (1.0 - ratio)
}

/// Smallest truncation order whose integral tail bound is below `tol`.
pub fn modes_for_tolerance(length: f64, tol: f64) -> usize {
    let k = libm::sqrt(2.0 * length * length / (PI * PI * PI * tol));
    libm::ceil(k) as usize
}

/// Direct DST-I pair on the uniform grid `x_j = jL/N`, `j = 0..=N`.
///
/// `analyze` is exact on the span of the first `N - 1` modes, so
/// `analyze(synthesize(s)) = s` up to rounding whenever `K ≤ N - 1`.
#[derive(Debug, Clone)]
pub struct Transform {
    length: f64,
    nx: usize,
    modes: usize,
    // table[(k-1) * (nx-1) + (j-1)] = sin(kπj/N)
    table: Vec<f64>,
}

impl Transform {
    pub fn new(length: f64, nx: usize, modes: usize) -> Result<Self, SpectralError> {
        if modes == 0 {
            return Err(SpectralError::NoModes);
        }
        if nx < 2 || modes > nx - 1 {
            return Err(SpectralError::TooManyModes { modes, nx });
        }
        let inner = nx - 1;
        let mut table = Vec::with_capacity(modes * inner);
        for k in 1..=modes {
            for j in 1..=inner {
                // reduce kj mod 2N before scaling so large products stay exact
                let r = (k * j) % (2 * nx);
                table.push(libm::sin(PI * r as f64 / nx as f64));
            }
        }
        Ok(Transform {
            length,
            nx,
            modes,
            table,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..=self.nx)
            .map(|j| j as f64 * self.length / self.nx as f64)
            .collect()
    }

    /// Grid values (length `N + 1`, zero at both ends) of a series.
    pub fn synthesize(&self, s: &SineSeries) -> Vec<f64> {
        let mut out = vec![0.0; self.nx + 1];
        self.synthesize_into(s.coeffs(), &mut out);
        out
    }

    pub(crate) fn synthesize_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let inner = self.nx - 1;
        out.iter_mut().for_each(|v| *v = 0.0);
        let n = coeffs.len().min(self.modes);
        for (k, a) in coeffs[..n].iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            let row = &self.table[k * inner..(k + 1) * inner];
            for (o, s) in out[1..self.nx].iter_mut().zip(row) {
                *o += a * s;
            }
        }
    }

    /// Coefficients of the first `K` modes from grid values.
    pub fn analyze(&self, values: &[f64]) -> Result<SineSeries, SpectralError> {
        if values.len() != self.nx + 1 {
            return Err(SpectralError::GridLength {
                expected: self.nx + 1,
                found: values.len(),
            });
        }
        let mut coeffs = vec![0.0; self.modes];
        self.analyze_into(values, &mut coeffs);
        Ok(SineSeries::new(self.length, coeffs))
    }

    pub(crate) fn analyze_into(&self, values: &[f64], coeffs: &mut [f64]) {
        let inner = self.nx - 1;
        let scale = 2.0 / self.nx as f64;
        for (k, c) in coeffs.iter_mut().enumerate().take(self.modes) {
            let row = &self.table[k * inner..(k + 1) * inner];
            let mut sum = 0.0;
            for (v, s) in values[1..self.nx].iter().zip(row) {
                sum += v * s;
            }
            *c = scale * sum;
        }
    }
}
