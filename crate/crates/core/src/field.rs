//! Space-time grid functions `u(t_n, x_j)` and the quantities measured on
//! them: the sup norm, the floor functional `⌊u⌋ = min_{x∈D} |u(0, x)|`,
//! cone membership `u(t) ≥ S(t)u(0)`, and the Harnack-type lower bound.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::spectral::{DomainGeometry, Transform};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("grid needs at least 2 space intervals and 1 time step (nx={nx}, nt={nt})")]
    Resolution { nx: usize, nt: usize },
    #[error("subdomain [{lo}, {hi}] collapses on a grid with {nx} intervals")]
    Snap { lo: f64, hi: f64, nx: usize },
    #[error("field shapes differ")]
    Shape,
}

/// Uniform grid `t_n = n·tmax/Nt`, `x_j = j·L/Nx`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    pub length: f64,
    pub tmax: f64,
    pub nx: usize,
    pub nt: usize,
}

impl Grid {
    pub fn new(length: f64, tmax: f64, nx: usize, nt: usize) -> Result<Self, FieldError> {
        if nx < 2 || nt < 1 {
            return Err(FieldError::Resolution { nx, nt });
        }
        Ok(Grid {
            length,
            tmax,
            nx,
            nt,
        })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.nx as f64
    }

    pub fn dt(&self) -> f64 {
        self.tmax / self.nt as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.length / self.nx as f64
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.tmax / self.nt as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..=self.nx).map(|j| self.x(j)).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..=self.nt).map(|n| self.t(n)).collect()
    }

    /// Nearest time index, and its distance from `t`.
    pub fn snap_time(&self, t: f64) -> (usize, f64) {
        let n = libm::round(t / self.dt()).clamp(0.0, self.nt as f64) as usize;
        (n, libm::fabs(self.t(n) - t))
    }

    /// Time indices `n` with `t_n ∈ [t0, t1]`.
    pub fn time_window(&self, t0: f64, t1: f64) -> (usize, usize) {
        let eps = 1e-9 * self.dt();
        let lo = libm::ceil((t0 - eps) / self.dt()).max(0.0) as usize;
        let hi = (libm::floor((t1 + eps) / self.dt()) as usize).min(self.nt);
        (lo, hi)
    }

    /// `D` snapped to the nearest grid nodes.
    pub fn snap_subdomain(&self, lo: f64, hi: f64) -> Result<Subdomain, FieldError> {
        let j_lo = libm::round(lo / self.dx()) as usize;
        let j_hi = libm::round(hi / self.dx()) as usize;
        if !(0 < j_lo && j_lo < j_hi && j_hi < self.nx) {
            return Err(FieldError::Snap {
                lo,
                hi,
                nx: self.nx,
            });
        }
        Ok(Subdomain {
            j_lo,
            j_hi,
            lo: self.x(j_lo),
            hi: self.x(j_hi),
        })
    }
}

/// Grid-aligned `D`: nodes `j_lo..=j_hi`, at positions `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Subdomain {
    pub j_lo: usize,
    pub j_hi: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Subdomain {
    /// Geometry with `D` replaced by its snapped version.
    pub fn apply_to(&self, geom: &DomainGeometry) -> DomainGeometry {
        DomainGeometry {
            d_lo: self.lo,
            d_hi: self.hi,
            ..*geom
        }
    }

    pub fn indices(&self) -> core::ops::RangeInclusive<usize> {
        self.j_lo..=self.j_hi
    }
}

/// Row-major `(Nt + 1) × (Nx + 1)` grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid,
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: Grid) -> Self {
        SpaceTimeField {
            grid,
            values: vec![0.0; (grid.nt + 1) * (grid.nx + 1)],
        }
    }

    /// Samples `f(t, x)` on the grid; boundary columns are forced to zero.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = SpaceTimeField::zeros(grid);
        for n in 0..=grid.nt {
            let t = grid.t(n);
            let row = field.row_mut(n);
            for (j, v) in row.iter_mut().enumerate().take(grid.nx).skip(1) {
                *v = f(t, grid.x(j));
            }
        }
        field
    }

    /// Every row equal to `profile`.
    pub fn constant_in_time(grid: Grid, profile: &[f64]) -> Self {
        let mut field = SpaceTimeField::zeros(grid);
        for n in 0..=grid.nt {
            field.row_mut(n).copy_from_slice(profile);
        }
        field
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != (grid.nt + 1) * (grid.nx + 1) {
            return Err(FieldError::Shape);
        }
        Ok(SpaceTimeField { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: usize, j: usize) -> f64 {
        self.values[n * (self.grid.nx + 1) + j]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let w = self.grid.nx + 1;
        &self.values[n * w..(n + 1) * w]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [f64] {
        let w = self.grid.nx + 1;
        &mut self.values[n * w..(n + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.grid.nx + 1)
    }

    pub fn initial(&self) -> &[f64] {
        self.row(0)
    }

    pub fn last(&self) -> &[f64] {
        self.row(self.grid.nt)
    }

    fn check_shape(&self, other: &SpaceTimeField) -> Result<(), FieldError> {
        if self.grid.nx != other.grid.nx || self.grid.nt != other.grid.nt {
            return Err(FieldError::Shape);
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpaceTimeField {
        SpaceTimeField {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> SpaceTimeField {
        self.map(|v| c * v)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SpaceTimeField, b: f64) -> Result<SpaceTimeField, FieldError> {
        self.check_shape(other)?;
        Ok(SpaceTimeField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn add(&self, other: &SpaceTimeField) -> Result<SpaceTimeField, FieldError> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SpaceTimeField) -> Result<SpaceTimeField, FieldError> {
        self.combine(1.0, other, -1.0)
    }

    /// `max |u(t_n, x_j)|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    pub fn distance(&self, other: &SpaceTimeField) -> Result<f64, FieldError> {
        self.check_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max(libm::fabs(a - b))))
    }

    /// `⌊u⌋`: minimum of `|u(0, x_j)|` over the nodes of `D`.
    pub fn floor(&self, d: &Subdomain) -> f64 {
        floor_of_profile(self.initial(), d)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }
}

/// `⌊·⌋` of a single spatial profile.
pub fn floor_of_profile(profile: &[f64], d: &Subdomain) -> f64 {
    profile[d.j_lo..=d.j_hi]
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(libm::fabs(*v)))
}

/// Piecewise-linear plateau: 1 on `D`, linear down to 0 at both ends.
pub fn plateau(grid: &Grid, d: &Subdomain) -> Vec<f64> {
    (0..=grid.nx)
        .map(|j| {
            if j < d.j_lo {
                j as f64 / d.j_lo as f64
            } else if j > d.j_hi {
                (grid.nx - j) as f64 / (grid.nx - d.j_hi) as f64
            } else {
                1.0
            }
        })
        .collect()
}

/// Outcome of a pointwise inequality check over a field.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub holds: bool,
    /// Largest amount by which the inequality fails (0 when it holds exactly).
    pub worst_violation: f64,
    /// `(n, j)` of the worst violation.
    pub at: Option<(usize, usize)>,
}

impl Check {
    fn from_worst(worst: f64, at: Option<(usize, usize)>, tol: f64) -> Self {
        Check {
            holds: worst <= tol,
            worst_violation: worst.max(0.0),
            at,
        }
    }
}

/// `u ≥ -tol` and `u(t_n) ≥ S(t_n)u(0) - tol` everywhere.
pub fn in_cone(u: &SpaceTimeField, transform: &Transform, tol: f64) -> Check {
    let grid = u.grid();
    let initial = transform
        .analyze(u.initial())
        .expect("field and transform share the space grid");
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    let mut evolved = vec![0.0; grid.nx + 1];
    for n in 0..=grid.nt {
        let decayed = initial
            .apply_semigroup(grid.t(n))
            .expect("grid times are nonnegative");
        transform.synthesize_into(decayed.coeffs(), &mut evolved);
        for (j, (value, lower)) in u.row(n).iter().zip(&evolved).enumerate() {
            let gap = (-value).max(lower - value);
            if gap > worst {
                worst = gap;
                at = Some((n, j));
            }
        }
    }
    Check::from_worst(worst, at, tol)
}

/// `u(t_n, x_j) ≥ m⌊u⌋ - tol` for `t_n ∈ [t0, t1]` and `x_j ∈ D`.
pub fn harnack_check(
    u: &SpaceTimeField,
    d: &Subdomain,
    window: (f64, f64),
    m: f64,
    tol: f64,
) -> Check {
    let bound = m * u.floor(d);
    let (n0, n1) = u.grid().time_window(window.0, window.1);
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for n in n0..=n1 {
        for j in d.indices() {
            let gap = bound - u.get(n, j);
            if gap > worst {
                worst = gap;
                at = Some((n, j));
            }
        }
    }
    Check::from_worst(worst, at, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SineSeries;
    use core::f64::consts::{FRAC_PI_4, PI};

    fn grid() -> Grid {
        Grid::new(PI, 1.0, 64, 50).unwrap()
    }

    #[test]
    fn snapping_and_windows() {
        let g = grid();
        let d = g.snap_subdomain(FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap();
        assert_eq!((d.j_lo, d.j_hi), (16, 48));
        assert!((d.lo - FRAC_PI_4).abs() < 1e-15);
        assert!(g.snap_subdomain(0.01, 0.02).is_err());
        assert_eq!(g.time_window(0.0, 1.0), (0, 50));
        assert_eq!(g.time_window(0.1, 0.5), (5, 25));
        assert_eq!(g.snap_time(0.509), (25, 0.509 - 0.5));
    }

    #[test]
    fn norms_and_floor() {
        let g = grid();
        let d = g.snap_subdomain(FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap();
        assert_eq!(SpaceTimeField::zeros(g).sup_norm(), 0.0);
        let psi = plateau(&g, &d);
        let field = SpaceTimeField::constant_in_time(g, &psi).scaled(2.5);
        assert_eq!(field.sup_norm(), 2.5);
        assert_eq!(field.floor(&d), 2.5);
        assert_eq!(SpaceTimeField::constant_in_time(g, &psi).floor(&d), 1.0);
        assert!(psi.iter().all(|p| (0.0..=1.0).contains(p)));
        assert_eq!((psi[0], psi[64]), (0.0, 0.0));

        let decay = SpaceTimeField::from_fn(g, |t, x| (-t).exp() * x.sin());
        assert!((decay.sup_norm() - 1.0).abs() < 1e-15);
        assert!((decay.floor(&d) - FRAC_PI_4.sin()).abs() < 1e-15);
    }

    #[test]
    fn cone_membership() {
        let g = grid();
        let tr = Transform::new(PI, 64, 63).unwrap();
        let exact = SpaceTimeField::from_fn(g, |t, x| (-t).exp() * x.sin());
        let c = in_cone(&exact, &tr, 1e-7);
        assert!(c.holds, "{c:?}");
        assert!(c.worst_violation < 1e-12);
        assert!(in_cone(&SpaceTimeField::zeros(g), &tr, 1e-7).holds);

        let mut half = exact.scaled(0.5);
        half.row_mut(0).copy_from_slice(exact.initial());
        let c = in_cone(&half, &tr, 1e-7);
        assert!(!c.holds);
        // largest gap 0.5·e^{-t}·sin x, reached at the first step
        let expected = 0.5 * (-g.dt()).exp();
        assert!((c.worst_violation - expected).abs() < 1e-10, "{c:?}");
        assert_eq!(c.at, Some((1, 32)));
    }

    #[test]
    fn harnack_on_evolved_indicator() {
        let g = Grid::new(PI, 1.0, 128, 100).unwrap();
        let d = g.snap_subdomain(FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap();
        assert!(harnack_check(&SpaceTimeField::zeros(g), &d, (0.0, 1.0), 0.23, 0.0).holds);
        // evolved indicator at t = 1 bounds the evolved indicator on D
        let chi = crate::spectral::project_interval(PI, d.lo, d.hi, 4000);
        let m = chi.apply_semigroup(1.0).unwrap().evaluate(d.lo).unwrap();
        let r = 0.7;
        let evolve = |t: f64| -> SineSeries { chi.scaled(r).apply_semigroup(t.max(0.02)).unwrap() };
        let field = SpaceTimeField::from_fn(g, |t, x| evolve(t).evaluate(x).unwrap());
        let check = harnack_check(&field, &d, (0.0, 1.0), m, 1e-4);
        assert!(check.holds, "{check:?}");
    }
}
