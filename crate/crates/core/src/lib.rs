//! Spectral heat-semigroup engine and fixed-point certificates for
//! reaction-diffusion systems with nonlocal initial conditions on `[0, L]`.
//!
//! The crate is `no_std` with `alloc`; enable `std` only for convenience in
//! downstream code. Transcendental functions go through `libm`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod certificates;
pub mod constants;
pub mod expr;
pub mod field;
pub mod operators;
pub mod solver;
pub mod spectral;

pub use constants::{ConstantsBundle, ConstantsConfig, GrowthBounds, Thresholds};
pub use expr::{Expression, Point, Var};
pub use field::{Grid, SpaceTimeField, Subdomain};
pub use spectral::{DomainGeometry, SineSeries, Transform};
