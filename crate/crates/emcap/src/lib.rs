//! Capacity, efficiency and Q-factor analysis of a lossy dielectric sphere
//! radiating into free space.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: spherical Bessel/Hankel functions and their Riccati forms.
//! * [`modes`]: spherical vector wave functions, normalizations and the
//!   closed-form radial integrals.
//! * [`scattering`]: the medium description and the boundary-matching
//!   reflection/transmission coefficients.
//! * [`channel`]: per-mode radiated and consumed power, efficiency and
//!   water-filling capacity.
//! * [`qfactor`]: stored energies and the quality factor of each mode.
//! * [`analysis`]: degrees of freedom, backscattering and gain optimization.
//! * [`sphsample`]: sphere sampling and the Monte-Carlo channel simulation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod error;
pub mod modes;
pub mod par;
pub mod qfactor;
pub mod quad;
pub mod scattering;
pub mod specfun;
pub mod sphsample;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Vacuum speed of light, m/s.
pub const C0: f64 = 299_792_458.0;
/// Vacuum permeability, H/m.
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 1.0 / (MU0 * C0 * C0);
/// Free-space impedance, ohm.
pub const Z0: f64 = MU0 * C0;
