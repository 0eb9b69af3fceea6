//! Medium description and boundary-matching coefficients of the sphere.

use crate::error::{invalid, Error, Result};
use crate::specfun::BesselTable;
use crate::{C0, C64, MU0};

/// Loss tangents below this value are treated as exactly lossless.
pub const LOSSLESS_THRESHOLD: f64 = 1e-12;

/// Homogeneous dielectric filling the source sphere, at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    pub f_c: f64,
    pub eps_r: f64,
    pub tan_delta: f64,
}

impl Medium {
    pub fn new(f_c: f64, eps_r: f64, tan_delta: f64) -> Result<Self> {
        if !(f_c.is_finite() && f_c > 0.0) {
            return Err(invalid(format!("frequency must be positive, got {f_c}")));
        }
        if !(eps_r.is_finite() && eps_r > 0.0) {
            return Err(invalid(format!("eps_r must be positive, got {eps_r}")));
        }
        if !(tan_delta.is_finite() && tan_delta >= 0.0) {
            return Err(invalid(format!("tan_delta must be non-negative, got {tan_delta}")));
        }
        Ok(Medium { f_c, eps_r, tan_delta })
    }

    pub fn with_tan_delta(&self, tan_delta: f64) -> Result<Self> {
        Medium::new(self.f_c, self.eps_r, tan_delta)
    }

    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_c
    }

    pub fn wavelength(&self) -> f64 {
        C0 / self.f_c
    }

    pub fn k0(&self) -> f64 {
        self.omega() / C0
    }

    /// `omega * mu0`.
    pub fn omega_mu0(&self) -> f64 {
        self.omega() * MU0
    }

    pub fn is_lossless(&self) -> bool {
        self.tan_delta < LOSSLESS_THRESHOLD
    }

    /// Complex wavenumber `k0 sqrt(eps_r (1 + i tan_delta))`; real below the
    /// lossless threshold.
    pub fn k1(&self) -> C64 {
        if self.is_lossless() {
            return C64::new(self.k0() * self.eps_r.sqrt(), 0.0);
        }
        C64::new(self.eps_r, self.eps_r * self.tan_delta).sqrt() * self.k0()
    }

    /// Contrast `k1 / k0`.
    pub fn contrast(&self) -> C64 {
        self.k1() / self.k0()
    }
}

/// Which family a spherical mode belongs to: `l = 1` (magnetic-type angular
/// dependence `A1`) or `l = 2`.
pub(crate) fn check_mode(n: usize, l: u8) -> Result<()> {
    if n == 0 {
        return Err(invalid("mode order n must be at least 1"));
    }
    if l != 1 && l != 2 {
        return Err(invalid(format!("mode type l must be 1 or 2, got {l}")));
    }
    Ok(())
}

pub(crate) fn check_radius(r1: f64) -> Result<()> {
    if !(r1.is_finite() && r1 > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r1}")));
    }
    Ok(())
}

/// Reflection (`r`) and transmission (`t`) coefficients of mode `(n, l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCoeffs {
    pub n: usize,
    pub l: u8,
    pub r: C64,
    pub t: C64,
    /// `1 + r`, formed without cancellation.
    pub one_plus_r: C64,
}

/// Solves the tangential boundary conditions at `R1` for mode `(n, l)`.
pub fn scattering_coeffs(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<ScatterCoeffs> {
    check_mode(n, l)?;
    check_radius(r1)?;
    let z = C64::new(medium.k0() * r1, 0.0);
    let c = medium.contrast();
    let cz = c * z;
    let out = BesselTable::new(n, z)?;
    let inn = BesselTable::new(n, cz)?;
    let ni = n as i64;
    let nf = n as f64;
    let hz = z * out.h1(ni);
    let dhz = z * out.h1(ni - 1) - out.h1(ni) * nf;
    let jc = cz * inn.j(ni);
    let djc = cz * inn.j(ni - 1) - inn.j(ni) * nf;
    let hc = cz * inn.h1(ni);
    let dhc = cz * inn.h1(ni - 1) - inn.h1(ni) * nf;
    let yc = cz * inn.y(ni);
    let dyc = cz * inn.y(ni - 1) - inn.y(ni) * nf;
    let (den, num, rest) = if l == 1 {
        (jc * dhz - c * djc * hz, c * hz * dhc - dhz * hc, c * hz * dyc - dhz * yc)
    } else {
        (c * jc * dhz - djc * hz, hz * dhc - c * dhz * hc, hz * dyc - c * dhz * yc)
    };
    if !(den.norm() >= 1e-300) || !den.re.is_finite() {
        return Err(Error::Resonance { n, l, z: z.re });
    }
    Ok(ScatterCoeffs { n, l, r: num / den, t: C64::i() / den, one_plus_r: C64::i() * rest / den })
}
