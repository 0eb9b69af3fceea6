//! Spherical Bessel, Neumann and Hankel functions of complex argument.
//!
//! `j_n` is computed by Miller's downward recurrence, normalised against
//! `j_0` or `j_1`, whichever is larger in modulus. `y_n` uses the upward
//! recurrence, which is stable for it. Orders down to -1 are available
//! through [`BesselTable`] because several recurrences reach below zero.

use crate::error::{invalid, Error, Result};
use crate::C64;

const RESCALE: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    First,
    Second,
}

/// `j_0..=j_nmax` at `z`. No argument checks.
pub fn j_values(nmax: usize, z: C64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); nmax + 1];
    if z == C64::new(0.0, 0.0) {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    let az = z.norm();
    let m = (nmax as f64).max(az);
    let start = (m + (40.0 * m).sqrt() + 20.0).ceil() as usize;
    let inv = z.inv();
    let mut hi = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    for k in (1..=start).rev() {
        let next = cur * ((2 * k + 1) as f64) * inv - hi;
        hi = cur;
        cur = next;
        if k - 1 <= nmax {
            out[k - 1] = cur;
        }
        if cur.norm() > RESCALE {
            cur /= RESCALE;
            hi /= RESCALE;
            for v in out.iter_mut().skip(k - 1) {
                *v /= RESCALE;
            }
        }
    }
    let f0 = out[0];
    let f1 = if nmax >= 1 { out[1] } else { hi };
    let (s, c) = (z.sin(), z.cos());
    let scale = if f0.norm() >= f1.norm() {
        safe_div(s * inv, f0)
    } else {
        safe_div(s * inv * inv - c * inv, f1)
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

fn safe_div(a: C64, b: C64) -> C64 {
    let nb = b.norm();
    a * (b.conj() / nb) / nb
}

/// `y_0..=y_nmax` at `z`. Requires `z != 0`.
pub fn y_values(nmax: usize, z: C64) -> Vec<C64> {
    let inv = z.inv();
    let (s, c) = (z.sin(), z.cos());
    let mut out = Vec::with_capacity(nmax + 1);
    let y0 = -c * inv;
    out.push(y0);
    if nmax == 0 {
        return out;
    }
    let y1 = -c * inv * inv - s * inv;
    out.push(y1);
    for k in 1..nmax {
        let next = out[k] * ((2 * k + 1) as f64) * inv - out[k - 1];
        out.push(next);
    }
    out
}

/// Spherical Bessel function of the first kind.
pub fn sph_j(n: i64, z: C64) -> Result<C64> {
    check_arg(z)?;
    match n {
        -1 => {
            if z.norm() == 0.0 {
                return Err(Error::Pole);
            }
            Ok(z.cos() / z)
        }
        n if n < -1 => Err(invalid(format!("order {n} not supported"))),
        n => Ok(j_values(n as usize, z)[n as usize]),
    }
}

/// Spherical Bessel function of the second kind (Neumann function).
pub fn sph_y(n: i64, z: C64) -> Result<C64> {
    check_arg(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Pole);
    }
    match n {
        -1 => Ok(z.sin() / z),
        n if n < -1 => Err(invalid(format!("order {n} not supported"))),
        n => Ok(y_values(n as usize, z)[n as usize]),
    }
}

/// Spherical Hankel function `h_n^{(1)}` or `h_n^{(2)}`.
pub fn sph_h(kind: HankelKind, n: i64, z: C64) -> Result<C64> {
    let j = sph_j(n, z)?;
    let y = sph_y(n, z)?;
    let i = C64::i();
    Ok(match kind {
        HankelKind::First => j + i * y,
        HankelKind::Second => j - i * y,
    })
}

fn check_arg(z: C64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(invalid(format!("non-finite argument {z}")));
    }
    Ok(())
}

/// Values of `j_n`, `y_n` for orders `-1..=nmax` at a single argument.
#[derive(Debug, Clone)]
pub struct BesselTable {
    pub z: C64,
    j: Vec<C64>,
    y: Vec<C64>,
}

impl BesselTable {
    /// Builds the table; `z` must be nonzero.
    pub fn new(nmax: usize, z: C64) -> Result<Self> {
        check_arg(z)?;
        if z.norm() == 0.0 {
            return Err(Error::Pole);
        }
        Ok(Self::new_unchecked(nmax, z))
    }

    pub(crate) fn new_unchecked(nmax: usize, z: C64) -> Self {
        let mut j = Vec::with_capacity(nmax + 2);
        let mut y = Vec::with_capacity(nmax + 2);
        j.push(z.cos() / z);
        y.push(z.sin() / z);
        j.extend(j_values(nmax, z));
        y.extend(y_values(nmax, z));
        BesselTable { z, j, y }
    }

    pub fn nmax(&self) -> usize {
        self.j.len() - 2
    }

    #[inline]
    pub fn j(&self, n: i64) -> C64 {
        self.j[(n + 1) as usize]
    }

    #[inline]
    pub fn y(&self, n: i64) -> C64 {
        self.y[(n + 1) as usize]
    }

    #[inline]
    pub fn h1(&self, n: i64) -> C64 {
        self.j(n) + C64::i() * self.y(n)
    }

    /// `d j_n / dz`, valid for `0 <= n <= nmax`.
    pub fn dj(&self, n: i64) -> C64 {
        self.j(n - 1) - self.j(n) * ((n + 1) as f64) / self.z
    }

    pub fn dy(&self, n: i64) -> C64 {
        self.y(n - 1) - self.y(n) * ((n + 1) as f64) / self.z
    }

    pub fn dh1(&self, n: i64) -> C64 {
        self.h1(n - 1) - self.h1(n) * ((n + 1) as f64) / self.z
    }
}

/// Riccati-Bessel `z j_n(z)` and its derivative.
pub fn riccati_j(n: usize, z: C64) -> Result<(C64, C64)> {
    let t = BesselTable::new(n, z)?;
    let n = n as i64;
    Ok((z * t.j(n), z * t.j(n - 1) - t.j(n) * n as f64))
}

/// Riccati-Hankel `z h_n^{(1)}(z)` and its derivative.
pub fn riccati_h1(n: usize, z: C64) -> Result<(C64, C64)> {
    let t = BesselTable::new(n, z)?;
    let n = n as i64;
    Ok((z * t.h1(n), z * t.h1(n - 1) - t.h1(n) * n as f64))
}

/// `conj(j_m(x)) - e^{-2 i m arg x} j_m(x)`, evaluated without the
/// cancellation a direct subtraction suffers when `arg x` is small.
pub fn j_conj_delta(m: usize, x: C64) -> C64 {
    let rho = x.norm();
    let phi = x.arg();
    if phi == 0.0 || rho == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let use_series = rho < 1.0 || rho + rho.ln() < -phi.abs().ln();
    if !use_series {
        let jm = j_values(m, x)[m];
        return jm.conj() - C64::from_polar(1.0, -2.0 * m as f64 * phi) * jm;
    }
    let mut t = rho.powi(m as i32);
    for k in (1..=2 * m + 1).step_by(2) {
        t /= k as f64;
    }
    let mut sum = 0.0;
    let rho2 = rho * rho;
    for s in 1..400 {
        let sf = s as f64;
        t *= -rho2 / (2.0 * sf * (2.0 * (m as f64) + 2.0 * sf + 1.0));
        let term = t * (2.0 * sf * phi).sin();
        sum += term;
        if s > 3 && term.abs() <= 1e-17 * sum.abs() && (t.abs() < 1e-300 || 2.0 * sf > rho) {
            break;
        }
    }
    C64::from_polar(1.0, -(m as f64) * phi) * C64::new(0.0, -2.0 * sum)
}

/// Near-field (evanescent-region) approximation of `j_n(rho)` for `rho < n`.
pub fn nearfield_j(n: usize, rho: f64) -> Result<f64> {
    let nf = n as f64;
    if !(rho > 0.0 && rho < nf) {
        return Err(Error::Domain(format!("need 0 < rho < n, got rho = {rho}, n = {n}")));
    }
    let s = (nf * nf - rho * rho).sqrt();
    Ok(0.5 / rho * (s + nf * ((nf - s) / rho).ln()).exp() * ((nf - s) / s).sqrt())
}

/// Near-field approximation of `y_n(rho)` for `rho < n`.
pub fn nearfield_y(n: usize, rho: f64) -> Result<f64> {
    let nf = n as f64;
    if !(rho > 0.0 && rho < nf) {
        return Err(Error::Domain(format!("need 0 < rho < n, got rho = {rho}, n = {n}")));
    }
    let s = (nf * nf - rho * rho).sqrt();
    Ok(-1.0 / rho * (-s + nf * ((nf + s) / rho).ln()).exp() * ((nf + s) / s).sqrt())
}

/// Far-region approximation of `|h_n(rho)|` for `rho > n`.
pub fn farfield_hankel_modulus(n: usize, rho: f64) -> Result<f64> {
    let nf = n as f64;
    if rho <= nf {
        return Err(Error::Domain(format!("need rho > n, got rho = {rho}, n = {n}")));
    }
    Ok((rho * (rho * rho - nf * nf).sqrt()).powf(-0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn j_series(n: usize, z: C64) -> C64 {
        let mut t = C64::new(1.0, 0.0);
        for k in 1..=n {
            t = t * z / (2 * k + 1) as f64;
        }
        let mut sum = t;
        for s in 1..200 {
            t = -t * z * z / (2.0 * s as f64 * (2 * n + 2 * s + 1) as f64);
            sum += t;
        }
        sum
    }

    #[test]
    fn low_orders_match_closed_forms() {
        let z = c(2.3, 0.4);
        let t = BesselTable::new(3, z).unwrap();
        let j2 = (3.0 / (z * z) - 1.0) * z.sin() / z - 3.0 * z.cos() / (z * z);
        let y2 = -(3.0 / (z * z) - 1.0) * z.cos() / z - 3.0 * z.sin() / (z * z);
        assert!((t.j(2) - j2).norm() < 1e-14);
        assert!((t.y(2) - y2).norm() < 1e-14);
        assert!((t.j(-1) - z.cos() / z).norm() < 1e-15);
    }

    #[test]
    fn high_order_small_argument_against_series() {
        for &(n, z) in &[(10usize, c(0.3, 0.01)), (25, c(1.5, -0.2)), (5, c(1e-4, 0.0))] {
            let v = sph_j(n as i64, z).unwrap();
            let r = j_series(n, z);
            assert!(((v - r) / r).norm() < 1e-13, "n={n} z={z}: {v} vs {r}");
        }
    }

    #[test]
    fn large_argument_stays_accurate() {
        let z = c(150.0, 3.0);
        let t = BesselTable::new(60, z).unwrap();
        let w = t.j(60) * t.dy(60) - t.dj(60) * t.y(60);
        assert!((w * z * z - 1.0).norm() < 1e-10);
    }

    #[test]
    fn y_pole_is_reported() {
        assert_eq!(sph_y(2, c(0.0, 0.0)), Err(Error::Pole));
        assert_eq!(sph_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn delta_matches_direct_subtraction_when_well_conditioned() {
        let x = c(3.0, 0.2);
        for m in 0..6 {
            let jm = sph_j(m as i64, x).unwrap();
            let direct = sph_j(m as i64, x.conj()).unwrap()
                - C64::from_polar(1.0, -2.0 * m as f64 * x.arg()) * jm;
            assert!((j_conj_delta(m, x) - direct).norm() < 1e-13 * jm.norm());
        }
    }

    #[test]
    fn nearfield_forms_track_exact_values() {
        let j = nearfield_j(40, 20.0).unwrap();
        let y = nearfield_y(40, 20.0).unwrap();
        let t = BesselTable::new(40, c(20.0, 0.0)).unwrap();
        assert!((j / t.j(40).re - 1.0).abs() < 0.03);
        assert!((y / t.y(40).re - 1.0).abs() < 0.01);
        assert!(nearfield_j(10, 12.0).is_err());
    }

    proptest! {
        #[test]
        fn wronskian_holds(n in 0usize..30, re in 0.05f64..60.0, frac in -0.3f64..0.3) {
            let z = c(re, re * frac);
            let t = BesselTable::new(n, z).unwrap();
            let nn = n as i64;
            let w = t.j(nn) * t.dy(nn) - t.dj(nn) * t.y(nn);
            let scale = (t.j(nn) * t.dy(nn)).norm().max((t.dj(nn) * t.y(nn)).norm()) * (z * z).norm();
            prop_assert!((w * z * z - 1.0).norm() < 1e-10 * scale.max(1.0));
        }

        #[test]
        fn riccati_wronskian(n in 1usize..20, re in 0.1f64..40.0) {
            let z = c(re, 0.0);
            let (jv, jd) = riccati_j(n, z).unwrap();
            let (hv, hd) = riccati_h1(n, z).unwrap();
            let w = jv * hd - jd * hv;
            prop_assert!((w - C64::i()).norm() < 1e-9 * hv.norm().max(1.0));
        }
    }
}
