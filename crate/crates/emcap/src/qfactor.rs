//! Stored energies and quality factors of the spherical modes.
//!
//! All energy terms are normalised as `2 omega W / P_rad`. The interior terms
//! come from the closed forms when those are well conditioned and from radial
//! quadrature of the interior fields otherwise.

use crate::channel::ModeSolution;
use crate::error::{invalid, Result};
use crate::modes::star_integrals_quadrature;
use crate::scattering::{check_mode, check_radius, Medium};
use crate::specfun::BesselTable;
use crate::{C64, MU0};

/// Loss tangent substituted for lossless media when evaluating Q.
pub const LOSSLESS_PROXY_TAN_DELTA: f64 = 1e-10;

const CLOSED_FORM_MAX_CANCELLATION: f64 = 1e6;

/// Collin's external-energy function
/// `A_n(z) = -(z^3/2)(|h_n|^2 - j_{n+1} j_{n-1} - y_{n+1} y_{n-1} - 2/z^2)`.
pub fn collin_a(n: usize, z: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(invalid(format!("need z > 0, got {z}")));
    }
    let t = BesselTable::new(n + 1, C64::new(z, 0.0))?;
    let ni = n as i64;
    let s = t.h1(ni).norm_sqr() - (t.j(ni + 1) * t.j(ni - 1)).re - (t.y(ni + 1) * t.y(ni - 1)).re - 2.0 / (z * z);
    Ok(-0.5 * z * z * z * s)
}

/// Chu's bound `1/z^3 + 1/z`.
pub fn chu_limit(z: f64) -> f64 {
    1.0 / (z * z * z) + 1.0 / z
}

/// External (outside the sphere) terms `(q_e_out, q_m_out)` of mode `(n, l)`
/// at `z = k0 R1`.
pub fn external_q_terms(n: usize, l: u8, z: f64) -> Result<(f64, f64)> {
    check_mode(n, l)?;
    let an = collin_a(n, z)?;
    let mixed = ((n + 1) as f64 * collin_a(n - 1, z)? + n as f64 * collin_a(n + 1, z)?) / (2 * n + 1) as f64;
    Ok(if l == 1 { (an, mixed) } else { (mixed, an) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    ClosedForm,
    Quadrature,
}

/// Interior stored energies of mode `(n, l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalEnergies {
    /// `2 omega W_e / P_rad`
    pub q_e_in: f64,
    /// `2 omega W_m / P_rad`
    pub q_m_in: f64,
    /// Stored electric energy per unit `|J|^2`, joules.
    pub w_e: f64,
    /// Stored magnetic energy per unit `|J|^2`, joules.
    pub w_m: f64,
    pub method: EnergyMethod,
}

/// Closed-form `X` and `Y` with their cancellation ratios.
fn closed_form_xy(s: &ModeSolution) -> Result<(f64, f64, f64, f64)> {
    let kp = s.k1.re;
    let kpp = s.k1.im;
    let f = s.def.f;
    let b = s.b;
    let cross = (f * s.i_jj).re / (2.0 * kp * kpp * s.i_jj_star);
    let x = f.norm_sqr() + b * b + cross;
    let x_scale = f.norm_sqr() + b * b + cross.abs();

    let other = 3 - s.l;
    let (jj_star_o, _) = star_integrals_quadrature(s.n, other, s.k1, s.r1)?;
    let jj_o = crate::modes::radial_integrals(s.n, other, s.k1, s.r1)?.jj;
    let k2 = s.k1.norm_sqr();
    let sq = (k2 * f.norm_sqr() + k2 * b * b) * jj_star_o / s.i_jj_star;
    let cross_m = (s.k1 * s.k1 * f * jj_o).re / (2.0 * kp * kpp * s.i_jj_star);
    let y = sq + cross_m;
    let y_scale = sq + cross_m.abs();
    Ok((x, x_scale / x.abs(), y, y_scale / y.abs()))
}

fn energies_of(s: &ModeSolution, eps_r: f64) -> Result<InternalEnergies> {
    let (xc, cx, yc, cy) = closed_form_xy(s)?;
    let good = cx < CLOSED_FORM_MAX_CANCELLATION && cy < CLOSED_FORM_MAX_CANCELLATION && xc > 0.0 && yc > 0.0;
    let (x, y, method) = if good {
        (xc, yc, EnergyMethod::ClosedForm)
    } else {
        (s.x_e, s.y_m, EnergyMethod::Quadrature)
    };
    let q_e_in = s.k0 * s.k0 * eps_r * x / s.rho;
    let q_m_in = y / s.rho;
    Ok(InternalEnergies {
        q_e_in,
        q_m_in,
        w_e: 0.25 * MU0 * s.k0 * s.k0 * eps_r * x,
        w_m: 0.25 * MU0 * y,
        method,
    })
}

fn solve(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<(ModeSolution, Medium)> {
    check_mode(n, l)?;
    check_radius(r1)?;
    let m = if medium.is_lossless() { medium.with_tan_delta(LOSSLESS_PROXY_TAN_DELTA)? } else { *medium };
    Ok((ModeSolution::new(n, l, &m, r1)?, m))
}

/// Interior stored energies; lossless media use a `1e-10` loss-tangent proxy.
pub fn internal_energies(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<InternalEnergies> {
    let (s, m) = solve(n, l, medium, r1)?;
    energies_of(&s, m.eps_r)
}

/// Full Q-factor breakdown of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBreakdown {
    pub n: usize,
    pub l: u8,
    pub eta: f64,
    pub q_e_in: f64,
    pub q_m_in: f64,
    pub q_e_out: f64,
    pub q_m_out: f64,
    /// `max(q_e_in + q_e_out, q_m_in + q_m_out)`
    pub q_tilde: f64,
    /// `eta * q_tilde`
    pub q: f64,
    pub method: EnergyMethod,
}

pub fn quality_factor(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<QBreakdown> {
    let (s, m) = solve(n, l, medium, r1)?;
    let e = energies_of(&s, m.eps_r)?;
    let (q_e_out, q_m_out) = external_q_terms(n, l, s.k0 * r1)?;
    let q_tilde = (e.q_e_in + q_e_out).max(e.q_m_in + q_m_out);
    let eta = s.eta();
    Ok(QBreakdown {
        n,
        l,
        eta,
        q_e_in: e.q_e_in,
        q_m_in: e.q_m_in,
        q_e_out,
        q_m_out,
        q_tilde,
        q: eta * q_tilde,
        method: e.method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collin_first_order_closed_forms() {
        for &z in &[0.01, 0.05, 1.0, 7.0] {
            assert!((collin_a(1, z).unwrap() * z - 1.0).abs() < 1e-10);
            let mix = (2.0 * collin_a(0, z).unwrap() + collin_a(2, z).unwrap()) / 3.0;
            assert!((mix / chu_limit(z) - 1.0).abs() < 1e-10, "z={z}: {mix}");
        }
    }

    #[test]
    fn q_reference_values() {
        // 60-digit evaluations of the closed forms
        let m = Medium::new(16.8e9, 16.0, 1e-4).unwrap();
        let r1 = 0.05 / m.k0();
        let cases = [
            (1usize, 1u8, 33914.0140814, 34380.4551021),
            (1, 2, 9731.61890773, 71795.6890118),
            (3, 1, 8711573.74912, 3.30181266151e12),
            (3, 2, 10833.7665312, 1.12322284863e13),
        ];
        for (n, l, q, qt) in cases {
            let b = quality_factor(n, l, &m, r1).unwrap();
            assert!((b.q / q - 1.0).abs() < 1e-8, "n={n} l={l}: {}", b.q);
            assert!((b.q_tilde / qt - 1.0).abs() < 1e-8, "n={n} l={l}: {}", b.q_tilde);
        }
    }

    #[test]
    fn closed_form_and_quadrature_agree() {
        let m = Medium::new(16.8e9, 16.0, 1e-2).unwrap();
        let s = ModeSolution::new(2, 1, &m, 5e-3).unwrap();
        let (x, _, y, _) = closed_form_xy(&s).unwrap();
        assert!((x / s.x_e - 1.0).abs() < 1e-9);
        assert!((y / s.y_m - 1.0).abs() < 1e-9);
    }
}
