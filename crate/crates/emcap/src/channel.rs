//! Per-mode power bookkeeping of the source sphere and the resulting
//! single-user channel: efficiency, gains and water-filling capacity.
//!
//! [`ModeSolution`] evaluates everything for one `(n, l)`. The consumed power
//! `tau` is assembled as radiated power plus the ohmic loss integral of the
//! interior field, which keeps full relative accuracy as `tan_delta -> 0`;
//! [`mode_powers_closed_form`] evaluates the compact closed form directly.

use crate::error::{invalid, Error, Result};
use crate::modes::{
    calligraphic_e, components, radial_integrals, shift_weights, shifted_conj_difference,
    star_integrands, FieldKind, RadialIntegrals,
};
use crate::par::{self, Execution};
use crate::quad::{composite_rule, panels_for};
use crate::scattering::{check_mode, check_radius, scattering_coeffs, Medium, ScatterCoeffs, LOSSLESS_THRESHOLD};
use crate::specfun::BesselTable;
use crate::C64;
use std::f64::consts::PI;

/// The `D`, `E`, `F` coefficients of the interior field of mode `(n, l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDef {
    pub d: C64,
    pub e: C64,
    pub f: C64,
}

/// Everything the power and energy bookkeeping needs for one mode.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub n: usize,
    pub l: u8,
    pub r1: f64,
    pub k0: f64,
    pub k1: C64,
    pub omega_mu0: f64,
    pub scatter: ScatterCoeffs,
    /// Closed-form `I^{jj}`.
    pub i_jj: C64,
    /// `I^{jj*}` and `I^{yj*}` by quadrature.
    pub i_jj_star: f64,
    pub i_yj_star: C64,
    /// `1 / (4 k' k'')`
    pub b: f64,
    pub def: ModeDef,
    pub rho: f64,
    pub tau: f64,
    /// `(1/N^2) int |F V(k1) + b V(k1*)|^2`
    pub x_e: f64,
    /// `(1/N^2) int |k1 F V'(k1) + k1* b V'(k1*)|^2` with `V'` of type `3 - l`
    pub y_m: f64,
}

impl ModeSolution {
    /// Requires a lossy medium (`tan_delta >= 1e-12`).
    pub fn new(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<Self> {
        check_mode(n, l)?;
        check_radius(r1)?;
        if medium.is_lossless() {
            return Err(Error::LosslessBranchRequired);
        }
        let k1 = medium.k1();
        let k0 = medium.k0();
        let scatter = scattering_coeffs(n, l, medium, r1)?;
        let i_jj = radial_integrals(n, l, k1, r1)?.jj;
        let b = 1.0 / (4.0 * k1.re * k1.im);
        let e = calligraphic_e(n, l, k1)?;

        let rule = composite_rule(0.0, r1, panels_for(k1.norm(), r1), 32);
        let tables: Vec<BesselTable> = rule
            .iter()
            .map(|&(x, _)| BesselTable::new(n + 1, k1 * x))
            .collect::<Result<_>>()?;
        let mut i_jj_star = 0.0;
        let mut i_yj_star = C64::new(0.0, 0.0);
        for (&(x, w), t) in rule.iter().zip(&tables) {
            let (a, c) = star_integrands(n, l, t);
            i_jj_star += w * x * x * a;
            i_yj_star += c * (w * x * x);
        }
        let d = k1 * (scatter.one_plus_r * i_jj_star + C64::i() * i_yj_star);
        let f = d - e * b;

        let mut sol = ModeSolution {
            n,
            l,
            r1,
            k0,
            k1,
            omega_mu0: medium.omega_mu0(),
            scatter,
            i_jj,
            i_jj_star,
            i_yj_star,
            b,
            def: ModeDef { d, e, f },
            rho: 0.0,
            tau: 0.0,
            x_e: 0.0,
            y_m: 0.0,
        };
        let mut xe = 0.0;
        let mut ym = 0.0;
        for (&(x, w), t) in rule.iter().zip(&tables) {
            let g = sol.radial_source(t, l, 0);
            let h = sol.radial_source(t, 3 - l, 1);
            xe += w * x * x * g.iter().map(|v| v.norm_sqr()).sum::<f64>();
            ym += w * x * x * h.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let n2 = sol.norm_sq();
        sol.x_e = xe / n2;
        sol.y_m = k1.norm_sqr() * ym / n2;
        sol.rho = i_jj_star * (k1 * scatter.t).norm_sqr() / k0;
        sol.tau = sol.rho + 2.0 * k1.re * k1.im * sol.x_e;
        if !(sol.tau > 0.0 && sol.tau.is_finite() && sol.rho.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-positive consumed power for n = {n}, l = {l}: tau = {}",
                sol.tau
            )));
        }
        Ok(sol)
    }

    /// `N^2 = n(n+1) I^{jj*}`.
    pub fn norm_sq(&self) -> f64 {
        (self.n * (self.n + 1)) as f64 * self.i_jj_star
    }

    pub fn eta(&self) -> f64 {
        self.rho / self.tau
    }

    /// Radial factors of `D V_fam + b (E_q V_fam(k*) - E V_fam)` on `(A1, A2, A3)`.
    fn radial_source(&self, t: &BesselTable, fam: u8, q: i64) -> [C64; 3] {
        let w = shift_weights(self.n, self.l);
        let ni = self.n as i64;
        let g = |m: i64| {
            let jm = t.j(m);
            self.def.d * jm + shifted_conj_difference(m, q, &w, t.z, jm) * self.b
        };
        let c = ((self.n * (self.n + 1)) as f64).sqrt();
        let zero = C64::new(0.0, 0.0);
        if fam == 1 {
            return [g(ni) * c, zero, zero];
        }
        let tn = (2 * self.n + 1) as f64;
        let (lo, hi) = (g(ni - 1), g(ni + 1));
        [zero, (lo + hi) * (c * c / tn), (lo * (self.n + 1) as f64 - hi * self.n as f64) * (c / tn)]
    }

    /// Radial factors on `(A1, A2, A3)` of the interior field at radius `r`
    /// per unit current coefficient.
    pub fn interior_radial(&self, r: f64, kind: FieldKind) -> [C64; 3] {
        let t = BesselTable::new_unchecked(self.n + 1, self.k1 * r);
        let nn = self.norm_sq().sqrt();
        match kind {
            FieldKind::Electric => {
                let s = -self.omega_mu0 / nn;
                self.radial_source(&t, self.l, 0).map(|v| v * s)
            }
            FieldKind::Magnetic => {
                let s = C64::i() * self.k1 / nn;
                self.radial_source(&t, 3 - self.l, 1).map(|v| v * s)
            }
        }
    }
}

/// `D`, `E`, `F` for a lossy medium.
pub fn mode_def(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<ModeDef> {
    Ok(ModeSolution::new(n, l, medium, r1)?.def)
}

/// Radiated (`rho`) and consumed (`tau`) power of mode `(n, l)` per unit
/// `omega mu0 |J|^2 / 2`. Lossless media dispatch to
/// [`lossless_mode_powers`].
pub fn mode_powers(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<(f64, f64)> {
    if medium.is_lossless() {
        return lossless_mode_powers(n, l, medium, r1);
    }
    let s = ModeSolution::new(n, l, medium, r1)?;
    if cfg!(debug_assertions) && medium.tan_delta <= 1e-9 {
        let (_, t0) = lossless_mode_powers(n, l, &medium.with_tan_delta(0.0)?, r1)?;
        debug_assert!(
            (s.tau - t0).abs() <= 1e-4 * t0,
            "lossy/lossless mismatch at tan_delta = {}: {} vs {}",
            medium.tan_delta,
            s.tau,
            t0
        );
    }
    Ok((s.rho, s.tau))
}

/// Efficiency `rho / tau` of mode `(n, l)`.
pub fn mode_efficiency(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<f64> {
    let (rho, tau) = mode_powers(n, l, medium, r1)?;
    Ok(rho / tau)
}

/// The compact closed forms `rho = I^{jj*} |k1 T|^2 / k0` and
/// `tau = Re(F I^{jj}) / I^{jj*} + b`, with every integral in closed form.
/// Accurate only while `tan_delta` is not too small.
pub fn mode_powers_closed_form(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<(f64, f64)> {
    check_mode(n, l)?;
    check_radius(r1)?;
    if medium.is_lossless() {
        return Err(Error::LosslessBranchRequired);
    }
    let k1 = medium.k1();
    let s = scattering_coeffs(n, l, medium, r1)?;
    let ri: RadialIntegrals = radial_integrals(n, l, k1, r1)?;
    let b = 1.0 / (4.0 * k1.re * k1.im);
    let d = k1 * (s.one_plus_r * ri.jj_star + C64::i() * ri.yj_star);
    let f = d - calligraphic_e(n, l, k1)? * b;
    let rho = ri.jj_star * (k1 * s.t).norm_sqr() / medium.k0();
    let tau = (f * ri.jj).re / ri.jj_star + b;
    if !(tau > 0.0) {
        return Err(Error::Numerical(format!("closed-form tau = {tau} is not positive")));
    }
    Ok((rho, tau))
}

/// Lossless branch: `tau = k1 I^{jj} Re(1 + R)`, `rho = I^{jj} k1^2 |T|^2 / k0`.
pub fn lossless_mode_powers(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<(f64, f64)> {
    check_mode(n, l)?;
    if medium.tan_delta >= LOSSLESS_THRESHOLD {
        return Err(Error::WrongBranch(medium.tan_delta));
    }
    let k1 = medium.k1();
    let s = scattering_coeffs(n, l, medium, r1)?;
    let ri = radial_integrals(n, l, k1, r1)?;
    let tau = k1.re * ri.jj.re * s.one_plus_r.re;
    let rho = ri.jj.re * k1.re * k1.re * s.t.norm_sqr() / medium.k0();
    if !(tau > 0.0) {
        return Err(Error::Numerical(format!("lossless tau = {tau} is not positive")));
    }
    Ok((rho, tau))
}

/// The noise statistic `F I^{jj} / I^{jj*} + b` of the reverse channel; its
/// real part is `tau`.
pub fn noise_statistic_closed_form(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<C64> {
    let s = ModeSolution::new(n, l, medium, r1)?;
    Ok(s.def.f * s.i_jj / s.i_jj_star + s.b)
}

/// `-i <v, G v>` over the source sphere by direct nested quadrature of the
/// Green function expansion. Slow; meant for verification.
pub fn noise_statistic_quadrature(n: usize, l: u8, medium: &Medium, r1: f64) -> Result<C64> {
    let s = ModeSolution::new(n, l, medium, r1)?;
    let k1 = s.k1;
    let comps = components(n, l);
    let eval = |x: f64| -> (C64, C64, C64, f64, f64) {
        let t = BesselTable::new_unchecked(n + 1, k1 * x);
        let mut a = C64::new(0.0, 0.0);
        let mut bb = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        let mut e = 0.0;
        let mut radial2 = 0.0;
        for (i, (w, cs)) in comps.iter().enumerate() {
            let jv: C64 = cs.iter().map(|&(c, m)| t.j(m) * c).sum();
            let yv: C64 = cs.iter().map(|&(c, m)| t.y(m) * c).sum();
            let out = C64::i() * yv + s.scatter.one_plus_r * jv;
            a += jv.conj() * out * *w;
            bb += jv * jv * *w;
            d += out * jv * *w;
            e += w * jv.norm_sqr();
            if l == 2 && i == 0 {
                radial2 = w * jv.norm_sqr();
            }
        }
        (a, bb, d, e, radial2)
    };
    let outer = composite_rule(0.0, r1, panels_for(k1.norm(), r1), 32);
    let mut first = C64::new(0.0, 0.0);
    let mut second = C64::new(0.0, 0.0);
    let mut delta = 0.0;
    for &(x, w) in &outer {
        let inner = composite_rule(0.0, x, panels_for(k1.norm(), x), 32);
        let mut cb = C64::new(0.0, 0.0);
        let mut ce = 0.0;
        for &(xi, wi) in &inner {
            let (_, bb, _, e, _) = eval(xi);
            cb += bb * (wi * xi * xi);
            ce += wi * xi * xi * e;
        }
        let (a, _, d, _, r2) = eval(x);
        first += a * cb * (w * x * x);
        second += d * ce * (w * x * x);
        delta += w * x * x * r2;
    }
    let n2 = s.norm_sq();
    let nn1 = (n * (n + 1)) as f64;
    Ok(k1 / (nn1 * n2) * (first + second) + C64::i() / (k1 * k1) * (delta / n2))
}

/// Configuration of the single-user channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub medium: Medium,
    pub r1: f64,
    pub n_max: usize,
    /// Receiver sampling density `K / (k0 R2)^2`.
    pub alpha: f64,
    /// `4 k_B T B`.
    pub noise_floor: f64,
    /// Transmit power budget.
    pub power: f64,
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        check_radius(self.r1)?;
        if self.n_max == 0 {
            return Err(invalid("n_max must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.noise_floor > 0.0 && self.noise_floor.is_finite()) {
            return Err(invalid(format!("noise floor must be positive, got {}", self.noise_floor)));
        }
        if !(self.power >= 0.0 && self.power.is_finite()) {
            return Err(invalid(format!("power must be non-negative, got {}", self.power)));
        }
        Ok(())
    }
}

/// Squared channel gain `h^2 = 3 alpha eta / (4 k_B T B)` of mode `(n, l)`.
pub fn mode_gain(spec: &ChannelSpec, n: usize, l: u8) -> Result<f64> {
    spec.validate()?;
    let eta = mode_efficiency(n, l, &spec.medium, spec.r1)?;
    Ok(gain_from_eta(spec, eta))
}

fn gain_from_eta(spec: &ChannelSpec, eta: f64) -> f64 {
    3.0 * spec.alpha * eta / spec.noise_floor
}

/// One `(n, l)` class of the channel; all `2n + 1` values of `m` share it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeChannel {
    pub n: usize,
    pub l: u8,
    pub rho: f64,
    pub tau: f64,
    pub eta: f64,
    pub gain_sq: f64,
    pub multiplicity: usize,
}

pub fn mode_channel(spec: &ChannelSpec, n: usize, l: u8) -> Result<ModeChannel> {
    spec.validate()?;
    let (rho, tau) = mode_powers(n, l, &spec.medium, spec.r1)?;
    let eta = rho / tau;
    Ok(ModeChannel { n, l, rho, tau, eta, gain_sq: gain_from_eta(spec, eta), multiplicity: 2 * n + 1 })
}

/// All `(n, l)` classes with `n <= n_max`.
pub fn mode_channels(spec: &ChannelSpec, exec: Execution) -> Result<Vec<ModeChannel>> {
    spec.validate()?;
    let idx: Vec<(usize, u8)> = (1..=spec.n_max).flat_map(|n| [(n, 1u8), (n, 2u8)]).collect();
    par::map(exec, &idx, |&(n, l)| mode_channel(spec, n, l)).into_iter().collect()
}

/// Water-filling input: a squared gain shared by `multiplicity` parallel
/// channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainClass {
    pub gain_sq: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Water level `1 / lambda`.
    pub water_level: f64,
    /// Power per channel in each class (same order as the input).
    pub powers: Vec<f64>,
    /// Capacity in nats per channel use.
    pub capacity: f64,
}

impl CapacityResult {
    pub fn capacity_bits(&self) -> f64 {
        self.capacity / std::f64::consts::LN_2
    }

    /// Number of channels that receive power.
    pub fn active_channels(&self, classes: &[GainClass]) -> usize {
        self.powers.iter().zip(classes).filter(|(p, _)| **p > 0.0).map(|(_, c)| c.multiplicity).sum()
    }
}

/// Water-filling allocation of `power` over parallel Gaussian channels.
/// Bisection on the water level; channels exactly at the level receive
/// nothing.
pub fn waterfill(power: f64, classes: &[GainClass]) -> Result<CapacityResult> {
    if classes.is_empty() {
        return Err(invalid("no channels to allocate over"));
    }
    if !(power >= 0.0 && power.is_finite()) {
        return Err(invalid(format!("power must be non-negative, got {power}")));
    }
    for c in classes {
        if !(c.gain_sq > 0.0 && c.gain_sq.is_finite()) || c.multiplicity == 0 {
            return Err(invalid(format!("invalid channel class {c:?}")));
        }
    }
    if power == 0.0 {
        return Ok(CapacityResult { water_level: 0.0, powers: vec![0.0; classes.len()], capacity: 0.0 });
    }
    let inv: Vec<f64> = classes.iter().map(|c| 1.0 / c.gain_sq).collect();
    let used = |mu: f64| -> f64 {
        classes.iter().zip(&inv).map(|(c, &v)| c.multiplicity as f64 * (mu - v).max(0.0)).sum()
    };
    let mut lo = inv.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = inv.iter().cloned().fold(0.0, f64::max) + power;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if used(mid) > power {
            hi = mid;
        } else {
            lo = mid;
        }
        if (used(hi) - power).abs() <= 1e-13 * power && (used(lo) - power).abs() <= 1e-13 * power {
            break;
        }
    }
    let mu = if (used(hi) - power).abs() < (used(lo) - power).abs() { hi } else { lo };
    let powers: Vec<f64> = inv.iter().map(|&v| (mu - v).max(0.0)).collect();
    let capacity = classes
        .iter()
        .zip(&powers)
        .map(|(c, &p)| c.multiplicity as f64 * (p * c.gain_sq).ln_1p())
        .sum();
    Ok(CapacityResult { water_level: mu, powers, capacity })
}

/// Capacity of the source sphere with all modes up to `n_max`.
pub fn capacity(spec: &ChannelSpec, exec: Execution) -> Result<(Vec<ModeChannel>, CapacityResult)> {
    let modes = mode_channels(spec, exec)?;
    let classes: Vec<GainClass> =
        modes.iter().map(|m| GainClass { gain_sq: m.gain_sq, multiplicity: m.multiplicity }).collect();
    let res = waterfill(spec.power, &classes)?;
    Ok((modes, res))
}

/// Closed-form capacity of the lossless sphere with all `2 N (N + 2)` modes
/// at unit efficiency: `2N(N+2) ln(1 + P h^2 / (2N(N+2)))`.
pub fn capacity_lossless(spec: &ChannelSpec) -> Result<f64> {
    spec.validate()?;
    if spec.medium.tan_delta >= LOSSLESS_THRESHOLD {
        return Err(Error::WrongBranch(spec.medium.tan_delta));
    }
    let dof = (2 * spec.n_max * (spec.n_max + 2)) as f64;
    let h2 = gain_from_eta(spec, 1.0);
    Ok(dof * (spec.power * h2 / dof).ln_1p())
}

/// Per-point field noise variance at the receiver sphere,
/// `4 k_B T B omega mu0 k0 / (6 pi)`.
pub fn field_noise_variance(noise_floor: f64, medium: &Medium) -> f64 {
    noise_floor * medium.omega_mu0() * medium.k0() / (6.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn medium(td: f64) -> Medium {
        Medium::new(16.8e9, 16.0, td).unwrap()
    }

    #[test]
    fn closed_form_agrees_when_well_conditioned() {
        let m = medium(1e-2);
        for n in 1..5 {
            for l in [1u8, 2] {
                let (r0, t0) = mode_powers(n, l, &m, 5e-3).unwrap();
                let (r1, t1) = mode_powers_closed_form(n, l, &m, 5e-3).unwrap();
                assert!((r0 / r1 - 1.0).abs() < 1e-10);
                assert!((t0 / t1 - 1.0).abs() < 1e-9, "n={n} l={l}: {t0} {t1}");
            }
        }
    }

    #[test]
    fn efficiency_reference_values() {
        // values from 60-digit evaluation of the closed forms
        let m = medium(1e-4);
        let r1 = 0.05 / m.k0();
        let cases = [(1usize, 1u8, 0.986432959676), (1, 2, 0.135546006197), (3, 1, 2.63842157088e-6), (3, 2, 9.64525120235e-10)];
        for (n, l, eta) in cases {
            let e = mode_efficiency(n, l, &m, r1).unwrap();
            assert!((e / eta - 1.0).abs() < 1e-9, "n={n} l={l}: {e}");
        }
    }

    #[test]
    fn lossless_efficiency_is_one() {
        let m = medium(0.0);
        for n in 1..6 {
            for l in [1u8, 2] {
                let (rho, tau) = mode_powers(n, l, &m, 3e-3).unwrap();
                assert!((rho / tau - 1.0).abs() < 1e-8);
            }
        }
        assert_eq!(lossless_mode_powers(1, 1, &medium(1e-3), 1e-3), Err(Error::WrongBranch(1e-3)));
        assert_eq!(ModeSolution::new(1, 1, &m, 1e-3).unwrap_err(), Error::LosslessBranchRequired);
    }

    #[test]
    fn waterfill_examples() {
        let c = [GainClass { gain_sq: 1.0, multiplicity: 1 }; 2];
        let r = waterfill(2.0, &c).unwrap();
        assert!((r.powers[0] - 1.0).abs() < 1e-12 && (r.powers[1] - 1.0).abs() < 1e-12);
        assert!((r.capacity - 2.0 * 2f64.ln()).abs() < 1e-12);
        let c = [GainClass { gain_sq: 1.0, multiplicity: 1 }, GainClass { gain_sq: 0.01, multiplicity: 1 }];
        let r = waterfill(1.0, &c).unwrap();
        assert_eq!(r.powers[1], 0.0);
        assert!((r.capacity - 2f64.ln()).abs() < 1e-12);
        assert!(waterfill(1.0, &[]).is_err());
        assert_eq!(waterfill(0.0, &c).unwrap().capacity, 0.0);
    }

    #[test]
    fn lossless_capacity_closed_form() {
        let spec = ChannelSpec {
            medium: medium(0.0),
            r1: 5e-3,
            n_max: 2,
            alpha: 1.0 / 3.0,
            noise_floor: 1.0,
            power: 16.0,
        };
        let c = capacity_lossless(&spec).unwrap();
        assert!((c - 16.0 * 2f64.ln()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn waterfill_conserves_power(g in proptest::collection::vec(1e-4f64..1e3, 1..12), p in 1e-3f64..1e4) {
            let classes: Vec<GainClass> = g.iter().enumerate()
                .map(|(i, &h)| GainClass { gain_sq: h, multiplicity: 1 + i % 3 }).collect();
            let r = waterfill(p, &classes).unwrap();
            let used: f64 = r.powers.iter().zip(&classes).map(|(q, c)| q * c.multiplicity as f64).sum();
            prop_assert!((used - p).abs() <= 1e-12 * p);
            for (q, c) in r.powers.iter().zip(&classes) {
                prop_assert!(*q >= 0.0);
                if *q > 0.0 {
                    prop_assert!((q + 1.0 / c.gain_sq - r.water_level).abs() <= 1e-9 * r.water_level);
                } else {
                    prop_assert!(1.0 / c.gain_sq >= r.water_level * (1.0 - 1e-12));
                }
            }
        }

        #[test]
        fn efficiency_is_a_fraction(n in 1usize..6, l in 1u8..3, td in -8.0f64..-1.0, z in 0.05f64..4.0) {
            let m = medium(10f64.powf(td));
            let e = mode_efficiency(n, l, &m, z / m.k0()).unwrap();
            prop_assert!(e > 0.0 && e <= 1.0 + 1e-12);
        }
    }
}
