use std::f64::consts::PI;

use ndarray::Array2;

use crate::channel::mode_powers;
use crate::error::{invalid, Error, Result};
use crate::modes::{vector_harmonics, ModeIndex};
use crate::qfactor::quality_factor;
use crate::scattering::{check_radius, scattering_coeffs, Medium};
use crate::C64;

/// Far-field data of one mode `(n, m, l)` with `m = +-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFarField {
    pub index: ModeIndex,
    /// Complex amplitude with `|beta|^2 = 4 pi rho`.
    pub beta: C64,
    pub rho: f64,
    pub tau: f64,
    pub eta: f64,
    pub q: f64,
}

impl ModeFarField {
    /// Transverse far-field pattern `(theta, phi)` components, unit norm
    /// over the sphere.
    pub fn pattern(&self, theta: f64, phi: f64) -> [C64; 2] {
        let n = self.index.n;
        let a = vector_harmonics(n, self.index.m, theta, phi);
        let (ph, v) = if self.index.l == 1 {
            (mi_pow(n + 1), a[0])
        } else {
            (mi_pow(n), a[2])
        };
        [ph * v[1], ph * v[2]]
    }
}

fn mi_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Modes `(n, +-1, l)` for `n <= n_max`, ordered as [`crate::modes::mode_list`].
pub fn far_field_modes(medium: &Medium, r1: f64, n_max: usize) -> Result<Vec<ModeFarField>> {
    check_radius(r1)?;
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    let mut out = Vec::with_capacity(4 * n_max);
    for n in 1..=n_max {
        let mut per_l = Vec::with_capacity(2);
        for l in [1u8, 2] {
            let (rho, tau) = mode_powers(n, l, medium, r1)?;
            let q = quality_factor(n, l, medium, r1)?.q;
            let kt = -(medium.k1() * scattering_coeffs(n, l, medium, r1)?.t);
            let beta = kt / kt.norm() * (4.0 * PI * rho).sqrt();
            per_l.push((l, rho, tau, q, beta));
        }
        for m in [-1i64, 1] {
            for &(l, rho, tau, q, beta) in &per_l {
                out.push(ModeFarField { index: ModeIndex { n, m, l }, beta, rho, tau, eta: rho / tau, q });
            }
        }
    }
    Ok(out)
}

/// Complex excitation of the modes `(n, +-1, l)`, `n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Excitation {
    pub n_max: usize,
    pub coeffs: Vec<(ModeIndex, C64)>,
}

impl Excitation {
    pub fn new(n_max: usize, coeffs: Vec<(ModeIndex, C64)>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(|(_, c)| c.norm() == 0.0) {
            return Err(invalid("excitation has no nonzero coefficient"));
        }
        for (i, c) in &coeffs {
            if i.n == 0 || i.n > n_max || i.m.abs() != 1 || !(i.l == 1 || i.l == 2) {
                return Err(invalid(format!("mode {i:?} is outside the admitted set")));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(invalid("non-finite coefficient"));
            }
        }
        Ok(Self { n_max, coeffs })
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { n_max: self.n_max, coeffs: self.coeffs.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    fn weights<'a>(&'a self, modes: &'a [ModeFarField]) -> impl Iterator<Item = (&'a ModeFarField, C64)> + 'a {
        self.coeffs
            .iter()
            .filter_map(move |(i, c)| modes.iter().find(|m| m.index == *i).map(|m| (m, *c)))
    }

    /// Consumed power per unit `omega mu0 / 2`.
    pub fn consumed(&self, modes: &[ModeFarField]) -> f64 {
        self.weights(modes).map(|(m, c)| m.tau * c.norm_sqr()).sum()
    }

    pub fn radiated(&self, modes: &[ModeFarField]) -> f64 {
        self.weights(modes).map(|(m, c)| m.rho * c.norm_sqr()).sum()
    }

    /// `sum Q tau |J|^2 / sum tau |J|^2`
    pub fn q_j(&self, modes: &[ModeFarField]) -> f64 {
        let num: f64 = self.weights(modes).map(|(m, c)| m.q * m.tau * c.norm_sqr()).sum();
        num / self.consumed(modes)
    }

    pub fn gain(&self, modes: &[ModeFarField], theta: f64, phi: f64) -> f64 {
        let mut e = [C64::new(0.0, 0.0); 2];
        for (m, c) in self.weights(modes) {
            let p = m.pattern(theta, phi);
            e[0] += m.beta * c * p[0];
            e[1] += m.beta * c * p[1];
        }
        (e[0].norm_sqr() + e[1].norm_sqr()) / self.consumed(modes)
    }

    pub fn directivity(&self, modes: &[ModeFarField], theta: f64, phi: f64) -> f64 {
        self.gain(modes, theta, phi) * self.consumed(modes) / self.radiated(modes)
    }

    /// Radiated over consumed power.
    pub fn mean_efficiency(&self, modes: &[ModeFarField]) -> f64 {
        self.radiated(modes) / self.consumed(modes)
    }
}

/// Boresight amplitudes `a_i`: the `x` component of each mode's far field at
/// `theta = 0`.
pub fn boresight_amplitudes(modes: &[ModeFarField]) -> Vec<C64> {
    modes.iter().map(|m| m.beta * m.pattern(0.0, 0.0)[0]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainOptResult {
    pub n_max: usize,
    pub q_bar: f64,
    pub excitation: Excitation,
    pub gain: f64,
    pub directivity: f64,
    pub q_j: f64,
    /// Lagrange multiplier of the Q constraint.
    pub nu: f64,
    /// Smallest Q among the funded modes.
    pub q_min: f64,
}

/// Maximise the boresight gain subject to `Q_J <= q_bar` over modes
/// `(n, +-1, l)`, `n <= n_max`.
pub fn optimize_gain(medium: &Medium, r1: f64, n_max: usize, q_bar: f64) -> Result<GainOptResult> {
    let modes = far_field_modes(medium, r1, n_max)?;
    optimize_with_modes(&modes, n_max, q_bar)
}

/// As [`optimize_gain`] with precomputed modes; modes above `n_max` are ignored.
pub fn optimize_with_modes(all: &[ModeFarField], n_max: usize, q_bar: f64) -> Result<GainOptResult> {
    if q_bar.is_nan() || q_bar <= 0.0 {
        return Err(invalid(format!("q_bar must be positive, got {q_bar}")));
    }
    let modes: Vec<ModeFarField> = all.iter().copied().filter(|m| m.index.n <= n_max).collect();
    let a = boresight_amplitudes(&modes);
    let amax = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let funded: Vec<usize> = (0..modes.len()).filter(|&i| a[i].norm() > 1e-12 * amax).collect();
    if funded.is_empty() {
        return Err(Error::Numerical("no mode radiates towards boresight".into()));
    }
    let q_min = funded.iter().map(|&i| modes[i].q).fold(f64::INFINITY, f64::min);
    if q_bar < q_min {
        return Err(Error::Infeasible { q_bar, q_min });
    }
    let build = |nu: f64, only_min: bool| -> Vec<(ModeIndex, C64)> {
        funded
            .iter()
            .filter(|&&i| !only_min || modes[i].q <= q_bar)
            .map(|&i| {
                let m = &modes[i];
                let d = if nu == 0.0 { 1.0 } else { 1.0 + nu * (m.q - q_bar) };
                (m.index, a[i].conj() / (m.tau * d))
            })
            .collect()
    };
    let q_of = |c: &[(ModeIndex, C64)]| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (idx, x) in c {
            let m = modes.iter().find(|m| m.index == *idx).unwrap();
            num += m.q * m.tau * x.norm_sqr();
            den += m.tau * x.norm_sqr();
        }
        num / den
    };
    let free = build(0.0, false);
    let (coeffs, nu) = if q_of(&free) <= q_bar {
        (free, 0.0)
    } else if q_bar - q_min <= 1e-12 * q_bar {
        (build(0.0, true), f64::INFINITY)
    } else {
        let nu_max = 1.0 / (q_bar - q_min);
        let (mut lo, mut hi) = (0.0, nu_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if q_of(&build(mid, false)) <= q_bar {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if hi >= nu_max {
            (build(0.0, true), f64::INFINITY)
        } else {
            (build(hi, false), hi)
        }
    };
    let ex = Excitation { n_max, coeffs };
    let p = ex.consumed(&modes).sqrt();
    let ex = ex.scaled(C64::new(1.0 / p, 0.0));
    Ok(GainOptResult {
        n_max,
        q_bar,
        gain: ex.gain(&modes, 0.0, 0.0),
        directivity: ex.directivity(&modes, 0.0, 0.0),
        q_j: ex.q_j(&modes),
        excitation: ex,
        nu,
        q_min,
    })
}

/// Optimise for every `N` in `1..=n_max`; infeasible orders are skipped.
pub fn sweep_gain(medium: &Medium, r1: f64, n_max: usize, q_bar: f64) -> Result<Vec<GainOptResult>> {
    let modes = far_field_modes(medium, r1, n_max)?;
    let mut out = Vec::with_capacity(n_max);
    let mut last_err = None;
    for n in 1..=n_max {
        match optimize_with_modes(&modes, n, q_bar) {
            Ok(r) => out.push(r),
            Err(e @ Error::Infeasible { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(last_err.unwrap());
    }
    Ok(out)
}

/// Smallest `N` whose gain is within `rel_tol` of the best.
pub fn argmax_n(results: &[GainOptResult], rel_tol: f64) -> Option<&GainOptResult> {
    let best = results.iter().map(|r| r.gain).fold(f64::NEG_INFINITY, f64::max);
    results.iter().filter(|r| r.gain >= best * (1.0 - rel_tol)).min_by_key(|r| r.n_max)
}

/// Gain on great-circle cuts through the boresight. A negative polar angle
/// `-t` on cut `phi` is the direction `(t, phi + pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern {
    pub theta_grid: Vec<f64>,
    pub phi_cuts: Vec<f64>,
    /// `gain[[cut, theta]]`
    pub gain: Array2<f64>,
    /// Radiated over consumed power of the excitation.
    pub efficiency: f64,
}

impl BeamPattern {
    /// Directivity samples.
    pub fn directivity(&self) -> Array2<f64> {
        &self.gain / self.efficiency
    }

    /// Mean of the gain over the sphere, assuming `phi_cuts` equally spaced
    /// over `[0, pi)` and the theta grid covering `[-pi, pi]`. Trapezoid rule
    /// in `theta` on each half-plane.
    pub fn sphere_mean(&self) -> f64 {
        let halves = 2 * self.phi_cuts.len();
        let mut total = 0.0;
        for (k, _) in self.phi_cuts.iter().enumerate() {
            let row = self.gain.row(k);
            for sign in [1.0, -1.0] {
                let mut pts: Vec<(f64, f64)> = self
                    .theta_grid
                    .iter()
                    .zip(row.iter())
                    .filter(|(t, _)| **t * sign >= 0.0)
                    .map(|(t, g)| (t.abs(), *g))
                    .collect();
                pts.sort_by(|x, y| x.0.total_cmp(&y.0));
                for w in pts.windows(2) {
                    let (t0, g0) = w[0];
                    let (t1, g1) = w[1];
                    total += 0.5 * (t1 - t0) * (g0 * t0.sin() + g1 * t1.sin());
                }
            }
        }
        total * (2.0 * PI / halves as f64) / (4.0 * PI)
    }
}

pub fn beam_pattern(
    excitation: &Excitation,
    medium: &Medium,
    r1: f64,
    theta_grid: &[f64],
    phi_cuts: &[f64],
) -> Result<BeamPattern> {
    let modes = far_field_modes(medium, r1, excitation.n_max)?;
    Ok(pattern_from_modes(excitation, &modes, theta_grid, phi_cuts))
}

pub(crate) fn pattern_from_modes(
    excitation: &Excitation,
    modes: &[ModeFarField],
    theta_grid: &[f64],
    phi_cuts: &[f64],
) -> BeamPattern {
    let mut gain = Array2::zeros((phi_cuts.len(), theta_grid.len()));
    for (k, &phi) in phi_cuts.iter().enumerate() {
        for (i, &t) in theta_grid.iter().enumerate() {
            let (th, ph) = if t < 0.0 { (-t, phi + PI) } else { (t, phi) };
            gain[[k, i]] = excitation.gain(modes, th, ph);
        }
    }
    BeamPattern {
        theta_grid: theta_grid.to_vec(),
        phi_cuts: phi_cuts.to_vec(),
        gain,
        efficiency: excitation.mean_efficiency(modes),
    }
}

/// Full width in degrees between the half-gain crossings around the peak of
/// the first cut, with linear interpolation.
pub fn beamwidth(pattern: &BeamPattern) -> Result<f64> {
    beamwidth_on(pattern, 0)
}

pub fn beamwidth_on(pattern: &BeamPattern, cut: usize) -> Result<f64> {
    if cut >= pattern.phi_cuts.len() {
        return Err(invalid(format!("cut {cut} out of range")));
    }
    let g = pattern.gain.row(cut);
    let t = &pattern.theta_grid;
    let (imax, gmax) = g.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
        if v > acc.1 || (v == acc.1 && t[i].abs() < t[acc.0].abs()) {
            (i, v)
        } else {
            acc
        }
    });
    let half = 0.5 * gmax;
    let cross = |i: usize, j: usize| -> f64 {
        let f = (g[i] - half) / (g[i] - g[j]);
        t[i] + f * (t[j] - t[i])
    };
    let mut left = None;
    for i in (0..imax).rev() {
        if g[i] < half {
            left = Some(cross(i + 1, i));
            break;
        }
    }
    let mut right = None;
    for i in imax + 1..g.len() {
        if g[i] < half {
            right = Some(cross(i - 1, i));
            break;
        }
    }
    match (left, right) {
        (Some(a), Some(b)) => Ok((b - a).to_degrees()),
        _ => Err(Error::UnboundedBeam),
    }
}

/// `-180..=180` degrees in steps of `step_deg`, in radians.
pub fn signed_grid(step_deg: f64) -> Vec<f64> {
    let k = (180.0 / step_deg).round() as i64;
    (-k..=k).map(|i| (i as f64 * step_deg).to_radians()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern_of(g: impl Fn(f64) -> f64) -> BeamPattern {
        let t = signed_grid(0.25);
        let row: Vec<f64> = t.iter().map(|&x| g(x)).collect();
        BeamPattern {
            gain: Array2::from_shape_vec((1, t.len()), row).unwrap(),
            theta_grid: t,
            phi_cuts: vec![0.0],
            efficiency: 1.0,
        }
    }

    #[test]
    fn cos_squared_width() {
        let p = pattern_of(|t| t.cos().powi(2));
        assert!((beamwidth(&p).unwrap() - 90.0).abs() < 1e-2);
    }

    #[test]
    fn flat_pattern_is_unbounded() {
        assert_eq!(beamwidth(&pattern_of(|_| 1.0)), Err(Error::UnboundedBeam));
    }

    #[test]
    fn lossless_unconstrained_gain() {
        let m = Medium::new(16.8e9, 16.0, 0.0).unwrap();
        for n in 1..=4 {
            let r = optimize_gain(&m, 5e-3, n, f64::INFINITY).unwrap();
            let want = (n * (n + 2)) as f64;
            assert!((r.gain / want - 1.0).abs() < 1e-6, "N={n}: {}", r.gain);
            assert_eq!(r.nu, 0.0);
        }
    }

    #[test]
    fn dipole_directivity() {
        let m = Medium::new(16.8e9, 16.0, 1e-4).unwrap();
        let ex = Excitation::new(
            1,
            vec![
                (ModeIndex { n: 1, m: 1, l: 1 }, C64::new(1.0, 0.0)),
                (ModeIndex { n: 1, m: -1, l: 1 }, C64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let p = beam_pattern(&ex, &m, 5e-3, &signed_grid(0.25), &[0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0])
            .unwrap();
        let dmax = p.directivity().iter().cloned().fold(0.0, f64::max);
        assert!((dmax - 1.5).abs() < 1e-6, "{dmax}");
        assert!((p.sphere_mean() / p.efficiency - 1.0).abs() < 1e-3);
    }

    #[test]
    fn infeasible_names_minimum() {
        let m = Medium::new(16.8e9, 16.0, 1.2e-4).unwrap();
        match optimize_gain(&m, 5e-3, 2, 1.0) {
            Err(Error::Infeasible { q_min, .. }) => assert!(q_min > 1.0),
            other => panic!("{other:?}"),
        }
    }
}
