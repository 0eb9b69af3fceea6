//! Spherical vector wave functions, their normalizations and the closed-form
//! radial integrals over the source sphere.
//!
//! Vectors are returned as `[r, theta, phi]` components.

use crate::error::{invalid, Error, Result};
use crate::quad::{composite_rule, panels_for};
use crate::scattering::{check_mode, Medium};
use crate::specfun::{j_conj_delta, BesselTable};
use crate::C64;
use std::f64::consts::PI;

pub type Vec3 = [C64; 3];

/// Spherical mode `(n, m, l)` with `n >= 1`, `|m| <= n`, `l` in {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    pub n: usize,
    pub m: i64,
    pub l: u8,
}

impl ModeIndex {
    pub fn new(n: usize, m: i64, l: u8) -> Result<Self> {
        check_mode(n, l)?;
        if m.unsigned_abs() as usize > n {
            return Err(invalid(format!("|m| = {} exceeds n = {n}", m.abs())));
        }
        Ok(ModeIndex { n, m, l })
    }
}

/// All modes with `n <= n_max`, ordered by `n`, then `m`, then `l`.
pub fn mode_list(n_max: usize) -> Vec<ModeIndex> {
    let mut out = Vec::with_capacity(2 * n_max * (n_max + 2));
    for n in 1..=n_max {
        for m in -(n as i64)..=(n as i64) {
            for l in [1u8, 2] {
                out.push(ModeIndex { n, m, l });
            }
        }
    }
    out
}

/// Radial function used by a wave family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `j_n(k r)`
    V,
    /// `j_n(k* r)`
    VConj,
    /// `y_n(k r)`
    W,
    /// `y_n(k* r)`
    WConj,
    /// `h_n^{(1)}(k r)`
    U,
    /// conjugate of `h_n^{(1)}(k r)`
    UConj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// Over the ball of radius `R`.
    Volume,
    /// Over the sphere of radius `R`.
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spherical {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Spherical {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        Spherical { r, theta, phi }
    }

    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Self {
        let r = (x * x + y * y + z * z).sqrt();
        let theta = if r > 0.0 { (z / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
        Spherical { r, theta, phi: y.atan2(x) }
    }
}

/// Converts `[r, theta, phi]` components at `(theta, phi)` to Cartesian.
pub fn to_cartesian(theta: f64, phi: f64, v: &Vec3) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        v[0] * (st * cp) + v[1] * (ct * cp) - v[2] * sp,
        v[0] * (st * sp) + v[1] * (ct * sp) + v[2] * cp,
        v[0] * ct - v[1] * st,
    ]
}

/// Normalised associated Legendre data for `m >= 0`:
/// `(P(cos t), P(cos t) / sin t, dP/dt)` with the Condon-Shortley phase and
/// unit norm of `P e^{i m phi}` over the sphere.
fn legendre(n: usize, m: usize, theta: f64) -> (f64, f64, f64) {
    let (s, x) = theta.sin_cos();
    let q = |nn: usize, mm: usize| -> (f64, f64) {
        // returns (Q_nn^mm, Q_{nn-1}^mm) where P = Q sin^mm
        let mut qmm = 1.0 / (4.0 * PI).sqrt();
        for k in 1..=mm {
            qmm *= -((2 * k + 1) as f64 / (2 * k) as f64).sqrt();
        }
        if nn == mm {
            return (qmm, 0.0);
        }
        let mut prev = qmm;
        let mut cur = ((2 * mm + 3) as f64).sqrt() * x * qmm;
        for k in (mm + 2)..=nn {
            let kf = k as f64;
            let mf = mm as f64;
            let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
            let b = ((2.0 * kf + 1.0) * ((kf - 1.0).powi(2) - mf * mf)
                / ((2.0 * kf - 3.0) * (kf * kf - mf * mf)))
                .sqrt();
            let next = a * x * cur - b * prev;
            prev = cur;
            cur = next;
        }
        (cur, prev)
    };
    if m == 0 {
        let (p, _) = q(n, 0);
        let dp = if n == 0 {
            0.0
        } else {
            let (q1, _) = q(n, 1);
            ((n * (n + 1)) as f64).sqrt() * q1 * s
        };
        return (p, 0.0, dp);
    }
    let (qn, qn1) = q(n, m);
    let sm1 = s.powi(m as i32 - 1);
    let u = qn * sm1;
    let u1 = if n > m { qn1 * sm1 } else { 0.0 };
    let nf = n as f64;
    let mf = m as f64;
    let c = ((2.0 * nf + 1.0) / (2.0 * nf - 1.0) * (nf * nf - mf * mf)).max(0.0).sqrt();
    (u * s, u, nf * x * u - c * u1)
}

/// Angular building blocks of `Y_nm`: `(Y, Y / sin t, dY/dt)`.
fn harmonic_parts(n: usize, m: i64, theta: f64, phi: f64) -> (C64, C64, C64) {
    let ma = m.unsigned_abs() as usize;
    let (p, u, dp) = legendre(n, ma, theta);
    let sign = if m < 0 && ma % 2 == 1 { -1.0 } else { 1.0 };
    let e = C64::from_polar(sign, m as f64 * phi);
    (e * p, e * u, e * dp)
}

/// Orthonormal scalar spherical harmonic `Y_nm(theta, phi)`.
pub fn sph_harmonic(n: usize, m: i64, theta: f64, phi: f64) -> Result<C64> {
    if m.unsigned_abs() as usize > n {
        return Err(invalid(format!("|m| = {} exceeds n = {n}", m.abs())));
    }
    Ok(harmonic_parts(n, m, theta, phi).0)
}

/// Orthonormal vector spherical harmonics `(A1, A2, A3)` for `n >= 1`.
pub fn vector_harmonics(n: usize, m: i64, theta: f64, phi: f64) -> [Vec3; 3] {
    let (y, ys, dy) = harmonic_parts(n, m, theta, phi);
    let c = ((n * (n + 1)) as f64).sqrt();
    let ims = C64::new(0.0, m as f64) * ys / c;
    let z = C64::new(0.0, 0.0);
    [[z, ims, -dy / c], [y, z, z], [z, dy / c, ims]]
}

fn base_radial(family: Family, t: &BesselTable, m: i64) -> C64 {
    match family {
        Family::V => t.j(m),
        Family::VConj => t.j(m).conj(),
        Family::W => t.y(m),
        Family::WConj => t.y(m).conj(),
        Family::U => t.h1(m),
        Family::UConj => t.h1(m).conj(),
    }
}

/// Radial factors `(f1, f2, f3)` multiplying `(A1, A2, A3)` in mode
/// `(n, ., l)` of the given family; `t` must hold orders up to `n + 1`.
pub(crate) fn radial_factors(family: Family, n: usize, l: u8, t: &BesselTable) -> [C64; 3] {
    let ni = n as i64;
    let c = ((n * (n + 1)) as f64).sqrt();
    let z = C64::new(0.0, 0.0);
    if l == 1 {
        return [base_radial(family, t, ni) * c, z, z];
    }
    let lo = base_radial(family, t, ni - 1);
    let hi = base_radial(family, t, ni + 1);
    let tn = (2 * n + 1) as f64;
    [
        z,
        (lo + hi) * (c * c / tn),
        (lo * (n + 1) as f64 - hi * n as f64) * (c / tn),
    ]
}

fn combine(f: [C64; 3], a: &[Vec3; 3]) -> Vec3 {
    let mut out = [C64::new(0.0, 0.0); 3];
    for i in 0..3 {
        if f[i] != C64::new(0.0, 0.0) {
            for c in 0..3 {
                out[c] += f[i] * a[i][c];
            }
        }
    }
    out
}

/// Spherical vector wave function of the given family at `pos`.
pub fn wave_function(family: Family, mode: ModeIndex, k: C64, pos: Spherical) -> Result<Vec3> {
    check_mode(mode.n, mode.l)?;
    if !(pos.r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {}", pos.r)));
    }
    let t = BesselTable::new(mode.n + 1, k * pos.r)?;
    let f = radial_factors(family, mode.n, mode.l, &t);
    Ok(combine(f, &vector_harmonics(mode.n, mode.m, pos.theta, pos.phi)))
}

/// Closed-form radial integrals of mode `(n, l)` over `[0, r]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialIntegrals {
    /// `int j j r^2`
    pub jj: C64,
    /// `int y j r^2`
    pub yj: C64,
    /// `int |j|^2 r^2`
    pub jj_star: f64,
    /// `int y conj(j) r^2`
    pub yj_star: C64,
}

fn first_kind_integrals(m: i64, k: C64, r: f64, t: &BesselTable, lossless: bool) -> RadialIntegrals {
    let r2 = r * r;
    let r3 = r2 * r;
    let mf = m as f64;
    let jj = (t.j(m) * t.j(m) - t.j(m - 1) * t.j(m + 1)) * (0.5 * r3);
    let yj = (t.j(m) * t.y(m) - (t.j(m - 1) * t.y(m + 1) + t.y(m - 1) * t.j(m + 1)) * 0.5) * (0.5 * r3)
        - (2.0 * mf + 1.0) / (4.0 * k * k * k);
    if lossless {
        return RadialIntegrals { jj, yj, jj_star: jj.re, yj_star: yj };
    }
    let kc = k.conj();
    let dk = k * k - kc * kc;
    let jj_star = (r2 / dk * (kc * t.j(m - 1).conj() * t.j(m) - k * t.j(m - 1) * t.j(m).conj())).re;
    let e = C64::from_polar(1.0, -2.0 * mf * k.arg());
    let yj_star = r2 / dk * (kc * t.j(m - 1).conj() * t.y(m) - k * t.y(m - 1) * t.j(m).conj())
        + e / (k * dk);
    RadialIntegrals { jj, yj, jj_star, yj_star }
}

fn mix(a: RadialIntegrals, b: RadialIntegrals, n: usize) -> RadialIntegrals {
    let wa = (n + 1) as f64 / (2 * n + 1) as f64;
    let wb = n as f64 / (2 * n + 1) as f64;
    RadialIntegrals {
        jj: a.jj * wa + b.jj * wb,
        yj: a.yj * wa + b.yj * wb,
        jj_star: a.jj_star * wa + b.jj_star * wb,
        yj_star: a.yj_star * wa + b.yj_star * wb,
    }
}

/// Closed-form radial integrals for mode `(n, l)`; lossless wavenumbers
/// (`k'' = 0`) use the real-argument forms.
pub fn radial_integrals(n: usize, l: u8, k: C64, r: f64) -> Result<RadialIntegrals> {
    check_mode(n, l)?;
    if !(r > 0.0) || !(k.re > 0.0) || k.im < 0.0 {
        return Err(invalid(format!("need r > 0 and Re k > 0, Im k >= 0; got r = {r}, k = {k}")));
    }
    let lossless = k.im <= 1e-12 * k.re;
    let k = if lossless { C64::new(k.re, 0.0) } else { k };
    let t = BesselTable::new(n + 2, k * r)?;
    let ni = n as i64;
    if l == 1 {
        return Ok(first_kind_integrals(ni, k, r, &t, lossless));
    }
    let a = first_kind_integrals(ni - 1, k, r, &t, lossless);
    let b = first_kind_integrals(ni + 1, k, r, &t, lossless);
    Ok(mix(a, b, n))
}

/// `(k*/k)^n` for `l = 1`, and the `(n+1, n)/(2n+1)` weighted mix of orders
/// `n -/+ 1` for `l = 2`.
pub fn calligraphic_e(n: usize, l: u8, k: C64) -> Result<C64> {
    check_mode(n, l)?;
    Ok(e_mix(&shift_weights(n, l), k.arg()))
}

pub(crate) fn e_pow(p: i64, phi: f64) -> C64 {
    C64::from_polar(1.0, -2.0 * p as f64 * phi)
}

/// `E_a - E_b` without cancellation.
pub(crate) fn e_diff(a: i64, b: i64, phi: f64) -> C64 {
    C64::new(0.0, -2.0 * ((a - b) as f64 * phi).sin()) * C64::from_polar(1.0, -((a + b) as f64) * phi)
}

pub(crate) fn shift_weights(n: usize, l: u8) -> Vec<(f64, i64)> {
    let ni = n as i64;
    if l == 1 {
        vec![(1.0, ni)]
    } else {
        let tn = (2 * n + 1) as f64;
        vec![((n + 1) as f64 / tn, ni - 1), (n as f64 / tn, ni + 1)]
    }
}

fn e_mix(w: &[(f64, i64)], phi: f64) -> C64 {
    w.iter().map(|&(c, p)| e_pow(p, phi) * c).sum()
}

/// `E_q conj(j_m(x)) - (sum_p w_p E_p) j_m(x)` with `E_p = e^{-2 i p arg x}`.
pub(crate) fn shifted_conj_difference(m: i64, q: i64, w: &[(f64, i64)], x: C64, jm: C64) -> C64 {
    let phi = x.arg();
    let mut s = j_conj_delta(m as usize, x);
    for &(c, p) in w {
        s += e_diff(m, p - q, phi) * jm * c;
    }
    e_pow(q, phi) * s
}

/// Weighted components `(c_i^2, [(coef, order)])` of the radial factors of
/// family `fam`, matching [`radial_factors`].
pub(crate) fn components(n: usize, fam: u8) -> Vec<(f64, Vec<(f64, i64)>)> {
    let c2 = (n * (n + 1)) as f64;
    let ni = n as i64;
    if fam == 1 {
        return vec![(c2, vec![(1.0, ni)])];
    }
    let tn = (2 * n + 1) as f64;
    vec![
        ((c2 / tn).powi(2), vec![(1.0, ni - 1), (1.0, ni + 1)]),
        (c2, vec![((n + 1) as f64 / tn, ni - 1), (-(n as f64) / tn, ni + 1)]),
    ]
}

/// `int_0^r |j|^2 r^2` and `int_0^r y conj(j) r^2` for mode `(n, l)` by
/// Gauss-Legendre quadrature. Both integrands are free of the cancellation
/// that the closed forms suffer when `k''` is small.
pub fn star_integrals_quadrature(n: usize, l: u8, k: C64, r: f64) -> Result<(f64, C64)> {
    check_mode(n, l)?;
    let rule = composite_rule(0.0, r, panels_for(k.norm(), r), 32);
    let mut jj = 0.0;
    let mut yj = C64::new(0.0, 0.0);
    for &(x, w) in &rule {
        let t = BesselTable::new(n + 1, k * x)?;
        let (a, b) = star_integrands(n, l, &t);
        jj += w * x * x * a;
        yj += b * (w * x * x);
    }
    Ok((jj, yj))
}

pub(crate) fn star_integrands(n: usize, l: u8, t: &BesselTable) -> (f64, C64) {
    let ni = n as i64;
    let f = |m: i64| (t.j(m).norm_sqr(), t.y(m) * t.j(m).conj());
    if l == 1 {
        return f(ni);
    }
    let tn = (2 * n + 1) as f64;
    let (a0, b0) = f(ni - 1);
    let (a1, b1) = f(ni + 1);
    (
        ((n + 1) as f64 * a0 + n as f64 * a1) / tn,
        (b0 * (n + 1) as f64 + b1 * n as f64) / tn,
    )
}

/// Norm of a wave function over the ball (`Volume`, family V) or over the
/// sphere (`Surface`, family U) of radius `r`.
pub fn normalization(kind: NormKind, n: usize, l: u8, k: C64, r: f64) -> Result<f64> {
    check_mode(n, l)?;
    if !(r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    let c2 = (n * (n + 1)) as f64;
    match kind {
        NormKind::Volume => {
            let (jj, _) = star_integrals_quadrature(n, l, k, r)?;
            Ok((c2 * jj).sqrt())
        }
        NormKind::Surface => {
            let t = BesselTable::new(n + 1, k * r)?;
            let ni = n as i64;
            let s = if l == 1 {
                t.h1(ni).norm_sqr()
            } else {
                ((n + 1) as f64 * t.h1(ni - 1).norm_sqr() + n as f64 * t.h1(ni + 1).norm_sqr())
                    / (2 * n + 1) as f64
            };
            Ok((c2 * s).sqrt())
        }
    }
}

/// Which field to evaluate inside the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Electric,
    Magnetic,
}

/// Interior field radiated by a unit current coefficient in mode `mode`
/// (SI units, `[r, theta, phi]` components).
pub fn internal_field(
    mode: ModeIndex,
    medium: &Medium,
    r1: f64,
    pos: Spherical,
    kind: FieldKind,
) -> Result<Vec3> {
    check_mode(mode.n, mode.l)?;
    if pos.r > r1 {
        return Err(Error::OutOfDomain { r: pos.r, r1 });
    }
    if pos.r < 1e-9 * r1 {
        return Err(invalid(format!("field point too close to the origin: r = {}", pos.r)));
    }
    let sol = crate::channel::ModeSolution::new(mode.n, mode.l, medium, r1)?;
    let radial = sol.interior_radial(pos.r, kind);
    let a = vector_harmonics(mode.n, mode.m, pos.theta, pos.phi);
    Ok(combine(radial, &a))
}

/// `Im G(r, r)` of the free-space dyadic Green function (per unit `omega mu0`
/// convention): `k0 / (6 pi)` times the identity.
pub fn im_green_coincident(k0: f64) -> f64 {
    k0 / (6.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_gk;
    use proptest::prelude::*;

    fn sphere_inner(f: impl Fn(f64, f64) -> C64) -> C64 {
        let gl = crate::quad::gauss_legendre(40);
        let nphi = 64;
        let mut s = C64::new(0.0, 0.0);
        for &(x, w) in &gl {
            let th = x.acos();
            for p in 0..nphi {
                let ph = 2.0 * PI * p as f64 / nphi as f64;
                s += f(th, ph) * (w * 2.0 * PI / nphi as f64);
            }
        }
        s
    }

    fn dot(a: &Vec3, b: &Vec3) -> C64 {
        (0..3).map(|i| a[i].conj() * b[i]).sum()
    }

    #[test]
    fn harmonics_against_explicit_forms() {
        let (t, p) = (0.7f64, 1.3f64);
        let y10 = (3.0 / (4.0 * PI)).sqrt() * t.cos();
        assert!((sph_harmonic(1, 0, t, p).unwrap() - y10).norm() < 1e-14);
        let y11 = -(3.0 / (8.0 * PI)).sqrt() * t.sin() * C64::from_polar(1.0, p);
        assert!((sph_harmonic(1, 1, t, p).unwrap() - y11).norm() < 1e-14);
        let y2m2 = 0.25 * (15.0 / (2.0 * PI)).sqrt() * t.sin().powi(2) * C64::from_polar(1.0, -2.0 * p);
        assert!((sph_harmonic(2, -2, t, p).unwrap() - y2m2).norm() < 1e-14);
    }

    #[test]
    fn vector_harmonics_are_orthonormal() {
        let modes = mode_list(3);
        for a in &modes {
            for b in &modes {
                for i in 0..3 {
                    let v = sphere_inner(|t, p| {
                        let x = vector_harmonics(a.n, a.m, t, p);
                        let y = vector_harmonics(b.n, b.m, t, p);
                        dot(&x[i], &y[i])
                    });
                    let expect = if a.n == b.n && a.m == b.m { 1.0 } else { 0.0 };
                    assert!((v - expect).norm() < 1e-12, "{a:?} {b:?} {i}: {v}");
                }
            }
        }
    }

    #[test]
    fn derivative_is_pole_safe() {
        for n in 1..6 {
            for m in -(n as i64)..=(n as i64) {
                let h = 1e-5;
                let t = 0.3;
                let fd = (sph_harmonic(n, m, t + h, 0.2).unwrap() - sph_harmonic(n, m, t - h, 0.2).unwrap())
                    / (2.0 * h);
                let (_, _, d) = harmonic_parts(n, m, t, 0.2);
                assert!((fd - d).norm() < 1e-8);
                let (_, ys, dy) = harmonic_parts(n, m, 0.0, 0.0);
                assert!(ys.re.is_finite() && dy.re.is_finite());
            }
        }
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        let k = C64::new(4.0, 0.05);
        let r = 1.1;
        for n in 1..6 {
            for l in [1u8, 2] {
                let ci = radial_integrals(n, l, k, r).unwrap();
                let t = |x: f64| BesselTable::new(n + 1, k * x).unwrap();
                let q = adaptive_gk(
                    |x| {
                        let tb = t(x);
                        let ni = n as i64;
                        let g = |m: i64| tb.j(m) * tb.j(m);
                        let v = if l == 1 { g(ni) } else { (g(ni - 1) * (n + 1) as f64 + g(ni + 1) * n as f64) / (2 * n + 1) as f64 };
                        v * x * x
                    },
                    0.0,
                    r,
                    1e-13,
                );
                assert!(((ci.jj - q) / q).norm() < 1e-10, "n={n} l={l}");
                let (jjs, yjs) = star_integrals_quadrature(n, l, k, r).unwrap();
                assert!((ci.jj_star / jjs - 1.0).abs() < 1e-9);
                assert!(((ci.yj_star - yjs) / yjs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn lossless_integrals_are_real_limit() {
        let a = radial_integrals(2, 1, C64::new(3.0, 0.0), 1.0).unwrap();
        let b = radial_integrals(2, 1, C64::new(3.0, 1e-7), 1.0).unwrap();
        assert!((a.jj_star - b.jj_star).abs() < 1e-6 * a.jj_star);
        assert!((a.yj_star - b.yj_star).norm() < 1e-6 * a.yj_star.norm());
    }

    #[test]
    fn surface_normalization_matches_quadrature() {
        let k = C64::new(2.0, 0.0);
        let r = 1.7;
        for n in 1..4 {
            for l in [1u8, 2] {
                let mode = ModeIndex::new(n, 1, l).unwrap();
                let q = sphere_inner(|t, p| {
                    let v = wave_function(Family::U, mode, k, Spherical::new(r, t, p)).unwrap();
                    dot(&v, &v)
                });
                let ns = normalization(NormKind::Surface, n, l, k, r).unwrap();
                assert!((q.re.sqrt() / ns - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn calligraphic_e_unit_modulus() {
        let k = C64::new(3.0, 0.2);
        let e = calligraphic_e(3, 1, k).unwrap();
        assert!((e - (k.conj() / k).powi(3)).norm() < 1e-14);
        let e2 = calligraphic_e(3, 2, k).unwrap();
        let r = ((k.conj() / k).powi(2) * 4.0 + (k.conj() / k).powi(4) * 3.0) / 7.0;
        assert!((e2 - r).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn harmonic_conjugation_symmetry(n in 1usize..8, m in 0i64..8, t in 0.0f64..3.0, p in 0.0f64..6.0) {
            prop_assume!(m as usize <= n);
            let a = sph_harmonic(n, -m, t, p).unwrap();
            let b = sph_harmonic(n, m, t, p).unwrap().conj() * if m % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a - b).norm() < 1e-13);
        }
    }
}
