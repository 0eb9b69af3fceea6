use crate::error::{invalid, Error, Result};
use crate::specfun::BesselTable;
use crate::C64;

/// Power balance of a short dipole receiver facing an order-`n` source at
/// distance `R2`, normalised so the nominal consumed power is one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackscatterResult {
    pub n: usize,
    pub k0_r2: f64,
    /// Power delivered to the load.
    pub p_l: f64,
    /// Extra power consumed at the source because of the receiver.
    pub p_s: f64,
    /// `1 + p_s`
    pub p_t: f64,
    /// `p_l / p_t`
    pub ratio: f64,
}

pub fn backscatter_powers(n: usize, k0: f64, r2: f64) -> Result<BackscatterResult> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let z = k0 * r2;
    if !(z > 0.0 && z.is_finite()) {
        return Err(invalid(format!("need k0 R2 > 0, got {z}")));
    }
    let t = BesselTable::new(n, C64::new(z, 0.0))?;
    let j = t.j(n as i64).re;
    let y = t.y(n as i64).re;
    let w = (2 * n + 1) as f64;
    let p_l = 3.0 / 32.0 * w * (y * y + j * j);
    let p_s = 3.0 / 16.0 * w * (y * y - j * j);
    let p_t = 1.0 + p_s;
    let ratio = if y.abs() > 1e100 {
        let r = j / y;
        3.0 / 32.0 * w * (1.0 + r * r) / (1.0 / (y * y) + 3.0 / 16.0 * w * (1.0 - r * r))
    } else {
        p_l / p_t
    };
    Ok(BackscatterResult { n, k0_r2: z, p_l, p_s, p_t, ratio })
}

/// `P_L / P_T` along `k0 R2 = n beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitTrace {
    pub beta: f64,
    pub values: Vec<(usize, f64)>,
    /// Ratio at the largest `n`.
    pub tail: f64,
}

pub fn backscatter_limit(beta: f64, ns: &[usize]) -> Result<LimitTrace> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    if beta == 1.0 {
        return Err(Error::Domain("the limit is undefined at beta = 1".into()));
    }
    if ns.is_empty() {
        return Err(invalid("empty order sequence"));
    }
    let mut values = Vec::with_capacity(ns.len());
    for &n in ns {
        let r = backscatter_powers(n, 1.0, n as f64 * beta)?;
        values.push((n, r.ratio));
    }
    let tail = values.iter().max_by_key(|(n, _)| *n).unwrap().1;
    Ok(LimitTrace { beta, values, tail })
}

/// Growth factors and prefactors of `j_n(n beta) ~ C1 f1^n / n` and
/// `y_n(n beta) ~ C2 f2^n / n` for `beta < 1`: returns `(f1, f2, C1, C2)`.
pub fn evanescent_constants(beta: f64) -> Result<(f64, f64, f64, f64)> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("need 0 < beta < 1, got {beta}")));
    }
    let s = (1.0 - beta * beta).sqrt();
    let f1 = s.exp() * (1.0 - s) / beta;
    let f2 = (1.0 + s) / (beta * s.exp());
    let c1 = 0.5 / beta * ((1.0 - s) / s).sqrt();
    let c2 = -1.0 / beta * ((1.0 + s) / s).sqrt();
    Ok((f1, f2, c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{sph_j, sph_y};

    #[test]
    fn far_separation() {
        let r = backscatter_powers(1, 1.0, 100.0).unwrap();
        assert!((r.p_l / (9.0 / (32.0 * 1e4)) - 1.0).abs() < 0.05);
        assert!(r.p_s.abs() < 1e-3);
    }

    #[test]
    fn near_field_load_exceeds_one() {
        assert!(backscatter_powers(20, 1.0, 8.0).unwrap().p_l > 1.0);
    }

    #[test]
    fn direct_recomputation() {
        let z = C64::new(2.0, 0.0);
        let j = sph_j(3, z).unwrap().re;
        let y = sph_y(3, z).unwrap().re;
        let r = backscatter_powers(3, 2.0, 1.0).unwrap();
        assert!((r.p_l - 21.0 / 32.0 * (j * j + y * y)).abs() < 1e-12 * r.p_l);
        assert!((r.p_t - 1.0 - 21.0 / 16.0 * (y * y - j * j)).abs() < 1e-12 * r.p_t);
    }

    #[test]
    fn limits() {
        assert!((backscatter_limit(0.8, &[80]).unwrap().tail - 0.5).abs() < 0.02);
        assert!(backscatter_limit(1.25, &[80]).unwrap().tail < 0.05);
        assert!(backscatter_limit(1.0, &[10]).is_err());
        let t = backscatter_limit(0.5, &[20, 40, 80]).unwrap();
        let d: Vec<f64> = t.values.iter().map(|(_, r)| (r - 0.5).abs()).collect();
        assert!(d[0] > d[1] && d[1] > d[2]);
    }

    #[test]
    fn evanescent_growth_matches_bessel_values() {
        let beta = 0.6;
        let (f1, f2, c1, c2) = evanescent_constants(beta).unwrap();
        let n = 200usize;
        let z = C64::new(n as f64 * beta, 0.0);
        let j = sph_j(n as i64, z).unwrap().re;
        let y = sph_y(n as i64, z).unwrap().re;
        let nf = n as f64;
        assert!((j * nf / (c1 * f1.powi(n as i32)) - 1.0).abs() < 0.01);
        assert!((y * nf / (c2 * f2.powi(n as i32)) - 1.0).abs() < 0.01);
    }
}
