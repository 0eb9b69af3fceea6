//! Quadrature helpers.

use crate::C64;
use gauss_quad::legendre::GaussLegendre;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let order = NonZeroUsize::new(order.max(1)).unwrap();
    GaussLegendre::new(order).as_node_weight_pairs().to_vec()
}

pub(crate) fn gl32() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

/// Composite Gauss-Legendre rule on [a, b]: `panels` equal panels with the
/// given order each. Returns (abscissa, weight) pairs.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let base = if order == 32 { gl32().to_vec() } else { gauss_legendre(order) };
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * base.len());
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in &base {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Panels needed to resolve oscillations of wavenumber `k` over length `len`.
pub(crate) fn panels_for(k: f64, len: f64) -> usize {
    ((k.abs() * len / 6.0).ceil() as usize).clamp(2, 4000)
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kr = fc * GK_WK[7];
    let mut gs = fc * GK_WG[3];
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        kr += s * GK_WK[i];
        if i % 2 == 1 {
            gs += s * GK_WG[i / 2];
        }
    }
    (kr * h, ((kr - gs) * h).norm())
}

/// Adaptive Gauss-Kronrod (7/15) integration of a complex integrand.
pub fn adaptive_gk<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> C64 {
    let mut stack = vec![(a, b, gk15(&mut f, a, b))];
    let mut total = C64::new(0.0, 0.0);
    let mut guard = 0usize;
    let scale = stack[0].2 .0.norm().max(f64::MIN_POSITIVE);
    while let Some((lo, hi, (val, err))) = stack.pop() {
        guard += 1;
        let width = (hi - lo) / (b - a);
        if err <= rel_tol * scale * width.max(1e-3) || guard > 200_000 || hi - lo < 1e-14 * (b - a) {
            total += val;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, gk15(&mut f, lo, mid)));
        stack.push((mid, hi, gk15(&mut f, mid, hi)));
    }
    total
}

/// Real-valued convenience wrapper around [`adaptive_gk`].
pub fn adaptive_gk_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    adaptive_gk(|x| C64::new(f(x), 0.0), a, b, rel_tol).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let rule = composite_rule(0.0, 2.0, 3, 8);
        let s: f64 = rule.iter().map(|&(x, w)| w * x.powi(7)).sum();
        assert!((s - 32.0).abs() < 1e-12);
    }

    #[test]
    fn gk_handles_oscillation() {
        let v = adaptive_gk_real(|x| (50.0 * x).sin() * x, 0.0, 3.0, 1e-13);
        let exact = ((150.0f64).sin() - 150.0 * (150.0f64).cos()) / 2500.0;
        assert!((v - exact).abs() < 1e-12);
    }
}
