//! Point sets on the observation sphere, the sampled Gram matrix of the
//! outgoing waves, and Monte-Carlo runs of the forward and reverse sampled
//! channels with thermal noise.
//!
//! Every draw `d` uses its own ChaCha8 stream (`seed`, stream `d`), and draws
//! are processed in fixed blocks merged in block order, so results do not
//! depend on the execution strategy.

use std::f64::consts::PI;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{mode_powers, ChannelSpec};
use crate::error::{invalid, Error, Result};
use crate::modes::{mode_list, radial_factors, vector_harmonics, Family, ModeIndex, Vec3};
use crate::par::{self, Execution};
use crate::scattering::scattering_coeffs;
use crate::specfun::BesselTable;
use crate::C64;

const BLOCK: usize = 512;

/// Directions on the unit sphere with the sampling density `alpha`; the
/// implied radius is `k0 R2 = sqrt(K / alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub alpha: f64,
    /// `(theta, phi)` per point.
    pub positions: Vec<(f64, f64)>,
    /// Smallest chord distance between two points on the unit sphere.
    pub min_pair_distance: f64,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `k0 R2`
    pub fn k0_r2(&self) -> f64 {
        (self.len() as f64 / self.alpha).sqrt()
    }

    /// `min_pair_distance * sqrt(K)`
    pub fn beta(&self) -> f64 {
        self.min_pair_distance * (self.len() as f64).sqrt()
    }

    /// Point counts per octant.
    pub fn octant_counts(&self) -> [usize; 8] {
        let mut c = [0; 8];
        for &(t, p) in &self.positions {
            let (x, y, z) = (t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
            let i = (x >= 0.0) as usize | ((y >= 0.0) as usize) << 1 | ((z >= 0.0) as usize) << 2;
            c[i] += 1;
        }
        c
    }
}

/// Golden-angle spiral with `K` points.
pub fn fibonacci_points(k: usize, alpha: f64) -> Result<PointSet> {
    if k < 8 {
        return Err(invalid(format!("need at least 8 points, got {k}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    let positions: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / k as f64;
            (z.acos(), (i as f64 * golden).rem_euclid(2.0 * PI))
        })
        .collect();
    let min_pair_distance = min_chord(&positions);
    Ok(PointSet { alpha, positions, min_pair_distance })
}

fn min_chord(pos: &[(f64, f64)]) -> f64 {
    let mut pts: Vec<[f64; 3]> =
        pos.iter().map(|&(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]).collect();
    pts.sort_by(|a, b| b[2].total_cmp(&a[2]));
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i][2] - pts[j][2] >= best {
                break;
            }
            let d = ((pts[i][0] - pts[j][0]).powi(2)
                + (pts[i][1] - pts[j][1]).powi(2)
                + (pts[i][2] - pts[j][2]).powi(2))
            .sqrt();
            best = best.min(d);
        }
    }
    best
}

fn check_density(points: &PointSet, n_max: usize) -> Result<()> {
    let bound = points.alpha * (n_max * n_max) as f64;
    if (points.len() as f64) < bound {
        return Err(Error::ApproximationInvalid { k: points.len(), bound });
    }
    Ok(())
}

/// Surface-normalised waves of every mode with `n <= n_max` at every point,
/// `out[[point, mode]]`, in [`mode_list`] order.
fn sampled_waves(points: &PointSet, n_max: usize, family: Family) -> Result<(Vec<ModeIndex>, Array2<Vec3>)> {
    let modes = mode_list(n_max);
    let table = BesselTable::new(n_max + 1, C64::new(points.k0_r2(), 0.0))?;
    let radial: Vec<[C64; 3]> = modes
        .iter()
        .map(|m| {
            let f = radial_factors(family, m.n, m.l, &table);
            let ns = f.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            [f[0] / ns, f[1] / ns, f[2] / ns]
        })
        .collect();
    let zero = C64::new(0.0, 0.0);
    let mut out = Array2::from_elem((points.len(), modes.len()), [zero; 3]);
    for (j, &(t, p)) in points.positions.iter().enumerate() {
        for (a, m) in modes.iter().enumerate() {
            let h = vector_harmonics(m.n, m.m, t, p);
            let mut v = [zero; 3];
            for (i, f) in radial[a].iter().enumerate() {
                if *f != zero {
                    for c in 0..3 {
                        v[c] += f * h[i][c];
                    }
                }
            }
            out[[j, a]] = v;
        }
    }
    Ok((modes, out))
}

fn gram_of(u: &Array2<Vec3>) -> Array2<C64> {
    let (k, m) = u.dim();
    let mut g = Array2::zeros((m, m));
    for a in 0..m {
        for b in a..m {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..k {
                let (x, y) = (&u[[j, a]], &u[[j, b]]);
                s += x[0].conj() * y[0] + x[1].conj() * y[1] + x[2].conj() * y[2];
            }
            s *= 4.0 * PI / k as f64;
            g[[a, b]] = s;
            g[[b, a]] = s.conj();
        }
    }
    g
}

/// `(4 pi / K) sum_j u_a(s_j)^H u_b(s_j)` over the `2N(N+2)` outgoing waves.
pub fn gram_matrix(points: &PointSet, n_max: usize) -> Result<Array2<C64>> {
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    check_density(points, n_max)?;
    let (_, u) = sampled_waves(points, n_max, Family::U)?;
    Ok(gram_of(&u))
}

/// `max |G - I|`
pub fn gram_deviation(g: &Array2<C64>) -> f64 {
    g.indexed_iter()
        .map(|((a, b), v)| (v - if a == b { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).norm())
        .fold(0.0, f64::max)
}

/// Thermal field samples at every point of one draw.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    pub seed: u64,
    pub draw: u64,
    /// `E{e e^H} = variance * I` per point.
    pub samples: Vec<Vec3>,
}

impl NoiseDraw {
    /// Independent circular Gaussian field at each point.
    pub fn generate(points: &PointSet, variance: f64, seed: u64, draw: u64) -> Self {
        let mut rng = stream(seed, draw);
        let s = (variance / 2.0).sqrt();
        let samples = (0..points.len())
            .map(|_| std::array::from_fn(|_| cnormal(&mut rng, s)))
            .collect();
        Self { seed, draw, samples }
    }
}

fn stream(seed: u64, draw: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    rng
}

fn cnormal(rng: &mut ChaCha8Rng, s: f64) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * s, im * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// Estimated squared gain of one `(n, l)` class, pooled over `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassGain {
    pub n: usize,
    pub l: u8,
    pub gain_sq: f64,
    /// Monte-Carlo standard error of `gain_sq`.
    pub sigma: f64,
    /// `(3 alpha / 2) eta`
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub direction: Direction,
    pub seed: u64,
    pub n_draws: usize,
    pub modes: Vec<ModeIndex>,
    pub classes: Vec<ClassGain>,
    /// Sample covariance of the output noise over `4 k_B T B`.
    pub noise_cov: Array2<C64>,
    /// Largest `|G - I|` of the sampled Gram matrix.
    pub gram_deviation: f64,
}

impl SimulationResult {
    pub fn class(&self, n: usize, l: u8) -> Option<&ClassGain> {
        self.classes.iter().find(|c| c.n == n && c.l == l)
    }

    /// `(max |diag - 1|, max |offdiag|)` of the normalised noise covariance.
    pub fn noise_errors(&self) -> (f64, f64) {
        let mut d = 0.0f64;
        let mut o = 0.0f64;
        for ((a, b), v) in self.noise_cov.indexed_iter() {
            if a == b {
                d = d.max((v.re - 1.0).abs());
            } else {
                o = o.max(v.norm());
            }
        }
        (d, o)
    }
}

struct BlockStats {
    sxy: Vec<C64>,
    sxx: Vec<f64>,
    syy: Vec<f64>,
    zz: Array2<C64>,
}

impl BlockStats {
    fn zeros(m: usize) -> Self {
        Self { sxy: vec![C64::new(0.0, 0.0); m], sxx: vec![0.0; m], syy: vec![0.0; m], zz: Array2::zeros((m, m)) }
    }

    fn add(&mut self, o: &BlockStats) {
        for a in 0..self.sxy.len() {
            self.sxy[a] += o.sxy[a];
            self.sxx[a] += o.sxx[a];
            self.syy[a] += o.syy[a];
        }
        self.zz += &o.zz;
    }
}

/// Runs `n_draws` uses of the sampled channel in the normalised units
/// `X` (input) and `Y` (output), with inputs of equal power on every mode.
///
/// Forward: the field of the source is sampled at the points, thermal noise
/// is drawn independently per point, and both are projected onto the
/// sampled outgoing waves. Reverse: point dipoles are synthesised from the
/// inputs, and the interior field is projected onto the regular waves, with
/// thermal noise drawn in the mode basis.
pub fn simulate_channel(
    direction: Direction,
    spec: &ChannelSpec,
    points: &PointSet,
    n_draws: usize,
    seed: u64,
    exec: Execution,
) -> Result<SimulationResult> {
    spec.validate()?;
    if (spec.alpha - points.alpha).abs() > 1e-12 * spec.alpha {
        return Err(invalid(format!("point set alpha {} differs from channel alpha {}", points.alpha, spec.alpha)));
    }
    if n_draws < 2 {
        return Err(invalid("need at least two draws"));
    }
    if !(spec.power > 0.0) {
        return Err(invalid("power must be positive to estimate gains"));
    }
    check_density(points, spec.n_max)?;
    let k = points.len();
    let (modes, u) = sampled_waves(points, spec.n_max, Family::U)?;
    let m = modes.len();
    let g = gram_of(&u);

    // Transfer from X to Y up to the sampling approximations.
    let mut amp = Vec::with_capacity(m);
    let mut eta = Vec::with_capacity(m);
    for md in &modes {
        let (rho, tau) = mode_powers(md.n, md.l, &spec.medium, spec.r1)?;
        let kt = spec.medium.k1() * scattering_coeffs(md.n, md.l, &spec.medium, spec.r1)?.t;
        let nn1 = (md.n * (md.n + 1)) as f64;
        let kr = points.k0_r2();
        let table = BesselTable::new(md.n + 1, C64::new(kr, 0.0))?;
        let ns = radial_factors(Family::U, md.n, md.l, &table).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        // sqrt(6 pi / (w mu0 k0)) sqrt(K / 4 pi) G / sqrt(w mu0 tau)
        let a = -(kt / kt.norm()) * (rho / tau).sqrt() * ns * (1.5 * k as f64 / nn1).sqrt();
        amp.push(a);
        eta.push(rho / tau);
    }
    let transfer = match direction {
        Direction::Forward => Array2::from_shape_fn((m, m), |(a, b)| g[[a, b]] * amp[b]),
        Direction::Reverse => {
            let (_, us) = sampled_waves(points, spec.n_max, Family::UConj)?;
            let gs = gram_of(&us);
            Array2::from_shape_fn((m, m), |(a, b)| amp[a] * gs[[a, b]])
        }
    };
    let gram_dev = gram_deviation(&g);

    let proj = match direction {
        Direction::Forward => Some(noise_projection(&u)),
        Direction::Reverse => None,
    };
    let x_sd = (spec.power / m as f64).sqrt();
    let z_sd = (spec.noise_floor / 2.0).sqrt();
    let n_blocks = n_draws.div_ceil(BLOCK);
    let blocks = par::map_range(exec, n_blocks, |b| {
        let lo = b * BLOCK;
        let hi = (lo + BLOCK).min(n_draws);
        run_block(lo, hi, seed, m, k, x_sd, z_sd, &transfer, proj.as_ref())
    });
    let mut tot = BlockStats::zeros(m);
    for b in &blocks {
        tot.add(b);
    }

    let d = n_draws as f64;
    let mut per_mode = Vec::with_capacity(m);
    for a in 0..m {
        let h = tot.sxy[a] / tot.sxx[a];
        let res = (tot.syy[a] - tot.sxy[a].norm_sqr() / tot.sxx[a]).max(0.0) / (d - 1.0);
        let var_h = res / tot.sxx[a];
        per_mode.push((h.norm_sqr(), 2.0 * h.norm_sqr() * var_h));
    }
    let mut classes = Vec::new();
    for n in 1..=spec.n_max {
        for l in [1u8, 2] {
            let idx: Vec<usize> = (0..m).filter(|&a| modes[a].n == n && modes[a].l == l).collect();
            let c = idx.len() as f64;
            let gain_sq = idx.iter().map(|&a| per_mode[a].0).sum::<f64>() / c;
            let sigma = idx.iter().map(|&a| per_mode[a].1).sum::<f64>().sqrt() / c;
            classes.push(ClassGain { n, l, gain_sq, sigma, predicted: 1.5 * spec.alpha * eta[idx[0]] });
        }
    }
    let noise_cov = tot.zz.mapv(|v| v / (d * spec.noise_floor));
    Ok(SimulationResult { direction, seed, n_draws, modes, classes, noise_cov, gram_deviation: gram_dev })
}

/// Real form of `Z_a = sqrt(4 pi / K) sum_j u_a(s_j)^H e_j` acting on rows
/// `[Re e | Im e]`.
fn noise_projection(u: &Array2<Vec3>) -> Array2<f64> {
    let (k, m) = u.dim();
    let s = (4.0 * PI / k as f64).sqrt();
    let half = 3 * k;
    let mut p = Array2::zeros((2 * half, 2 * m));
    for j in 0..k {
        for a in 0..m {
            for c in 0..3 {
                let v = u[[j, a]][c] * s;
                let r = 3 * j + c;
                p[[r, a]] = v.re;
                p[[half + r, a]] = v.im;
                p[[r, m + a]] = -v.im;
                p[[half + r, m + a]] = v.re;
            }
        }
    }
    p
}

#[allow(clippy::too_many_arguments)]
fn run_block(
    lo: usize,
    hi: usize,
    seed: u64,
    m: usize,
    k: usize,
    x_sd: f64,
    z_sd: f64,
    transfer: &Array2<C64>,
    proj: Option<&Array2<f64>>,
) -> BlockStats {
    let rows = hi - lo;
    let mut x = Array2::<C64>::zeros((rows, m));
    let mut z = Array2::<C64>::zeros((rows, m));
    let mut raw = proj.map(|_| Array2::<f64>::zeros((rows, 6 * k)));
    for (r, d) in (lo..hi).enumerate() {
        let mut rng = stream(seed, d as u64);
        for a in 0..m {
            x[[r, a]] = cnormal(&mut rng, x_sd);
        }
        match raw.as_mut() {
            Some(e) => {
                for i in 0..3 * k {
                    let c = cnormal(&mut rng, z_sd);
                    e[[r, i]] = c.re;
                    e[[r, 3 * k + i]] = c.im;
                }
            }
            None => {
                for a in 0..m {
                    z[[r, a]] = cnormal(&mut rng, z_sd);
                }
            }
        }
    }
    if let (Some(e), Some(p)) = (raw, proj) {
        let zr = e.dot(p);
        for r in 0..rows {
            for a in 0..m {
                z[[r, a]] = C64::new(zr[[r, a]], zr[[r, m + a]]);
            }
        }
    }
    let y = x.dot(&transfer.t()) + &z;
    let mut st = BlockStats::zeros(m);
    for a in 0..m {
        let (xc, yc) = (x.column(a), y.column(a));
        for r in 0..rows {
            st.sxy[a] += yc[r] * xc[r].conj();
            st.sxx[a] += xc[r].norm_sqr();
            st.syy[a] += yc[r].norm_sqr();
        }
    }
    let zc = z.mapv(|v| v.conj());
    st.zz = z.t().dot(&zc);
    st
}
