//! Subcommand drivers. Each resolves its parameters, then either describes
//! the plan or computes a [`Report`].

use emcap::analysis::{
    argmax_n, backscatter_powers, beam_pattern, beamwidth, dof_count, lossless_dof_bound, signed_grid, sweep_gain,
    DofQuery,
};
use emcap::channel::{capacity, mode_efficiency, ChannelSpec, GainClass};
use emcap::par::{self, Execution};
use emcap::qfactor::quality_factor;
use emcap::scattering::Medium;
use emcap::sphsample::{fibonacci_points, simulate_channel, Direction};

use crate::config::{Geometry, Params};
use crate::output::{Cell, Report};
use crate::CliError;

const DEFAULT_FC: f64 = 16.8e9;
const DEFAULT_EPS_R: f64 = 16.0;
const DEFAULT_TAN_DELTA: f64 = 1e-4;
const ARGMAX_REL_TOL: f64 = 1e-4;
const BEAM_STEP_DEG: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Efficiency,
    Qfactor,
    Capacity,
    Dof,
    Backscatter,
    GainOpt,
    SampleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Efficiency => "efficiency",
            Command::Qfactor => "qfactor",
            Command::Capacity => "capacity",
            Command::Dof => "dof",
            Command::Backscatter => "backscatter",
            Command::GainOpt => "gain-opt",
            Command::SampleCheck => "sample-check",
        }
    }
}

/// Fully validated inputs of one run.
pub struct Plan {
    pub meta: Vec<(String, String)>,
    job: Job,
}

enum Job {
    Efficiency { medium: Medium, geometry: Geometry, n_max: usize },
    Qfactor { medium: Medium, geometry: Geometry, n_max: usize },
    Capacity { medium: Medium, geometry: Geometry, n_max: usize, alpha: f64, power: f64, noise_floor: f64, bits: bool },
    Dof { medium: Medium, geometry: Geometry, eta_min: f64, q_max: f64, n_cap: usize },
    Backscatter { beta: f64, n: usize },
    GainOpt { medium: Medium, r1: f64, n_max: usize, q_bar: f64 },
    SampleCheck { spec: ChannelSpec, k: usize, draws: usize, seed: u64 },
}

struct Meta(Vec<(String, String)>);

impl Meta {
    fn put(&mut self, k: &str, v: impl ToString) {
        self.0.push((k.to_string(), v.to_string()));
    }
}

fn medium(p: &Params, m: &mut Meta) -> Result<Medium, CliError> {
    let fc = p.positive("fc", p.fc, Some(DEFAULT_FC))?;
    let eps_r = p.positive("eps_r", p.eps_r, Some(DEFAULT_EPS_R))?;
    let tan_delta = p.tan_delta.unwrap_or(DEFAULT_TAN_DELTA);
    if !(tan_delta >= 0.0 && tan_delta.is_finite()) {
        return Err(CliError::Config(format!("tan_delta must be non-negative, got {tan_delta}")));
    }
    if eps_r < 1.0 {
        return Err(CliError::Config(format!("eps_r must be at least 1, got {eps_r}")));
    }
    m.put("fc", fc);
    m.put("eps_r", eps_r);
    m.put("tan_delta", tan_delta);
    Medium::new(fc, eps_r, tan_delta).map_err(|e| CliError::Config(e.to_string()))
}

fn geometry(p: &Params, m: &mut Meta, allow_sweep: bool) -> Result<Geometry, CliError> {
    let g = p.geometry(allow_sweep)?;
    let (k, v) = g.describe().split_once(" = ").map(|(a, b)| (a.to_string(), b.to_string())).expect("describe");
    m.put(&k, v);
    Ok(g)
}

pub fn plan(command: Command, p: &Params) -> Result<Plan, CliError> {
    let mut m = Meta(vec![]);
    m.put("version", concat!("emcap ", env!("CARGO_PKG_VERSION")));
    m.put("command", command.name());
    let job = match command {
        Command::Efficiency | Command::Qfactor => {
            let medium = medium(p, &mut m)?;
            let geometry = geometry(p, &mut m, true)?;
            let n_max = p.count("n_max", p.n_max, Some(5), 1)?;
            m.put("n_max", n_max);
            if command == Command::Efficiency {
                Job::Efficiency { medium, geometry, n_max }
            } else {
                Job::Qfactor { medium, geometry, n_max }
            }
        }
        Command::Capacity => {
            let medium = medium(p, &mut m)?;
            let geometry = geometry(p, &mut m, true)?;
            let n_max = p.count("n_max", p.n_max, Some(5), 1)?;
            let alpha = p.positive("alpha", p.alpha, Some(0.1))?;
            let power = p.positive("power", p.power, Some(1.0))?;
            let noise_floor = p.positive("noise_floor", p.noise_floor, Some(1.0))?;
            let bits = p.bits.unwrap_or(false);
            m.put("n_max", n_max);
            m.put("alpha", alpha);
            m.put("power", power);
            m.put("noise_floor", noise_floor);
            m.put("units", if bits { "bits" } else { "nats" });
            Job::Capacity { medium, geometry, n_max, alpha, power, noise_floor, bits }
        }
        Command::Dof => {
            let medium = medium(p, &mut m)?;
            let geometry = geometry(p, &mut m, true)?;
            let eta_min = p.positive("eta_min", p.eta_min, Some(0.5))?;
            if eta_min > 1.0 {
                return Err(CliError::Config(format!("eta_min must not exceed 1, got {eta_min}")));
            }
            let q_max = p.positive("q_max", p.q_max, Some(f64::INFINITY))?;
            let n_cap = p.count("n_cap", p.n_cap, Some(60), 1)?;
            m.put("eta_min", eta_min);
            m.put("q_max", q_max);
            m.put("n_cap", n_cap);
            Job::Dof { medium, geometry, eta_min, q_max, n_cap }
        }
        Command::Backscatter => {
            let beta = p.positive("beta", p.beta, None)?;
            if !beta.is_finite() || beta == 1.0 {
                return Err(CliError::Config(format!("beta must be finite and differ from 1, got {beta}")));
            }
            let n = p.count("n", p.n, Some(80), 1)?;
            m.put("beta", beta);
            m.put("n", n);
            Job::Backscatter { beta, n }
        }
        Command::GainOpt => {
            let medium = medium(p, &mut m)?;
            let r1 = match geometry(p, &mut m, false)? {
                Geometry::Single(r) => r,
                Geometry::Sweep { .. } => unreachable!(),
            };
            let n_max = p.count("n_max", p.n_max, Some(8), 1)?;
            let q_bar = p.positive("q_bar", p.q_bar, None)?;
            m.put("n_max", n_max);
            m.put("q_bar", q_bar);
            m.put("argmax_rel_tol", ARGMAX_REL_TOL);
            m.put("beam_step_deg", BEAM_STEP_DEG);
            Job::GainOpt { medium, r1, n_max, q_bar }
        }
        Command::SampleCheck => {
            let medium = medium(p, &mut m)?;
            let r1 = match geometry(p, &mut m, false)? {
                Geometry::Single(r) => r,
                Geometry::Sweep { .. } => unreachable!(),
            };
            let n_max = p.count("n_max", p.n_max, Some(3), 1)?;
            let alpha = p.positive("alpha", p.alpha, Some(0.1))?;
            if alpha >= 1.0 {
                return Err(CliError::Config(format!("alpha must be below 1, got {alpha}")));
            }
            let power = p.positive("power", p.power, Some(1.0))?;
            let noise_floor = p.positive("noise_floor", p.noise_floor, Some(1.0))?;
            let k = p.count("k", p.k, Some(4096), 8)?;
            if (k as f64) < alpha * (n_max * n_max) as f64 {
                return Err(CliError::Config(format!("k = {k} is below alpha * n_max^2")));
            }
            let draws = p.count("draws", p.draws, Some(20_000), 2)?;
            let seed = p.seed.unwrap_or(0);
            m.put("n_max", n_max);
            m.put("alpha", alpha);
            m.put("power", power);
            m.put("noise_floor", noise_floor);
            m.put("k", k);
            m.put("draws", draws);
            m.put("seed", seed);
            let spec = ChannelSpec { medium, r1, n_max, alpha, noise_floor, power };
            Job::SampleCheck { spec, k, draws, seed }
        }
    };
    Ok(Plan { meta: m.0, job })
}

impl Plan {
    /// Human-readable summary printed by `--dry-run`.
    pub fn describe(&self) -> String {
        let mut s: String = self.meta.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        let work = match &self.job {
            Job::Efficiency { geometry, n_max, .. } | Job::Qfactor { geometry, n_max, .. } => {
                format!("{} radii x {} mode classes", points(geometry), 2 * n_max)
            }
            Job::Capacity { geometry, n_max, .. } => format!("{} radii x {} mode classes", points(geometry), 2 * n_max),
            Job::Dof { geometry, n_cap, .. } => format!("{} radii, orders up to {n_cap}", points(geometry)),
            Job::Backscatter { n, .. } => format!("orders 1..={n}"),
            Job::GainOpt { n_max, .. } => format!("truncation orders 1..={n_max}"),
            Job::SampleCheck { draws, k, .. } => format!("{k} points, {draws} draws in each direction"),
        };
        s.push_str(&format!("plan = {work}\n"));
        s
    }

    pub fn run(self, exec: Execution) -> Result<Report, CliError> {
        let mut r = Report { meta: self.meta, ..Default::default() };
        match self.job {
            Job::Efficiency { medium, geometry, n_max } => {
                r.columns = vec!["r1_over_lambda", "n", "l", "eta"];
                let radii = geometry.radii(medium.wavelength());
                let rows = par::map(exec, &radii, |&(x, r1)| -> Result<Vec<Vec<Cell>>, CliError> {
                    let mut out = vec![];
                    for n in 1..=n_max {
                        for l in [1u8, 2] {
                            let eta = mode_efficiency(n, l, &medium, r1)?;
                            out.push(vec![x.into(), n.into(), l.into(), eta.into()]);
                        }
                    }
                    Ok(out)
                });
                for block in rows {
                    r.rows.extend(block?);
                }
            }
            Job::Qfactor { medium, geometry, n_max } => {
                r.columns = vec![
                    "r1_over_lambda",
                    "n",
                    "l",
                    "eta",
                    "q_e_in",
                    "q_m_in",
                    "q_e_out",
                    "q_m_out",
                    "q_tilde",
                    "q",
                ];
                let radii = geometry.radii(medium.wavelength());
                let rows = par::map(exec, &radii, |&(x, r1)| -> Result<Vec<Vec<Cell>>, CliError> {
                    let mut out = vec![];
                    for n in 1..=n_max {
                        for l in [1u8, 2] {
                            let q = quality_factor(n, l, &medium, r1)?;
                            out.push(vec![
                                x.into(),
                                n.into(),
                                l.into(),
                                q.eta.into(),
                                q.q_e_in.into(),
                                q.q_m_in.into(),
                                q.q_e_out.into(),
                                q.q_m_out.into(),
                                q.q_tilde.into(),
                                q.q.into(),
                            ]);
                        }
                    }
                    Ok(out)
                });
                for block in rows {
                    r.rows.extend(block?);
                }
            }
            Job::Capacity { medium, geometry, n_max, alpha, power, noise_floor, bits } => {
                r.columns = vec![
                    "r1_over_lambda",
                    if bits { "capacity_bits" } else { "capacity_nats" },
                    "water_level",
                    "active_channels",
                ];
                let radii = geometry.radii(medium.wavelength());
                let rows = par::map(exec, &radii, |&(x, r1)| -> Result<Vec<Cell>, CliError> {
                    let spec = ChannelSpec { medium, r1, n_max, alpha, noise_floor, power };
                    let (modes, res) = capacity(&spec, Execution::Sequential)?;
                    let classes: Vec<GainClass> = modes
                        .iter()
                        .map(|m| GainClass { gain_sq: m.gain_sq, multiplicity: m.multiplicity })
                        .collect();
                    let c = if bits { res.capacity_bits() } else { res.capacity };
                    Ok(vec![x.into(), c.into(), res.water_level.into(), res.active_channels(&classes).into()])
                });
                for row in rows {
                    r.rows.push(row?);
                }
            }
            Job::Dof { medium, geometry, eta_min, q_max, n_cap } => {
                r.columns = vec!["r1_over_lambda", "k0_r1", "dof", "lossless_bound"];
                let radii = geometry.radii(medium.wavelength());
                let rows = par::map(exec, &radii, |&(x, r1)| -> Result<Vec<Cell>, CliError> {
                    let dof = dof_count(&DofQuery { medium, r1, eta_min, q_max, n_cap })?;
                    let kr = medium.k0() * r1;
                    Ok(vec![x.into(), kr.into(), dof.into(), lossless_dof_bound(kr).into()])
                });
                for row in rows {
                    r.rows.push(row?);
                }
            }
            Job::Backscatter { beta, n } => {
                r.columns = vec!["n", "k0_r2", "p_l", "p_s", "p_t", "ratio"];
                let orders: Vec<usize> = (1..=n).collect();
                let rows = par::map(exec, &orders, |&k| backscatter_powers(k, 1.0, beta * k as f64));
                for row in rows {
                    let b = row?;
                    r.rows.push(vec![
                        b.n.into(),
                        b.k0_r2.into(),
                        b.p_l.into(),
                        b.p_s.into(),
                        b.p_t.into(),
                        b.ratio.into(),
                    ]);
                    if b.n == n {
                        r.summary.push(("ratio", b.ratio.into()));
                    }
                }
            }
            Job::GainOpt { medium, r1, n_max, q_bar } => {
                r.columns = vec!["n_max", "gain", "directivity", "q_j", "nu", "q_min"];
                let results = sweep_gain(&medium, r1, n_max, q_bar)?;
                for g in &results {
                    r.rows.push(vec![
                        g.n_max.into(),
                        g.gain.into(),
                        g.directivity.into(),
                        g.q_j.into(),
                        g.nu.into(),
                        g.q_min.into(),
                    ]);
                }
                let best = argmax_n(&results, ARGMAX_REL_TOL)
                    .ok_or_else(|| CliError::Numerical("no feasible truncation order".into()))?;
                let grid = signed_grid(BEAM_STEP_DEG);
                let pattern = beam_pattern(&best.excitation, &medium, r1, &grid, &[0.0])?;
                let bw = beamwidth(&pattern)?;
                r.summary.push(("argmax_n", best.n_max.into()));
                r.summary.push(("gain", best.gain.into()));
                r.summary.push(("directivity", best.directivity.into()));
                r.summary.push(("beamwidth_deg", bw.into()));
                r.summary.push(("q_j", best.q_j.into()));
            }
            Job::SampleCheck { spec, k, draws, seed } => {
                r.columns = vec!["direction", "n", "l", "gain_sq", "sigma", "predicted", "rel_error"];
                let pts = fibonacci_points(k, spec.alpha)?;
                for (name, dir, s) in [("forward", Direction::Forward, seed), ("reverse", Direction::Reverse, seed + 1)] {
                    let sim = simulate_channel(dir, &spec, &pts, draws, s, exec)?;
                    for c in &sim.classes {
                        r.rows.push(vec![
                            name.into(),
                            c.n.into(),
                            c.l.into(),
                            c.gain_sq.into(),
                            c.sigma.into(),
                            c.predicted.into(),
                            (c.gain_sq / c.predicted - 1.0).into(),
                        ]);
                    }
                    let (d, o) = sim.noise_errors();
                    if dir == Direction::Forward {
                        r.summary.push(("gram_deviation", sim.gram_deviation.into()));
                        r.summary.push(("forward_noise_diag_error", d.into()));
                        r.summary.push(("forward_noise_offdiag", o.into()));
                    } else {
                        r.summary.push(("reverse_noise_diag_error", d.into()));
                        r.summary.push(("reverse_noise_offdiag", o.into()));
                    }
                }
            }
        }
        Ok(r)
    }
}

fn points(g: &Geometry) -> usize {
    match g {
        Geometry::Single(_) => 1,
        Geometry::Sweep { count, .. } => *count,
    }
}
