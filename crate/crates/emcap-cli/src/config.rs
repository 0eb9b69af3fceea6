//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every tunable value. Flags and file sections both fill this shape.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub fc: Option<f64>,
    pub eps_r: Option<f64>,
    pub tan_delta: Option<f64>,
    pub r1: Option<f64>,
    pub sweep_r1: Option<String>,
    pub n_max: Option<usize>,
    pub n_cap: Option<usize>,
    pub alpha: Option<f64>,
    pub power: Option<f64>,
    pub noise_floor: Option<f64>,
    pub q_bar: Option<f64>,
    pub eta_min: Option<f64>,
    pub q_max: Option<f64>,
    pub beta: Option<f64>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub draws: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub bits: Option<bool>,
}

impl Params {
    /// Fields set in `self` win over `base`. Geometry is taken as a unit.
    pub fn over(self, base: Params) -> Params {
        let geometry_set = self.r1.is_some() || self.sweep_r1.is_some();
        let (r1, sweep_r1) = if geometry_set { (self.r1, self.sweep_r1) } else { (base.r1, base.sweep_r1) };
        Params {
            fc: self.fc.or(base.fc),
            eps_r: self.eps_r.or(base.eps_r),
            tan_delta: self.tan_delta.or(base.tan_delta),
            r1,
            sweep_r1,
            n_max: self.n_max.or(base.n_max),
            n_cap: self.n_cap.or(base.n_cap),
            alpha: self.alpha.or(base.alpha),
            power: self.power.or(base.power),
            noise_floor: self.noise_floor.or(base.noise_floor),
            q_bar: self.q_bar.or(base.q_bar),
            eta_min: self.eta_min.or(base.eta_min),
            q_max: self.q_max.or(base.q_max),
            beta: self.beta.or(base.beta),
            n: self.n.or(base.n),
            k: self.k.or(base.k),
            draws: self.draws.or(base.draws),
            seed: self.seed.or(base.seed),
            format: self.format.or(base.format),
            output: self.output.or(base.output),
            bits: self.bits.or(base.bits),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    medium: Option<MediumSection>,
    geometry: Option<GeometrySection>,
    modes: Option<ModesSection>,
    channel: Option<ChannelSection>,
    constraint: Option<ConstraintSection>,
    backscatter: Option<BackscatterSection>,
    sampling: Option<SamplingSection>,
    output: Option<OutputSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MediumSection {
    fc: Option<f64>,
    eps_r: Option<f64>,
    tan_delta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometrySection {
    r1: Option<f64>,
    sweep_r1: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModesSection {
    n_max: Option<usize>,
    n_cap: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    alpha: Option<f64>,
    power: Option<f64>,
    noise_floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintSection {
    q_bar: Option<f64>,
    eta_min: Option<f64>,
    q_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BackscatterSection {
    beta: Option<f64>,
    n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplingSection {
    k: Option<usize>,
    draws: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    format: Option<Format>,
    path: Option<PathBuf>,
    bits: Option<bool>,
}

pub fn load_file(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_file(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

fn parse_file(text: &str) -> Result<Params, String> {
    let f: FileConfig = toml::from_str(text).map_err(|e| e.to_string())?;
    let m = f.medium.unwrap_or_default();
    let g = f.geometry.unwrap_or_default();
    let md = f.modes.unwrap_or_default();
    let c = f.channel.unwrap_or_default();
    let q = f.constraint.unwrap_or_default();
    let b = f.backscatter.unwrap_or_default();
    let s = f.sampling.unwrap_or_default();
    let o = f.output.unwrap_or_default();
    Ok(Params {
        fc: m.fc,
        eps_r: m.eps_r,
        tan_delta: m.tan_delta,
        r1: g.r1,
        sweep_r1: g.sweep_r1,
        n_max: md.n_max,
        n_cap: md.n_cap,
        alpha: c.alpha,
        power: c.power,
        noise_floor: c.noise_floor,
        q_bar: q.q_bar,
        eta_min: q.eta_min,
        q_max: q.q_max,
        beta: b.beta,
        n: b.n,
        k: s.k,
        draws: s.draws,
        seed: s.seed,
        format: o.format,
        output: o.path,
        bits: o.bits,
    })
}

/// `R1 / lambda` values: a single radius or an inclusive linear sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Single(f64),
    Sweep { lo: f64, hi: f64, count: usize },
}

impl Geometry {
    /// Radii in metres for wavelength `lambda`, with their `R1 / lambda`.
    pub fn radii(&self, lambda: f64) -> Vec<(f64, f64)> {
        match *self {
            Geometry::Single(r1) => vec![(r1 / lambda, r1)],
            Geometry::Sweep { lo, hi, count } => (0..count)
                .map(|i| {
                    let x = if count == 1 { lo } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 };
                    (x, x * lambda)
                })
                .collect(),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Geometry::Single(r1) => format!("r1 = {r1}"),
            Geometry::Sweep { lo, hi, count } => format!("sweep_r1 = {lo}:{hi}:{count}"),
        }
    }
}

pub fn parse_sweep(s: &str) -> Result<Geometry, CliError> {
    let bad = || CliError::Config(format!("sweep_r1: expected lo:hi:count with 0 < lo <= hi, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 || (count > 1 && hi == lo) {
        return Err(bad());
    }
    Ok(Geometry::Sweep { lo, hi, count })
}

/// Lookup helpers that name the offending field on failure.
impl Params {
    pub fn positive(&self, name: &str, v: Option<f64>, default: Option<f64>) -> Result<f64, CliError> {
        let x = v.or(default).ok_or_else(|| CliError::Config(format!("{name} is required")))?;
        if !(x > 0.0) || x.is_nan() {
            return Err(CliError::Config(format!("{name} must be positive, got {x}")));
        }
        Ok(x)
    }

    pub fn count(&self, name: &str, v: Option<usize>, default: Option<usize>, min: usize) -> Result<usize, CliError> {
        let x = v.or(default).ok_or_else(|| CliError::Config(format!("{name} is required")))?;
        if x < min {
            return Err(CliError::Config(format!("{name} must be at least {min}, got {x}")));
        }
        Ok(x)
    }

    pub fn geometry(&self, allow_sweep: bool) -> Result<Geometry, CliError> {
        match (self.r1, &self.sweep_r1) {
            (Some(_), Some(_)) => Err(CliError::Config("r1 and sweep_r1 are mutually exclusive".into())),
            (Some(r), None) => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(CliError::Config(format!("r1 must be positive, got {r}")));
                }
                Ok(Geometry::Single(r))
            }
            (None, Some(s)) if allow_sweep => parse_sweep(s),
            (None, Some(_)) => Err(CliError::Config("sweep_r1 is not supported here; give r1".into())),
            (None, None) => Err(CliError::Config("r1 is required".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_sections_map_to_params() {
        let p = parse_file(
            "[medium]\neps_r = 16.0\ntan_delta = 1e-4\n[geometry]\nsweep_r1 = \"0.1:1:10\"\n[output]\nformat = \"json\"\n",
        )
        .unwrap();
        assert_eq!(p.eps_r, Some(16.0));
        assert_eq!(p.format, Some(Format::Json));
        assert_eq!(p.sweep_r1.as_deref(), Some("0.1:1:10"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse_file("[medium]\neps = 3.0\n").unwrap_err();
        assert!(e.contains("eps"), "{e}");
    }

    #[test]
    fn flags_override_file() {
        let file = Params { eps_r: Some(4.0), tan_delta: Some(1e-3), sweep_r1: Some("0.1:1:3".into()), ..Default::default() };
        let cli = Params { eps_r: Some(16.0), r1: Some(1e-3), ..Default::default() };
        let p = cli.over(file);
        assert_eq!(p.eps_r, Some(16.0));
        assert_eq!(p.tan_delta, Some(1e-3));
        assert_eq!(p.geometry(true).unwrap(), Geometry::Single(1e-3));
    }

    #[test]
    fn sweep_parsing() {
        assert_eq!(parse_sweep("0.01:1.2:120").unwrap(), Geometry::Sweep { lo: 0.01, hi: 1.2, count: 120 });
        assert!(parse_sweep("1:0.5:3").is_err());
        assert!(parse_sweep("0.1:1").is_err());
        let g = Geometry::Sweep { lo: 0.5, hi: 1.0, count: 3 };
        let r = g.radii(2.0);
        assert_eq!(r[2], (1.0, 2.0));
    }
}
