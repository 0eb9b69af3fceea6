//! `emcap`: efficiency, Q-factor, capacity, degrees of freedom, backscatter,
//! gain and sampling runs for a dielectric-sphere source.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical or feasibility
//! error, 1 I/O failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{plan, Command};
use config::{Format, Params};
use emcap::par::Execution;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<emcap::Error> for CliError {
    fn from(e: emcap::Error) -> Self {
        match e {
            emcap::Error::InvalidArgument(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "emcap", version, about = "Dielectric-sphere channel analysis")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML file with [medium], [geometry], [modes], [channel], [constraint],
    /// [backscatter], [sampling] and [output] sections. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Validate and print the resolved plan without computing.
    #[arg(long, global = true)]
    dry_run: bool,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report capacity in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Per-mode efficiency over R1.
    Efficiency(GridArgs),
    /// Per-mode quality factor and its interior/exterior parts.
    Qfactor(GridArgs),
    /// Water-filling capacity over R1.
    Capacity(CapacityArgs),
    /// Usable degrees of freedom over R1.
    Dof(DofArgs),
    /// Near-field backscatter power balance along k0 R2 = n beta.
    Backscatter(BackscatterArgs),
    /// Q-constrained boresight gain for truncation orders 1..=n_max.
    GainOpt(GainArgs),
    /// Monte-Carlo check of the sampled channel and thermal noise.
    SampleCheck(SampleArgs),
}

#[derive(Args, Debug, Default)]
struct MediumArgs {
    /// Carrier frequency, Hz [default: 16.8e9].
    #[arg(long)]
    fc: Option<f64>,
    /// Relative permittivity [default: 16].
    #[arg(long)]
    eps_r: Option<f64>,
    /// Loss tangent [default: 1e-4].
    #[arg(long)]
    tan_delta: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct GeometryArgs {
    /// Source radius, m.
    #[arg(long)]
    r1: Option<f64>,
    /// Sweep of R1 / lambda as lo:hi:count.
    #[arg(long, conflicts_with = "r1")]
    sweep_r1: Option<String>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct GridArgs {
    #[command(flatten)]
    medium: MediumArgs,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Highest mode order [default: 5].
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct CapacityArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Receiver sampling density [default: 0.1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Transmit power [default: 1].
    #[arg(long)]
    power: Option<f64>,
    /// 4 k_B T B [default: 1].
    #[arg(long)]
    noise_floor: Option<f64>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct DofArgs {
    #[command(flatten)]
    medium: MediumArgs,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Efficiency threshold [default: 0.5].
    #[arg(long)]
    eta_min: Option<f64>,
    /// Q bound [default: inf].
    #[arg(long)]
    q_max: Option<f64>,
    /// Highest order examined [default: 60].
    #[arg(long)]
    n_cap: Option<usize>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct BackscatterArgs {
    /// k0 R2 / n.
    #[arg(long)]
    beta: Option<f64>,
    /// Highest source order [default: 80].
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct GainArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Source radius, m.
    #[arg(long)]
    r1: Option<f64>,
    /// Largest truncation order [default: 8].
    #[arg(long)]
    n_max: Option<usize>,
    /// Bound on Q_J.
    #[arg(long)]
    q_bar: Option<f64>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct SampleArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Source radius, m.
    #[arg(long)]
    r1: Option<f64>,
    /// Highest mode order [default: 3].
    #[arg(long)]
    n_max: Option<usize>,
    /// Sampling density [default: 0.1].
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    power: Option<f64>,
    #[arg(long)]
    noise_floor: Option<f64>,
    /// Number of sample points [default: 4096].
    #[arg(long)]
    k: Option<usize>,
    /// Channel uses per direction [default: 20000].
    #[arg(long)]
    draws: Option<usize>,
}

impl MediumArgs {
    fn fill(&self, p: &mut Params) {
        p.fc = self.fc;
        p.eps_r = self.eps_r;
        p.tan_delta = self.tan_delta;
    }
}

impl GeometryArgs {
    fn fill(&self, p: &mut Params) {
        p.r1 = self.r1;
        p.sweep_r1 = self.sweep_r1.clone();
    }
}

impl GridArgs {
    fn fill(&self, p: &mut Params) {
        self.medium.fill(p);
        self.geometry.fill(p);
        p.n_max = self.n_max;
    }
}

impl Cli {
    fn params(&self) -> (Command, Params) {
        let mut p = Params {
            format: self.format,
            output: self.output.clone(),
            seed: self.seed,
            bits: self.bits.then_some(true),
            ..Default::default()
        };
        let cmd = match &self.command {
            Cmd::Efficiency(a) => {
                a.fill(&mut p);
                Command::Efficiency
            }
            Cmd::Qfactor(a) => {
                a.fill(&mut p);
                Command::Qfactor
            }
            Cmd::Capacity(a) => {
                a.grid.fill(&mut p);
                p.alpha = a.alpha;
                p.power = a.power;
                p.noise_floor = a.noise_floor;
                Command::Capacity
            }
            Cmd::Dof(a) => {
                a.medium.fill(&mut p);
                a.geometry.fill(&mut p);
                p.eta_min = a.eta_min;
                p.q_max = a.q_max;
                p.n_cap = a.n_cap;
                Command::Dof
            }
            Cmd::Backscatter(a) => {
                p.beta = a.beta;
                p.n = a.n;
                Command::Backscatter
            }
            Cmd::GainOpt(a) => {
                a.medium.fill(&mut p);
                p.r1 = a.r1;
                p.n_max = a.n_max;
                p.q_bar = a.q_bar;
                Command::GainOpt
            }
            Cmd::SampleCheck(a) => {
                a.medium.fill(&mut p);
                p.r1 = a.r1;
                p.n_max = a.n_max;
                p.alpha = a.alpha;
                p.power = a.power;
                p.noise_floor = a.noise_floor;
                p.k = a.k;
                p.draws = a.draws;
                Command::SampleCheck
            }
        };
        (cmd, p)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("EM_CAPACITY_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("EM_CAPACITY_THREADS must be a positive integer, got '{v}'")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("EM_CAPACITY_THREADS: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (cmd, flags) = cli.params();
    let file = match &cli.config {
        Some(path) => config::load_file(path)?,
        None => Params::default(),
    };
    let p = flags.over(file);
    let format = p.format.unwrap_or(Format::Csv);
    let mut plan = plan(cmd, &p)?;
    plan.meta.push(("format".into(), format!("{format:?}").to_lowercase()));
    if cli.dry_run {
        print!("{}", plan.describe());
        return Ok(());
    }
    let report = plan.run(Execution::available())?;
    let text = report.render(format)?;
    output::emit(&text, p.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("emcap: {e}");
            ExitCode::from(e.code())
        }
    }
}
