use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qsdc_core::cloning::Convention;
use qsdc_core::protocol::{AttackKind, SecretState, WStateParams};

/// Flag triples must sum to one within this tolerance.
const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "qsdc",
    version,
    about = "Controlled QSDC over a W-class channel with a parametrized cloner"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the protocol once and write a JSON transcript.
    Run(RunArgs),
    /// Success probability over a grid of |alpha|^2 at fixed |beta|^2.
    Sweep(SweepArgs),
    /// Write figure data as CSV (and optionally SVG).
    Figures(FigureArgs),
    /// Attack scenarios.
    Attack(AttackArgs),
    /// Hilbert-Schmidt distance of the cloner Charlie would build.
    CloneAnalysis(CloneArgs),
    /// Reconcile every closed form and write the errata report.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    PaperLiteral,
    Physical,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::PaperLiteral => Convention::PaperLiteral,
            ConventionArg::Physical => Convention::PhysicalIsometry,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub alpha2: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub beta2: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub gamma2: f64,
    /// `a,b` for real amplitudes, or `re[,im]:re[,im]` per component.
    #[arg(long)]
    pub secret: Option<String>,
    #[arg(long, value_enum, default_value_t = ConventionArg::PaperLiteral)]
    pub convention: ConventionArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl StateArgs {
    pub fn wparams(&self) -> Result<WStateParams, String> {
        w_from_squares(self.alpha2, self.beta2, self.gamma2)
    }

    pub fn secret(&self) -> Result<SecretState, String> {
        match &self.secret {
            None => Ok(SecretState::balanced()),
            Some(s) => parse_secret(s),
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 0)]
    pub max_retries: u32,
    #[arg(long, default_value = "transcript.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub figure: FigureId,
    /// Comma-separated; fig1 pairs the i-th values of the three lists.
    #[arg(long, value_delimiter = ',')]
    pub alpha2: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub beta2: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub gamma2: Vec<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub n_max: u32,
    /// CSV path; defaults to `<figure>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG next to the CSV.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AttackArg {
    Receiver,
    Controller,
    Eve,
}

impl From<AttackArg> for AttackKind {
    fn from(a: AttackArg) -> Self {
        match a {
            AttackArg::Receiver => AttackKind::DishonestReceiver,
            AttackArg::Controller => AttackKind::DishonestController,
            AttackArg::Eve => AttackKind::OutsideEve,
        }
    }
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(value_enum)]
    pub kind: AttackArg,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CloneArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Grid points over m = |x|^2 in [0, 1].
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    /// Directory for errata.json and errata.txt.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn unit(what: &str, v: f64) -> Result<f64, String> {
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("{what} = {v} is outside [0, 1]"));
    }
    Ok(v)
}

pub fn check_triple(a: f64, b: f64, g: f64) -> Result<(f64, f64, f64), String> {
    let (a, b, g) = (unit("alpha2", a)?, unit("beta2", b)?, unit("gamma2", g)?);
    let sum = a + b + g;
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(format!(
            "alpha2 + beta2 + gamma2 = {sum}, expected 1 within {SUM_TOLERANCE:e}"
        ));
    }
    Ok((a / sum, b / sum, g / sum))
}

pub fn w_from_squares(a: f64, b: f64, g: f64) -> Result<WStateParams, String> {
    let (a, b, g) = check_triple(a, b, g)?;
    WStateParams::from_squares(a, b, g).map_err(|e| e.to_string())
}

fn parse_number(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))
}

fn parse_component(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_number(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_number(re)?, parse_number(im)?)),
        _ => Err(format!("`{s}` is not `re` or `re,im`")),
    }
}

/// `a,b` (two reals) or `re[,im]:re[,im]`.
pub fn parse_secret(s: &str) -> Result<SecretState, String> {
    let (a, b) = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 2 {
            return Err(format!(
                "secret `{s}` needs exactly two `:`-separated components"
            ));
        }
        (parse_component(parts[0])?, parse_component(parts[1])?)
    } else {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(format!("secret `{s}` needs two comma-separated amplitudes"));
        }
        (
            Complex64::new(parse_number(parts[0])?, 0.0),
            Complex64::new(parse_number(parts[1])?, 0.0),
        )
    };
    let norm_sqr = a.norm_sqr() + b.norm_sqr();
    if (norm_sqr - 1.0).abs() > SUM_TOLERANCE {
        return Err(format!(
            "secret has squared norm {norm_sqr}, expected 1 within {SUM_TOLERANCE:e}"
        ));
    }
    let n = norm_sqr.sqrt();
    SecretState::new(a / n, b / n).map_err(|e| e.to_string())
}
