//! Run configurations. Each subcommand's arguments are a plain record that
//! is parsed from the command line and echoed verbatim into the JSON
//! sidecar, from which the run can be repeated.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::parse;
use gzscar_core::bogoliubov::Family;

#[derive(Parser, Debug)]
#[command(name = "gzscar", version, about = "Elliptic product-state scars of XYZ spin chains")]
pub struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: RunConfig,
}

#[derive(Subcommand, Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    /// Check the product-eigenstate conditions and, for small rings, the exact residual.
    ScarVerify(ScarVerify),
    /// Transverse-helix spin-wave dispersion on a k-grid.
    Dispersion(Dispersion),
    /// Spin-wave contrast D(t).
    ContrastSw(ContrastSw),
    /// Exact-diagonalization contrast D(t) on a small ring.
    ContrastEd(ContrastEd),
    /// Integrate the classical Landau-Lifshitz equations.
    LlEvolve(LlEvolve),
    /// Classify (kappa, lambda) by stability under both perturbation signs.
    PhaseScan(PhaseScan),
    /// Late-time decay rates of the transverse-helix contrast.
    Rates(RatesArgs),
    /// Repeat a run from its JSON sidecar.
    #[serde(skip)]
    Replay(Replay),
}

/// Ring scar: `q = 4 M K(kappa) / L`.
#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Ring {
    #[arg(long, default_value_t = 0.0, value_parser = parse::real)]
    pub kappa: f64,
    #[arg(long = "M", default_value_t = 1)]
    pub m: usize,
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long, value_parser = parse::real, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse::angle, allow_negative_numbers = true)]
    pub phi: f64,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Perturbation {
    /// Replace the parent Jx.
    #[arg(long = "Jx", value_parser = parse::real, allow_negative_numbers = true)]
    pub jx: Option<f64>,
    /// Replace the parent Jz.
    #[arg(long = "Jz", value_parser = parse::real, allow_negative_numbers = true)]
    pub jz: Option<f64>,
    #[arg(long = "dJx", default_value_t = 0.0, value_parser = parse::real, allow_negative_numbers = true)]
    pub djx: f64,
    #[arg(long = "dJz", default_value_t = 0.0, value_parser = parse::real, allow_negative_numbers = true)]
    pub djz: f64,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ScarVerify {
    #[command(flatten)]
    pub ring: Ring,
    /// Spin S (`1/2`, `1`, ...); stored as 2S.
    #[arg(long = "S", default_value = "1/2", value_parser = parse::two_s)]
    pub two_s: u32,
    #[command(flatten)]
    pub couplings: Perturbation,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Helix {
    #[arg(long, value_parser = parse::angle)]
    pub q: f64,
    #[arg(long, value_parser = parse::angle)]
    pub theta: f64,
    #[arg(long = "dJz", value_parser = parse::real, allow_negative_numbers = true)]
    pub djz: f64,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Dispersion {
    #[command(flatten)]
    pub helix: Helix,
    #[arg(long = "S", default_value = "1", value_parser = parse::spin)]
    pub s: f64,
    #[arg(long, default_value_t = 400)]
    pub nk: usize,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RatesArgs {
    #[command(flatten)]
    pub helix: Helix,
    #[arg(long = "S", default_value = "1", value_parser = parse::spin)]
    pub s: f64,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SwFamily {
    Transverse,
    Gtsh,
    Glsh,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ScanFamily {
    Gtsh,
    Glsh,
}

impl From<ScanFamily> for Family {
    fn from(f: ScanFamily) -> Self {
        match f {
            ScanFamily::Gtsh => Family::Gtsh,
            ScanFamily::Glsh => Family::Glsh,
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ContrastSw {
    #[arg(long, value_enum, default_value = "transverse")]
    pub family: SwFamily,
    /// Helix wave number (transverse).
    #[arg(long, value_parser = parse::angle)]
    pub q: Option<f64>,
    /// Polar angle (transverse).
    #[arg(long, value_parser = parse::angle)]
    pub theta: Option<f64>,
    /// Elliptic modulus (gtsh, glsh).
    #[arg(long, value_parser = parse::real)]
    pub kappa: Option<f64>,
    /// Unit-cell size (gtsh, glsh).
    #[arg(long)]
    pub lambda: Option<usize>,
    /// Perturbation: dJz for transverse and gtsh, dJx for glsh.
    #[arg(long = "dJ", visible_alias = "dJz", visible_alias = "dJx", value_parser = parse::real, allow_negative_numbers = true)]
    pub dj: f64,
    #[arg(long = "S", default_value = "1", value_parser = parse::spin)]
    pub s: f64,
    /// Ring length (transverse).
    #[arg(long = "L", default_value_t = 240)]
    pub l: usize,
    /// k-points (gtsh, glsh).
    #[arg(long, default_value_t = 400)]
    pub nk: usize,
    #[arg(long = "T", value_parser = parse::real)]
    pub t_final: f64,
    #[arg(long, default_value_t = 0.1, value_parser = parse::real)]
    pub dt: f64,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ContrastEd {
    #[command(flatten)]
    pub ring: Ring,
    #[arg(long = "S", default_value = "1", value_parser = parse::two_s)]
    pub two_s: u32,
    #[command(flatten)]
    pub couplings: Perturbation,
    #[arg(long = "T", value_parser = parse::real)]
    pub t_final: f64,
    /// Sampling interval.
    #[arg(long, default_value_t = 0.1, value_parser = parse::real)]
    pub dt: f64,
    /// Also write the final state vector (binary, see README).
    #[arg(long)]
    pub dump_state: bool,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LlEvolve {
    #[command(flatten)]
    pub ring: Ring,
    #[arg(long = "S", default_value = "1", value_parser = parse::spin)]
    pub s: f64,
    #[command(flatten)]
    pub couplings: Perturbation,
    #[arg(long = "T", value_parser = parse::real)]
    pub t_final: f64,
    /// Integration step; defaults to 1e-3/S.
    #[arg(long, value_parser = parse::real)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub record_every: usize,
    /// Also estimate the largest Lyapunov exponent over the same time.
    #[arg(long)]
    pub lyapunov: bool,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

/// A list of real values; a newtype so the parser sees it as one argument.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PhaseScan {
    #[arg(long, value_enum)]
    pub family: ScanFamily,
    /// Unit-cell sizes `a:b`.
    #[arg(long, default_value = "7:80", value_parser = parse::int_range)]
    pub lambda: (usize, usize),
    /// `lo:hi:n` or a comma list.
    #[arg(long, default_value = "0.05:0.95:20", value_parser = |s: &str| parse::real_grid(s).map(Grid))]
    pub kappa: Grid,
    /// Perturbation magnitude; both signs are scanned.
    #[arg(long = "dJ", default_value_t = 0.01, value_parser = parse::real)]
    pub dj: f64,
    #[arg(long = "S", default_value = "1", value_parser = parse::spin)]
    pub s: f64,
    #[arg(long, default_value_t = 400)]
    pub nk: usize,
    /// Scan every k-point even after instability is found, so that the
    /// reported exponents are maxima rather than lower bounds.
    #[arg(long)]
    pub full: bool,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Replay {
    /// JSON sidecar of an earlier run.
    #[arg(long)]
    pub from: PathBuf,
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::ScarVerify(_) => "scar_verify",
            RunConfig::Dispersion(_) => "dispersion",
            RunConfig::ContrastSw(_) => "contrast_sw",
            RunConfig::ContrastEd(_) => "contrast_ed",
            RunConfig::LlEvolve(_) => "ll_evolve",
            RunConfig::PhaseScan(_) => "phase_scan",
            RunConfig::Rates(_) => "rates",
            RunConfig::Replay(_) => "replay",
        }
    }
}
