use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "tiltlab", version, about = "Tilted moments of log|Z| and log|zeta|: exact formulas, simulation and scans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the artifact here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; the default depends on the subcommand.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Master seed of every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "TILTLAB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Exact tilted moments of log|Z| for N x N CUE matrices.
    ExactMoments(ExactMomentsArgs),
    /// Monte Carlo tilted moments by self-normalized importance sampling.
    McTilt(McTiltArgs),
    /// Rotation-invariance check of the dense CUE sampler.
    CueCheck(CueCheckArgs),
    /// Weighted histogram and moments of log|zeta(1/2+it)| for t in [T, 2T].
    ZetaScan(ZetaScanArgs),
    /// Shifted prime sums mu_alpha over a prime window.
    MuAlpha(MuAlphaArgs),
    /// Selection pairs (S, T) with their prime sums for the imaginary shift pattern.
    ShiftTable(ShiftTableArgs),
    /// k = 1 recipe main term for the shifted second moment, optionally against quadrature.
    RecipeK1(RecipeK1Args),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ExactMoments(_) => "exact-moments",
            Command::McTilt(_) => "mc-tilt",
            Command::CueCheck(_) => "cue-check",
            Command::ZetaScan(_) => "zeta-scan",
            Command::MuAlpha(_) => "mu-alpha",
            Command::ShiftTable(_) => "shift-table",
            Command::RecipeK1(_) => "recipe-k1",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::ZetaScan(_) | Command::ShiftTable(_) => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExactMomentsArgs {
    /// Matrix size N.
    #[arg(long)]
    pub n: u64,
    /// Tilt exponent k (weight |Z|^{2k}).
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Highest central moment order.
    #[arg(long, default_value_t = 4)]
    pub orders: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProposalArg {
    Haar,
    Tilted,
    Dense,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct McTiltArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 4)]
    pub orders: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Proposal of the importance sampler.
    #[arg(long, value_enum, default_value_t = ProposalArg::Haar)]
    pub proposal: ProposalArg,
    /// Bootstrap resamples for standard errors.
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CueCheckArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Rotation angle.
    #[arg(long, default_value_t = 1.0)]
    pub phi: f64,
    /// Skip the R-diagonal phase correction (negative control).
    #[arg(long)]
    pub no_phase_correction: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ZetaScanArgs {
    /// Height T.
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Derivative order of the weight.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Prime window lower end (exclusive); default log T.
    #[arg(long)]
    pub window_lo: Option<f64>,
    /// Prime window upper end; default T^0.3.
    #[arg(long)]
    pub window_hi: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub orders: usize,
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MuAlphaArgs {
    /// Window lower end (exclusive).
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub lo: f64,
    #[arg(long, default_value_t = 1e6)]
    pub hi: f64,
    /// Shifts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.001", allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShiftTableArgs {
    #[arg(long)]
    pub k: usize,
    /// alpha_i = i*alpha, beta_j = -i*alpha.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub window_lo: f64,
    #[arg(long, default_value_t = 1e4)]
    pub window_hi: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RecipeK1Args {
    #[arg(long, default_value_t = 1e3)]
    pub t_lo: f64,
    #[arg(long, default_value_t = 2e3)]
    pub t_hi: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Also integrate zeta(1/2+alpha+it) zeta(1/2+beta-it) directly.
    #[arg(long)]
    pub quadrature: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn default_formats() {
        let cli = Cli::parse_from(["tiltlab", "shift-table", "--k", "2"]);
        assert_eq!(cli.command.default_format(), Format::Csv);
        let cli = Cli::parse_from(["tiltlab", "exact-moments", "--n", "3", "--seed", "9"]);
        assert_eq!(cli.command.default_format(), Format::Json);
        assert_eq!(cli.seed, 9);
    }
}
