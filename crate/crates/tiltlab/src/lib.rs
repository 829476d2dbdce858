//! Command-line experiments over `tiltlab-core`: argument parsing, parallel
//! drivers, CSV/JSON artifacts and exit codes.

pub mod args;
pub mod commands;
pub mod output;
pub mod parallel;

use std::io;
use std::path::PathBuf;

use serde_json::Value;

use args::{Cli, Command, Format};
use output::Artifact;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tiltlab_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 2 for precondition failures, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_precondition() => 3,
            _ => 2,
        }
    }
}

/// A finished run, rendered but not yet written.
pub struct Run {
    pub subcommand: &'static str,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub artifact: Artifact,
    pub rendered: String,
}

impl Run {
    pub fn summary(&self) -> String {
        let dest = match &self.output {
            Some(p) => p.display().to_string(),
            None => "stdout".to_string(),
        };
        let format = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        format!("tiltlab {VERSION} {} seed={} format={format} -> {dest}", self.subcommand, self.seed)
    }
}

/// The config echo embedded in every artifact. Output path and thread count
/// are left out: they do not change the results.
pub fn config_echo(cli: &Cli, format: Format) -> Value {
    let mut v = serde_json::to_value(&cli.command).expect("arguments serialize");
    let obj = v.as_object_mut().expect("subcommands serialize as objects");
    obj.insert("seed".into(), cli.seed.into());
    obj.insert("format".into(), serde_json::to_value(format).expect("format serializes"));
    obj.insert("version".into(), VERSION.into());
    v
}

/// Runs the subcommand on a pool sized by `--threads` / `TILTLAB_THREADS`.
pub fn execute(cli: &Cli) -> Result<Run, CliError> {
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let seed = cli.seed;
    let outcome = parallel::pool(cli.threads).install(|| match &cli.command {
        Command::ExactMoments(a) => commands::exact_moments(a),
        Command::McTilt(a) => commands::mc_tilt(a, seed),
        Command::CueCheck(a) => commands::cue_check(a, seed),
        Command::ZetaScan(a) => commands::zeta_scan(a, seed),
        Command::MuAlpha(a) => commands::mu_alpha_table(a),
        Command::ShiftTable(a) => commands::shift_table(a),
        Command::RecipeK1(a) => commands::recipe_k1(a),
    })?;
    let artifact = Artifact {
        config: config_echo(cli, format),
        results: outcome.results,
        table: outcome.table,
        warnings: outcome.warnings,
    };
    let rendered = artifact.render(format);
    Ok(Run {
        subcommand: cli.command.name(),
        seed,
        format,
        output: cli.output.clone(),
        artifact,
        rendered,
    })
}

/// Writes the artifact to `--output` (atomically) or stdout.
pub fn emit(run: &Run) -> Result<(), CliError> {
    match &run.output {
        Some(path) => output::write_atomic(path, &run.rendered)?,
        None => {
            use std::io::Write;
            let mut out = io::stdout().lock();
            out.write_all(run.rendered.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
