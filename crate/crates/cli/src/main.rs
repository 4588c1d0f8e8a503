//! `goldstone` — batch experiment runner for the goldstone library.
//!
//! Every subcommand reads its parameters from built-in defaults, an
//! optional JSON config file, and `--set key=value` overrides (in that
//! order), runs one experiment, and writes a CSV or JSON table. Exit
//! codes: 0 success, 1 a verify suite failed its tolerance (rows are
//! still written), 2 invalid parameters, 3 resource cap exceeded.

mod commands;
mod output;
mod params;

use clap::{Args, Parser, Subcommand, ValueEnum};
use params::CliError;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "goldstone",
    about = "Numerical workbench for Goldstone-boson normal coordinates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// JSON file with a single object of parameter overrides.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Parameter override, e.g. --set epsilon=0.3 or --set beta=inf;
    /// values parse as JSON (lists included) and fall back to strings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Seed for the randomized suites.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the gap equation over epsilon/beta grids.
    GapSweep(CommonOpts),
    /// Run the mean-field identity suite at one parameter point.
    BcsVerify(CommonOpts),
    /// Finite-chain two-point dynamics next to the mean-field limit.
    BcsDynamics(CommonOpts),
    /// Cumulants and characteristic-function gaps of fluctuation windows.
    Clt(CommonOpts),
    /// Liouvillian spectral atoms of momentum-mode fluctuations.
    KmodeSpectrum(CommonOpts),
    /// Randomized Bogoliubov-inequality suite on a Heisenberg chain.
    Bogoliubov(CommonOpts),
    /// Renormalized mode sequence approaching the zero-frequency limit.
    GoldstoneLimit(CommonOpts),
    /// Window scaling exponents of power-law dispersions.
    Scaling(CommonOpts),
}

impl Command {
    fn split(&self) -> (&'static str, &CommonOpts) {
        match self {
            Command::GapSweep(o) => ("gap-sweep", o),
            Command::BcsVerify(o) => ("bcs-verify", o),
            Command::BcsDynamics(o) => ("bcs-dynamics", o),
            Command::Clt(o) => ("clt", o),
            Command::KmodeSpectrum(o) => ("kmode-spectrum", o),
            Command::Bogoliubov(o) => ("bogoliubov", o),
            Command::GoldstoneLimit(o) => ("goldstone-limit", o),
            Command::Scaling(o) => ("scaling", o),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let (name, opts) = cli.command.split();
    match execute(name, opts) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(err) => {
            eprintln!("error: {}", err.message());
            std::process::exit(err.exit_code());
        }
    }
}

/// Run one command end to end; `Ok(bool)` reports the verify verdict.
fn execute(name: &str, opts: &CommonOpts) -> Result<bool, CliError> {
    let mut params = commands::defaults(name);
    if let Some(path) = &opts.config {
        params.merge_file(path)?;
    }
    for assignment in &opts.set {
        params.apply_set(assignment)?;
    }
    if let Some(seed) = opts.seed {
        params.set_seed(seed);
    }

    let result = commands::run(name, &params)?;
    let text = match opts.format {
        Format::Csv => result.table.render_csv(),
        Format::Json => result.table.render_json(name, &params.as_value()),
    };
    match &opts.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(result.all_pass)
}
