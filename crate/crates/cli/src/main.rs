//! Command-line front end: closed-form peakon evaluation over time grids,
//! figure-data export, the exact determinant-identity battery, ODE
//! cross-validation, and spectral-drift measurement.
//!
//! Exit codes: 0 success, 1 usage/configuration/IO error, 2 domain
//! degeneracy (turning points in a sweep, failed tolerance, branch
//! crossings), 3 identity failure.

use clap::{Args, Parser, Subcommand};

mod commands;
mod grid;
mod output;
mod system;

pub use output::CliError;

#[derive(Parser)]
#[command(
    name = "gnch",
    version,
    about = "Closed-form multipeakon solutions of a two-parameter Camassa-Holm family"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the closed-form peakon state over a time grid (CSV/JSON)
    Eval(EvalArgs),
    /// Emit wave-profile data for the bundled example figures
    Figure(FigureArgs),
    /// Run the seeded exact-rational determinant-identity battery
    Identities(IdentitiesArgs),
    /// Integrate the peakon system and compare against the closed form
    Ode(OdeArgs),
    /// Fit the time drift of the discrete-string eigenvalues
    Spectrum(SpectrumArgs),
}

/// Flags selecting the moment system.
#[derive(Args, Clone, Debug, Default)]
pub struct SystemArgs {
    /// Parameter preset: ch (r=0, s=1), noniso (r=1, s=0), mixed (r=4, s=2)
    #[arg(long)]
    preset: Option<String>,
    /// Family parameter r (overrides the preset)
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Family parameter s (overrides the preset)
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Comma-separated spectral constants lambda_j (nonzero, distinct)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<String>,
    /// Comma-separated initial values a_j(0); defaults to all zero
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a0: Vec<String>,
    /// System JSON: a file path, or an inline document starting with '{'
    #[arg(long)]
    system: Option<String>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Time grid t0:t1:n (n sample points, endpoints included)
    #[arg(long, allow_hyphen_values = true)]
    times: Option<String>,
    /// Optional space grid x0:x1:n; adds a wave-profile file/section
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Scalar mode: float or exact (exact prints amplitudes as p/q)
    #[arg(long, default_value = "float")]
    mode: String,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Shortcut: emit the profile data of bundled figure 1 or 2
    #[arg(long)]
    fig: Option<u32>,
}

#[derive(Args)]
pub struct FigureArgs {
    /// Figure id: 1 (single peak) or 2 (peak/antipeak pair)
    #[arg(long)]
    fig: u32,
    /// Space grid x0:x1:n (default -6:6:1201); peak locations are inserted
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
pub struct IdentitiesArgs {
    /// Number of random trials
    #[arg(long, default_value_t = 200)]
    trials: u64,
    /// Largest node count per trial
    #[arg(long = "max-n", default_value_t = 5)]
    max_n: usize,
    /// RNG seed (identical seeds give byte-identical reports)
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Scalar mode; the battery is exact-only
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Write the JSON report here as well
    #[arg(long)]
    out: Option<String>,
    /// Corrupt one element per trial (negative control; must exit 3)
    #[arg(long, hide = true)]
    corrupt: bool,
}

#[derive(Args)]
pub struct OdeArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Integration window t0:t1:_ (the third grid field is ignored here)
    #[arg(long, allow_hyphen_values = true)]
    times: String,
    /// Fixed Runge-Kutta step count
    #[arg(long, default_value_t = 4096)]
    steps: usize,
    /// Pass/fail bound on the maximum relative deviation
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Sample times t0:t1:n (n >= 3)
    #[arg(long, allow_hyphen_values = true)]
    times: String,
    /// Pass/fail bound on |fitted slope + r|
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<String>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help/--version land here too; keep their success status
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Eval(args) => commands::eval::run(&args),
        Cmd::Figure(args) => commands::figure::run(&args),
        Cmd::Identities(args) => commands::identities::run(&args),
        Cmd::Ode(args) => commands::ode::run(&args),
        Cmd::Spectrum(args) => commands::spectrum::run(&args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
