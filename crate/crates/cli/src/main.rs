//! Command-line front end: classification, G tables, decay bounds, radial
//! simulation, counterexample verification, and harness sweeps, with
//! machine-readable output and a config echo for reproducibility.
//!
//! Exit codes: 0 success, 2 for Inconclusive verdicts (so pipelines can tell
//! "battery silent" from failure), 1 for errors.

mod commands;
mod output;
mod sweep;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "kocheck",
    version,
    about = "Numerical Keller-Osserman-type condition checker for higher-order differential inequalities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Nonlinearity g(zeta), e.g. "zeta^2" or "zeta * ln(2+zeta)^2".
    /// May contain {lambda} or {nu} placeholders for sweeps.
    #[arg(long)]
    pub g: Option<String>,

    /// Operator order m.
    #[arg(long, default_value_t = 2)]
    pub m: u32,

    /// Dimension n.
    #[arg(long, default_value_t = 3)]
    pub n: u32,

    /// Coefficient bound A (reporting only).
    #[arg(long = "A", default_value_t = 1.0)]
    pub coeff_bound: f64,

    /// Relative tolerance for integral verdicts.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<String>,

    /// Output format.
    #[arg(long, default_value = "json")]
    pub format: String,

    /// Worker pool size for sweeps.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,

    /// Sweep over a parameter: "name=v1,v2,...", name in
    /// {lambda, nu, u0, k}. Placeholders {lambda}/{nu} in --g are substituted.
    #[arg(long)]
    pub sweep: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the theorem battery and classify the inequality instance.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate G(t) on a log-spaced grid (CSV columns t,G).
    #[command(name = "g-table")]
    GTable {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.01)]
        t_min: f64,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 33)]
        count: usize,
    },
    /// The decay bound C·G^{-1}(k·r) at one radius or over a grid.
    Bound {
        #[command(flatten)]
        common: CommonArgs,
        /// Single radius.
        #[arg(long)]
        r: Option<f64>,
        /// Radius grid "start:stop:count" (log-spaced) or "v1,v2,...".
        #[arg(long)]
        r_grid: Option<String>,
        /// Multiplicative constant C of the bound C·G^{-1}(k·r).
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Assert the final grid entry falls below this threshold.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Integrate the radial polyharmonic model outward from the origin.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 1.0)]
        u0: f64,
        #[arg(long, default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
        /// Initial data for the higher cascade components, comma-separated.
        #[arg(long)]
        higher: Option<String>,
    },
    /// Verify the log-nonlinearity counterexample profile.
    #[command(name = "verify-example")]
    VerifyExample {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 2.0)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        /// Growth rate k, or "auto" for the automatic search.
        #[arg(long, default_value = "auto")]
        k: String,
        /// Radius grid "start:stop:count" or "v1,v2,...".
        #[arg(long)]
        r_grid: Option<String>,
    },
    /// Exercise the proof-machinery inequalities on simulated profiles.
    Harness {
        #[command(flatten)]
        common: CommonArgs,
        /// Which inequality check: 31 (annulus), 33 (doubling sequence),
        /// 34 (envelope comparison), 35 (tail lower bound).
        #[arg(long)]
        lemma: String,
        #[arg(long, default_value_t = 1.0)]
        u0: f64,
        /// Base radius for lemmas 33 and 35.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        r2: Option<f64>,
        /// Envelope (34) inputs.
        #[arg(long)]
        psi: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        m1: f64,
        #[arg(long, default_value_t = 4.0)]
        m2: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
