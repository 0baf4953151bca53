//! `gespin` — estimation CLI for germanium spin-qubit design numbers.
//!
//! Subcommands: `masses`, `strain-table`, `strain-curve`, `t1-budget`,
//! `sweep`, `mc-validate`. Exit codes: 0 success, 1 validation failure,
//! 2 usage/config error.

// Validation writes `!(x > 0.0)` instead of `x <= 0.0` so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod svg;
mod units;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "gespin",
    version,
    about = "Ge spin-qubit design estimation toolkit"
)]
struct Cli {
    /// Path to the JSON run configuration (strict: unknown keys rejected).
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Output directory for CSV/JSON/SVG files.
    #[arg(long, global = true, default_value = "out")]
    out: std::path::PathBuf,

    /// Output file format.
    #[arg(long, global = true, default_value = "csv")]
    format: output::Format,

    /// Seed for stochastic subcommands (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derived density-of-states and conductivity effective masses.
    Masses,
    /// Species × purity-grade table of |average linear strain|.
    StrainTable {
        /// Comma-separated species symbols (default: all in the database).
        #[arg(long, value_delimiter = ',')]
        species: Vec<String>,
        /// Purity grades: `5N`, `9N`, `13N`, `c=1e-5`, or `n=1e10cm-3`.
        /// Repeatable; defaults to 5N, 9N, 13N.
        #[arg(long)]
        grade: Vec<String>,
    },
    /// Strain-vs-density curves (CSV plus a log-log SVG rendering).
    StrainCurve {
        #[arg(long, value_delimiter = ',')]
        species: Vec<String>,
        /// Lower density bound, e.g. `1e9cm-3`.
        #[arg(long, default_value = "1e9cm-3")]
        min: String,
        /// Upper density bound, e.g. `1e18cm-3`.
        #[arg(long, default_value = "1e18cm-3")]
        max: String,
        #[arg(long, default_value_t = 10)]
        points_per_decade: u32,
    },
    /// Relaxation budget at the configured operating point.
    T1Budget {
        /// Direct suppression factor override (dimensionless).
        #[arg(long)]
        s_pnc: Option<f64>,
        /// Magnetic field override with unit suffix, e.g. `0.44T`.
        #[arg(long)]
        b0: Option<String>,
        /// Temperature override with unit suffix, e.g. `0.35K`.
        #[arg(long)]
        temp: Option<String>,
        /// Pure-dephasing time with unit suffix, e.g. `1ms`.
        #[arg(long)]
        t_phi: Option<String>,
        /// Qubit-cavity detuning override (ordinary frequency), e.g.
        /// `100MHz`; requires cavity parameters in the config.
        #[arg(long)]
        detuning: Option<String>,
    },
    /// Grid sweep from the config's `sweep` section.
    Sweep {
        /// Also locate the parasitic-dominance crossover S* (requires a
        /// single S_pnc axis).
        #[arg(long)]
        crossover: bool,
    },
    /// Monte Carlo validation of the strain mean/RMS statistics.
    McValidate {
        /// Trials per case (overrides the config).
        #[arg(long)]
        trials: Option<u64>,
    },
}

fn main() {
    // Die quietly when a downstream pipe closes instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let ctx = commands::Context::load(cli.config.as_deref(), &cli.out, cli.format, cli.seed)?;
    match cli.command {
        Command::Masses => commands::cmd_masses(&ctx),
        Command::StrainTable { species, grade } => {
            commands::cmd_strain_table(&ctx, &species, &grade)
        }
        Command::StrainCurve {
            species,
            min,
            max,
            points_per_decade,
        } => commands::cmd_strain_curve(&ctx, &species, &min, &max, points_per_decade),
        Command::T1Budget {
            s_pnc,
            b0,
            temp,
            t_phi,
            detuning,
        } => commands::cmd_t1_budget(
            &ctx,
            commands::BudgetOverrides {
                s_pnc,
                b0,
                temp,
                t_phi,
                detuning,
            },
        ),
        Command::Sweep { crossover } => commands::cmd_sweep(&ctx, crossover),
        Command::McValidate { trials } => commands::cmd_mc_validate(&ctx, trials),
    }
}
