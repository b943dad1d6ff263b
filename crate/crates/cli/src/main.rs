//! `heatctl`: synthesize and verify boundary controls for the half-plane heat equation.
//!
//! Exit status is 0 when every check of the command passes, 1 when a check
//! fails and 2 on errors.

mod basis_check;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use heatctl::simulation::{CoefficientRoute, StateSource};

use commands::Printer;
use config::{parse_route, parse_state, ParamOverrides, RunConfig};

#[derive(Parser)]
#[command(name = "heatctl", version, about)]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid points per axis.
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Half-width of the square grid.
    #[arg(long, global = true)]
    grid_halfwidth: Option<f64>,
    /// Suppress the summary and progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Orthonormality and Fourier-image checks of the Hermite basis.
    BasisCheck {
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long, hide = true)]
        corrupt_normalization: bool,
    },
    /// Build the control and write its coefficients, samples and budget.
    Synthesize(Problem),
    /// Run the controlled evolution and all numerical checks.
    Simulate(Problem),
    /// Norms of the unbounded-control lower bound over shrinking annuli.
    Counterexample {
        #[arg(long)]
        levels: Option<usize>,
        /// Observation time.
        #[arg(long = "at")]
        at: Option<f64>,
    },
    /// Summarize result files and exit with their combined status.
    Report {
        /// Result files; defaults to those present in the output directory.
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct Problem {
    /// Control horizon.
    #[arg(long = "T")]
    t: Option<f64>,
    /// Scale of the x2 basis (default 3 T).
    #[arg(long = "T-star")]
    t_star: Option<f64>,
    /// Highest x1 mode.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Highest x2 mode.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Pulse resolution.
    #[arg(long)]
    l: Option<u32>,
    /// `example`, `zero` or a half-plane CSV.
    #[arg(long, value_parser = parse_state)]
    initial: Option<StateSource>,
    #[arg(long, value_parser = parse_state)]
    target: Option<StateSource>,
    /// auto, closed-form, quadrature, grid or zero.
    #[arg(long, value_parser = parse_route)]
    route: Option<CoefficientRoute>,
    #[arg(long)]
    no_plots: bool,
}

impl Problem {
    fn apply(&self, cfg: &mut RunConfig) {
        let flags = ParamOverrides {
            t: self.t,
            t_star: self.t_star,
            n: self.n,
            m: self.m,
            l: self.l,
        };
        cfg.params = cfg.params.overlay(&flags);
        if let Some(s) = &self.initial {
            cfg.initial = Some(s.clone());
        }
        if let Some(s) = &self.target {
            cfg.target = Some(s.clone());
        }
        if let Some(r) = self.route {
            cfg.coefficients = Some(r);
        }
        if self.no_plots {
            cfg.export.plot_scripts = false;
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = RunConfig::load_or_default(cli.config.as_deref())?;
    if let Some(o) = cli.out {
        cfg.out = Some(o);
    }
    if let Some(n) = cli.grid_n {
        cfg.grid.n = Some(n);
    }
    if let Some(h) = cli.grid_halfwidth {
        cfg.grid.halfwidth = Some(h);
    }
    let quiet = cli.quiet || cfg.quiet.unwrap_or(false);
    env_logger::Builder::new()
        .filter_level(if quiet {
            log::LevelFilter::Error
        } else {
            log::LevelFilter::Info
        })
        .parse_default_env()
        .init();
    let out = Printer { quiet };

    match cli.command {
        Command::BasisCheck {
            max_order,
            alphas,
            corrupt_normalization,
        } => {
            if max_order.is_some() {
                cfg.basis_check.max_order = max_order;
            }
            if alphas.is_some() {
                cfg.basis_check.alphas = alphas;
            }
            let normalization = if corrupt_normalization { 1.0 + 1e-6 } else { 1.0 };
            commands::basis_check(&cfg, normalization, &out)
        }
        Command::Synthesize(p) => {
            p.apply(&mut cfg);
            commands::synthesize(&cfg, &out)
        }
        Command::Simulate(p) => {
            p.apply(&mut cfg);
            commands::simulate(&cfg, &out)
        }
        Command::Counterexample { levels, at } => {
            if levels.is_some() {
                cfg.counterexample.levels = levels;
            }
            if at.is_some() {
                cfg.counterexample.t = at;
            }
            commands::counterexample(&cfg, &out)
        }
        Command::Report { files } => commands::report(&cfg, &files, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
