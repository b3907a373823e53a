//! Command-line experiment driver.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 numerical failure, 3 invalid
//! configuration (including unparsable arguments).

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{converge, converge_study, run, tableau_report, ConvergeConfig, TableauConvergence, FIT_FLOOR};
pub use config::{parse_config_text, parse_domain, parse_scalar, resolve, RunArgs, RunConfig, OUT_DIR_ENV};
pub use output::{
    fmt_f64, Summary, CONVERGENCE_HEADER, ERROR_HEADER, INVARIANTS_HEADER, PROFILE_HEADER_1D, PROFILE_HEADER_2D,
};

use crate::dirk::SolverConfig;
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ieq-nls", version, about = "Conservative DIRK experiments for the nonlinear Schrödinger equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print Butcher coefficients and conservation checks.
    Tableau {
        /// Registry name, or `all`.
        #[arg(default_value = "all")]
        name: String,
    },
    /// Integrate one scenario (default: soliton).
    Run(RunArgs),
    /// Temporal convergence study against the exact soliton.
    Converge(ConvergeArgs),
    /// Long-time soliton run; invariants recorded every 100 steps by default.
    Longtime(RunArgs),
}

#[derive(Args, Clone, Debug)]
pub struct ConvergeArgs {
    #[arg(long, default_value = "soliton")]
    pub scenario: String,
    /// Comma-separated registry names.
    #[arg(long, value_delimiter = ',')]
    pub tableaux: Vec<String>,
    #[arg(short = 'n', long = "nodes", default_value_t = 256)]
    pub n: usize,
    #[arg(long, value_parser = parse_scalar)]
    pub t_end: Option<f64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',', value_parser = parse_scalar)]
    pub dts: Vec<f64>,
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_scalar, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_parser = parse_scalar)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl ConvergeArgs {
    pub fn resolve(&self) -> ConvergeConfig {
        let out_dir = self.out_dir.clone().unwrap_or_else(|| RunConfig::for_scenario(&crate::scenarios::SOLITON, 1).out_dir);
        let mut cfg = ConvergeConfig::soliton_default(out_dir);
        cfg.scenario = self.scenario.clone();
        cfg.n = self.n;
        if !self.tableaux.is_empty() {
            cfg.tableaux = self.tableaux.clone();
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if !self.dts.is_empty() {
            cfg.dts = self.dts.clone();
        }
        cfg.domain = self.domain;
        cfg.beta = self.beta;
        cfg.solver = SolverConfig {
            tol: self.tol.unwrap_or(cfg.solver.tol),
            max_iters: self.max_iters.unwrap_or(cfg.solver.max_iters),
            ..cfg.solver
        };
        cfg
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        e if e.is_numerical() => EXIT_NUMERICAL,
        Error::Step { source, .. } => exit_code(source),
        _ => EXIT_CONFIG,
    }
}

fn execute(cli: Cli) -> crate::Result<()> {
    match cli.command {
        Command::Tableau { name } => print!("{}", tableau_report(&name)?),
        Command::Run(args) => {
            let cfg = resolve(&args, "soliton", 1)?;
            report_run(&run(&cfg)?, &cfg);
        }
        Command::Longtime(args) => {
            let cfg = resolve(&args, "longtime", 100)?;
            if cfg.scenario != "longtime" {
                return Err(Error::Config(format!("`longtime` runs the longtime scenario, not `{}`", cfg.scenario)));
            }
            report_run(&run(&cfg)?, &cfg);
        }
        Command::Converge(args) => {
            let cfg = args.resolve();
            for res in converge(&cfg)? {
                let fitted = res.fitted_order.map_or("n/a".to_string(), |o| format!("{o:.3}"));
                println!("{:<18} fitted order {fitted}", res.tableau);
                for row in res.table.rows() {
                    println!("    dt = {:.6e}  l2 error = {:.6e}", row.dt, row.l2_error);
                }
            }
            println!("wrote {}", cfg.out_dir.join("convergence.csv").display());
        }
    }
    Ok(())
}

fn report_run(s: &Summary, cfg: &RunConfig) {
    println!(
        "{} with {}: {} steps to t = {}, max |mass drift| {:.3e}, max |energy drift| {:.3e}, peak |u| {:.6}",
        s.scenario, s.tableau, s.steps_completed, s.t_reached, s.max_abs_mass_drift, s.max_abs_energy_drift, s.peak_amplitude
    );
    if let Some(e) = s.l2_error {
        println!("l2 error at t_end: {e:.6e}");
    }
    println!("wrote {}", cfg.out_dir.display());
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
