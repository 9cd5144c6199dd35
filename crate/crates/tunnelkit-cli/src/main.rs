//! `tunnelkit` command line: spectra, splittings and semiclassical checks as CSV or JSON tables.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::*;
use config::{merge, read_config, CliResult, Common};

const AFTER_HELP: &str = "\
Output schemas (CSV; a leading `#` line echoes the effective configuration):
  spectrum      level,sector,parity,energy,M,digits
  shoot         level,parity,energy,m_value,k_bound,digits   (--dump-scan: energy,parity,m)
  wkb           level,energy,degeneracy,splitting,action,a_constant,prefactor
  splitting     g,dE_num,dE_wkb,rel_diff,M,digits
  fit           coefficient,value,std_error
  band          k,theta,energy,degeneracy,energy_wkb
  delta-c       g,delta_c,E0,E1,E2,ratio,M,digits
  wavefunction  level,sector,parity,energy,x,psi
  gy-check      T,numeric,closed_form,ratio,lambda0,free_end_value

Numbers are written in scientific notation with as many significant digits as
the working precision. Precedence: flags > --config file > TUNNELKIT_DIGITS >
built-in policy. Exit status: 2 for configuration errors, 3 for solver errors.";

#[derive(Parser)]
#[command(name = "tunnelkit", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// JSON object supplying defaults for any flag, keyed by long flag name.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest levels from the Fock or plane-wave basis.
    Spectrum(SpectrumArgs),
    /// Levels from the shooting method, or the m(E) scan.
    Shoot(ShootArgs),
    /// Semiclassical levels, action and prefactor.
    Wkb(WkbArgs),
    /// Exact against predicted splittings over a coupling grid.
    Splitting(SplittingArgs),
    /// Correction coefficients of rel_diff(g), or the exponential law.
    Fit(FitArgs),
    /// Lowest band of a cosine ring over all sectors.
    Band(BandArgs),
    /// Triple-well deformation where the three lowest levels are equally spaced.
    DeltaC(DeltaCArgs),
    /// Eigenfunctions sampled on a grid.
    Wavefunction(WavefunctionArgs),
    /// Fluctuation determinant: numeric against closed form.
    GyCheck(GyArgs),
}

fn common_of<T: Serialize>(args: &T) -> CliResult<Common> {
    let v = serde_json::to_value(args).map_err(|e| config::config_err(e.to_string()))?;
    serde_json::from_value(v).map_err(|e| config::config_err(e.to_string()))
}

fn execute<T, F>(args: &T, file: Option<&serde_json::Value>, run: F) -> CliResult<usize>
where
    T: Serialize + DeserializeOwned,
    F: FnOnce(&T) -> CliResult<Outcome> + Send,
    T: Sync,
{
    let args = merge(args, file)?;
    let common = common_of(&args)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(config::config_err("--threads must be positive"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| config::config_err(e.to_string()))?;
    let outcome = pool.install(|| run(&args))?;
    outcome.table.emit(common.format(), common.output.as_deref())?;
    Ok(outcome.failures)
}

fn dispatch(cli: Cli) -> CliResult<usize> {
    let file = cli.config.as_deref().map(read_config).transpose()?;
    let file = file.as_ref();
    match cli.command {
        Command::Spectrum(a) => execute(&a, file, |a| a.run()),
        Command::Shoot(a) => execute(&a, file, |a| a.run()),
        Command::Wkb(a) => execute(&a, file, |a| a.run()),
        Command::Splitting(a) => execute(&a, file, |a| a.run()),
        Command::Fit(a) => execute(&a, file, |a| a.run()),
        Command::Band(a) => execute(&a, file, |a| a.run()),
        Command::DeltaC(a) => execute(&a, file, |a| a.run()),
        Command::Wavefunction(a) => execute(&a, file, |a| a.run()),
        Command::GyCheck(a) => execute(&a, file, |a| a.run()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("{failed} grid point(s) failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("tunnelkit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
