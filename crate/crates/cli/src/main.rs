mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toposim_core::adiabatic::ScheduleKind;
use toposim_core::pipeline::RunMode;

use config::RunConfig;
use error::CliResult;

/// Wen-plaquette sector preparation, pulse compilation and tomography.
///
/// Exit codes: 0 success, 1 invalid input, 2 numerical threshold miss, 3 I/O error.
#[derive(Parser)]
#[command(name = "toposim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Sector amplitudes and their Gram matrix.
    Sectors,
    /// Adiabatic sweep report, F_min(M) scan and instantaneous spectrum.
    Sweep,
    /// Compiled pulse sequences and their equivalence report.
    Compile {
        /// Interpolation parameter s.
        #[arg(long)]
        s: Option<f64>,
        /// Step duration tau.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Tomography of the four ideal sector states.
    Tomo,
    /// Sweep, string operators, tomography and fidelities end to end.
    Full,
}

#[derive(Args)]
struct Flags {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of Trotter steps M.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Total sweep time T.
    #[arg(long, global = true)]
    total_time: Option<f64>,
    /// linear | local-adiabatic
    #[arg(long, global = true)]
    schedule: Option<ScheduleKind>,
    /// Readout noise sigma.
    #[arg(long, global = true)]
    noise: Option<f64>,
    /// ideal | pulse | noisy
    #[arg(long, global = true)]
    mode: Option<RunMode>,
}

fn resolve(flags: &Flags) -> CliResult<RunConfig> {
    let mut cfg = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = flags.seed {
        cfg.seed = v;
    }
    if let Some(v) = &flags.out {
        cfg.out = v.clone();
    }
    if let Some(v) = flags.steps {
        cfg.steps = v;
    }
    if let Some(v) = flags.total_time {
        cfg.total_time = v;
    }
    if let Some(v) = flags.schedule {
        cfg.schedule = v;
    }
    if let Some(v) = flags.noise {
        cfg.noise = v;
    }
    if let Some(v) = flags.mode {
        cfg.mode = v;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = resolve(&cli.flags)?;
    if let Command::Compile { s, tau } = &cli.command {
        cfg.compile_s = s.unwrap_or(cfg.compile_s);
        cfg.compile_tau = tau.unwrap_or(cfg.compile_tau);
    }
    cfg.validate()?;
    match cli.command {
        Command::Sectors => commands::sectors(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::Compile { .. } => commands::compile(&cfg),
        Command::Tomo => commands::tomo(&cfg),
        Command::Full => commands::full(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use error::CliError;

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from(["toposim", "sweep", "--steps", "9", "--schedule", "local-adiabatic", "--mode", "noisy"])
            .unwrap();
        let cfg = resolve(&cli.flags).unwrap();
        assert_eq!(cfg.steps, 9);
        assert_eq!(cfg.schedule, ScheduleKind::LocalAdiabatic);
        assert_eq!(cfg.mode, RunMode::Noisy);
        assert!(Cli::try_parse_from(["toposim", "sweep", "--mode", "loud"]).is_err());
    }

    #[test]
    fn missing_config_is_io() {
        let cli = Cli::try_parse_from(["toposim", "sectors", "--config", "/nonexistent/run.toml"]).unwrap();
        assert!(matches!(resolve(&cli.flags), Err(CliError::Io { .. })));
    }
}
