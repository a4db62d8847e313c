//! Dispatch from parsed arguments to the table builders and writers.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command, FigureId, ParamArgs};
use crate::commands;
use crate::error::CliError;
use crate::figures;
use crate::output::{csv_bytes, emit};
use crate::settings::{resolve, CommandKind, RunConfig};
use crate::verify;

pub const THREADS_ENV: &str = "WQED_THREADS";

/// Builds the run configuration for one parsed command line.
pub fn configure(cli: Cli) -> Result<RunConfig, CliError> {
    match cli.command {
        Command::Spectrum(args) => resolve(CommandKind::Spectrum, None, &args),
        Command::Occupations(args) => resolve(CommandKind::Occupations, None, &args),
        Command::Bound(args) => resolve(CommandKind::Bound, None, &args),
        Command::Verify => resolve(CommandKind::Verify, None, &ParamArgs::default()),
        Command::Figure { id, params } => resolve(CommandKind::Figure, Some(id), &params),
        Command::Wavepacket { params, packet } => {
            let mut config = resolve(CommandKind::Wavepacket, None, &params)?;
            config.packet = Some(packet);
            Ok(config)
        }
    }
}

/// Executes a validated configuration, writing its table to the configured
/// destination.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let ks = config.grid.points();
    let p = &config.params;
    match config.command {
        CommandKind::Spectrum => emit(&commands::spectrum(p, &ks)?, &config.output),
        CommandKind::Occupations => emit(&commands::occupations(p, &ks)?, &config.output),
        CommandKind::Bound => emit(&commands::bound(p)?, &config.output),
        CommandKind::Figure => match config.figure_id {
            Some(FigureId::Fig5d) => emit(&figures::fig5d(&ks, config.convention())?, &config.output),
            Some(FigureId::Fig7) => emit(&figures::fig7(&ks, config.convention())?, &config.output),
            Some(FigureId::Fig9) => emit(&figures::fig9()?, &config.output),
            None => Err(CliError::validation("figure needs an id: fig5d, fig7 or fig9")),
        },
        CommandKind::Wavepacket => {
            let packet = config
                .packet
                .as_ref()
                .ok_or_else(|| CliError::validation("wavepacket options missing"))?;
            let (row, snapshots) = commands::wavepacket(p, packet)?;
            if let Some(path) = &packet.snapshot_out {
                let file = File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
                let mut out = BufWriter::new(file);
                out.write_all(&csv_bytes(&snapshots)?)?;
                out.flush()?;
            }
            emit(&[row], &config.output)
        }
        CommandKind::Verify => {
            println!("{:<6} {:>2} {:<28} detail", "status", "id", "check");
            let results: Vec<_> = verify::CHECKS
                .iter()
                .map(|check| {
                    let result = check.run();
                    println!("{}", result.line());
                    result
                })
                .collect();
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} checks passed", results.len() - failed, results.len());
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::VerificationFailed(failed))
            }
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads = value
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::validation(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::validation(format!("{THREADS_ENV}: {e}")))
}

/// Entry point shared by the binary: parses, runs and maps errors to exit
/// codes (1 for invalid input, 2 for numerical failures).
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = configure_threads()
        .and_then(|()| configure(cli))
        .and_then(|config| run(&config));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
