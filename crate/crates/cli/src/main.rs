use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use udw_cli::{checks, figure, parse_scenario, run_eval, run_sweep, with_threads, CliError, Table, Tolerances, FIGURE_NAMES};

#[derive(Parser)]
#[command(name = "udw", version, about = "Delta-coupled Unruh-DeWitt detectors: correlations and sabotage")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tolerance profile for `verify`: strict or corrupt.
    #[arg(long, global = true, default_value = "strict")]
    tolerance: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario and print every requested quantity.
    Eval,
    /// Evaluate the scenario over its [sweep] grid and emit CSV.
    Sweep,
    /// Write the CSV files of a figure preset (fig1 … fig8, or all).
    Figure { name: String },
    /// Run the acceptance suite.
    Verify,
}

/// Writes to stdout; a closed pipe ends the output quietly.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn read_config(path: &Option<PathBuf>) -> Result<udw_cli::ScenarioConfig, CliError> {
    let path = path.as_ref().ok_or_else(|| CliError::Semantic {
        path: "--config".into(),
        message: "this command needs --config PATH".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

fn write_table(dir: &Path, file: &str, table: &Table) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(file);
    std::fs::write(&path, table.to_csv()?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let threads = cli.threads;
    match cli.command {
        Command::Eval => {
            let cfg = read_config(&cli.config)?;
            let (out, table) = with_threads(threads, || run_eval(&cfg))??;
            emit(&out.to_text())?;
            if let Some(dir) = &cli.out {
                write_table(dir, "eval.csv", &table)?;
            }
            Ok(true)
        }
        Command::Sweep => {
            let cfg = read_config(&cli.config)?;
            let (table, warnings) = with_threads(threads, || run_sweep(&cfg))??;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            match &cli.out {
                Some(dir) => write_table(dir, "sweep.csv", &table)?,
                None => emit(&table.to_csv()?)?,
            }
            Ok(true)
        }
        Command::Figure { name } => {
            let names: Vec<&str> = if name == "all" { FIGURE_NAMES.to_vec() } else { vec![name.as_str()] };
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            for n in names {
                let tables = with_threads(threads, || figure(n))??;
                for (file, table) in tables {
                    write_table(&dir, &file, &table)?;
                    emit(&format!("{}\n", dir.join(&file).display()))?;
                }
            }
            Ok(true)
        }
        Command::Verify => {
            let tol = Tolerances::profile(&cli.tolerance)?;
            let mut failed = 0;
            let mut total = 0.0;
            for name in checks::CHECK_NAMES {
                let o = with_threads(threads, || checks::run_check(name, &tol))??;
                emit(&format!("{}\n", o.line()))?;
                failed += usize::from(!o.passed);
                total += o.elapsed.as_secs_f64();
            }
            emit(&format!("{} passed, {failed} failed, {total:.1} s\n", checks::CHECK_NAMES.len() - failed))?;
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
