use std::path::PathBuf;
use std::process::ExitCode;

use ampqed::exec::Execution;
use ampqed_cli::config::ScenarioConfig;
use ampqed_cli::report::{export, Format, Report};
use ampqed_cli::{suites, ConfigError};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "ampqed",
    version,
    about = "Field correlations in amplifying inhomogeneous media"
)]
struct Cli {
    /// Evaluate frequencies one at a time.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses listed in a scenario file.
    Run {
        config: PathBuf,
        /// Directory for report.json; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario file without running it.
    Validate { config: PathBuf },
    /// Convert a saved report.
    Export {
        report: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("AMPQED_THREADS") {
        match n.parse::<usize>() {
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            Err(_) => {
                eprintln!("error: AMPQED_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match dispatch(cli.command, exec) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command, exec: Execution) -> Result<bool, ConfigError> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let report = suites::run(&cfg, exec)?;
            for a in &report.analyses {
                let status = serde_json::to_value(a.status).expect("status serializes");
                eprintln!(
                    "{:<18} {:<8} {}",
                    a.name,
                    status.as_str().unwrap_or_default(),
                    a.reason
                        .as_deref()
                        .map(|r| format!("{r}: {}", a.message))
                        .unwrap_or_else(|| a.message.clone())
                );
            }
            match out {
                Some(dir) => {
                    export(&report, Format::Json, &dir)?;
                }
                None => print!("{}", report.to_json()),
            }
            Ok(report.passed())
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            cfg.validate()?;
            cfg.model()?;
            cfg.grid()?;
            eprintln!("{}: ok ({})", cfg.name, cfg.hash());
            Ok(true)
        }
        Command::Export {
            report,
            format,
            out,
        } => {
            let r = Report::load(&report)?;
            let format = match format {
                OutFormat::Json => Format::Json,
                OutFormat::Csv => Format::Csv,
            };
            for p in export(&r, format, &out)? {
                println!("{}", p.display());
            }
            Ok(true)
        }
    }
}
