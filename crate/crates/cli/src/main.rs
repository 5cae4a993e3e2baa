use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trotter_lowenergy::bounds::Verdict;
use trotter_lowenergy_cli::config::{load_config, Format, CONFIG_KEYS};
use trotter_lowenergy_cli::cost::{compare_csv, run_compare, run_cost};
use trotter_lowenergy_cli::leakage::{leakage_csv, run_leakage};
use trotter_lowenergy_cli::report::{failure_manifest_path, render, write_failures, write_file};
use trotter_lowenergy_cli::{exit, run_analyze, worker_pool, CliError, WORKERS_ENV};

#[derive(Parser)]
#[command(
    name = "lowtrot",
    version,
    about = "Low-energy product-formula error sweeps, bound verdicts and cost tables",
    after_help = CONFIG_KEYS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep (s, delta) and compare measured errors with the bounds.
    Analyze(RunArgs),
    /// Generic leakage bound on random local operators, then formula leakage.
    Leakage(RunArgs),
    /// Scaling laws, exponent comparison and empirical Trotter numbers (JSON).
    Cost(RunArgs),
    /// Exponents of N for each method, one row per order.
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
        orders: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted and the config names none.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output {
                    path: PathBuf::from("<stdout>"),
                    message: e.to_string(),
                })
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze(args) => {
            let cfg = load_config(&args.config)?;
            let out = args.out.or_else(|| cfg.output_path.clone());
            let format = args.format.unwrap_or(cfg.format);
            let pool = worker_pool(args.workers)?;
            let run = run_analyze(&cfg, &pool)?;
            emit(&render(&run.reports, format), out.as_deref())?;
            if !run.failures.is_empty() {
                for f in &run.failures {
                    eprintln!("grid point s = {:e}, delta = {:e} failed: {}", f.s, f.delta, f.error);
                }
                if let Some(o) = &out {
                    let manifest = failure_manifest_path(o);
                    write_failures(&manifest, &run.failures)?;
                    eprintln!("{} failures listed in {}", run.failures.len(), manifest.display());
                }
                return Ok(exit::RUNTIME);
            }
            Ok(if run.all_pass() { exit::OK } else { exit::VERDICT_FAIL })
        }
        Command::Leakage(args) => {
            let cfg = load_config(&args.config)?;
            let out = args.out.or_else(|| cfg.output_path.clone());
            let rows = run_leakage(&cfg, &worker_pool(args.workers)?)?;
            let text = match args.format.unwrap_or(cfg.format) {
                Format::Csv => leakage_csv(&rows),
                Format::Json => to_json(&rows),
            };
            emit(&text, out.as_deref())?;
            let fail = rows.iter().any(|r| r.verdict() == Verdict::Fail);
            Ok(if fail { exit::VERDICT_FAIL } else { exit::OK })
        }
        Command::Cost(args) => {
            let cfg = load_config(&args.config)?;
            if args.format == Some(Format::Csv) {
                return Err(CliError::Validation {
                    field: "format".into(),
                    message: "the cost report is JSON only".into(),
                });
            }
            let out = args.out.or_else(|| cfg.output_path.clone());
            let report = run_cost(&cfg, &worker_pool(args.workers)?)?;
            emit(&to_json(&report), out.as_deref())?;
            if report.has_failures() {
                for r in report.laws.iter().filter_map(|r| r.error.as_ref()) {
                    eprintln!("law evaluation failed: {r}");
                }
                for f in [&report.empirical.restricted, &report.empirical.full]
                    .into_iter()
                    .filter_map(|o| o.failure.as_ref())
                {
                    eprintln!("Trotter-number search failed: {f}");
                }
                return Ok(exit::RUNTIME);
            }
            Ok(if report.empirical.verdict == Verdict::Fail {
                exit::VERDICT_FAIL
            } else {
                exit::OK
            })
        }
        Command::Compare { orders, format, out } => {
            let rows = run_compare(&orders)?;
            let text = match format {
                Format::Csv => compare_csv(&rows),
                Format::Json => to_json(&rows),
            };
            emit(&text, out.as_deref())?;
            let ok = rows.iter().all(|r| r.present_smallest);
            Ok(if ok { exit::OK } else { exit::VERDICT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
