use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use micropolar_cli::runner::{EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};
use micropolar_cli::verify::{report_checks, run_suite, Suite};
use micropolar_cli::{resume, run, RunConfig, RunSummary};

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

/// Pseudo-spectral micropolar fluid solver and verification suite.
#[derive(Parser)]
#[command(name = "micropolar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more configs; independent runs execute concurrently up to MICROPOLAR_THREADS.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Continue a run from a checkpoint.
    Resume { checkpoint: PathBuf, config: PathBuf },
    /// Run a verification suite: ops, lemma1, lemma2, duhamel or energy.
    Verify { suite: String },
}

fn threads() -> usize {
    std::env::var("MICROPOLAR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn summarize(s: &RunSummary) {
    println!(
        "{}: {} steps to t = {}, max ledger excess {:.3e}, max balance residual {:.3e}",
        s.dir.display(),
        s.stats.steps,
        s.stats.t_end,
        s.stats.max_ledger_excess,
        s.stats.max_balance_residual
    );
}

fn run_one(path: &Path) -> i32 {
    let cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match run(&cfg) {
        Ok(s) => {
            summarize(&s);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            e.exit_code()
        }
    }
}

fn run_all(configs: &[PathBuf]) -> i32 {
    let next = AtomicUsize::new(0);
    let worst = Mutex::new(EXIT_OK);
    std::thread::scope(|scope| {
        for _ in 0..threads().min(configs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(path) = configs.get(i) else { break };
                let code = run_one(path);
                let mut w = worst.lock().expect("exit code lock");
                *w = (*w).max(code);
            });
        }
    });
    worst.into_inner().expect("exit code lock")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { configs } => run_all(&configs),
        Command::Resume { checkpoint, config } => match RunConfig::load(&config) {
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
            Ok(cfg) => match resume(&checkpoint, &cfg) {
                Ok(s) => {
                    summarize(&s);
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            },
        },
        Command::Verify { suite } => match suite.parse::<Suite>() {
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
            Ok(s) => match run_suite(s) {
                Ok(checks) if report_checks(s, &checks) => EXIT_OK,
                Ok(_) => EXIT_VERIFY_FAILED,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_VERIFY_FAILED
                }
            },
        },
    };
    ExitCode::from(code as u8)
}
