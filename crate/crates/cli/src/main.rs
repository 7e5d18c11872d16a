use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use heckeforge_cli::config::check_suites;
use heckeforge_cli::{describe, run, RunConfig};

#[derive(Parser)]
#[command(name = "heckeforge", version, about = "Verification suites for pro-p Iwahori-Hecke algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured suites and emit a JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the suite list of the config; repeatable.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Report path; defaults to the config's `out`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the static inventory of a configuration.
    Describe {
        #[arg(long)]
        config: PathBuf,
    },
}

const CONFIG_ERROR: u8 = 2;

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HECKEFORGE_THREADS") else { return Ok(()) };
    let n: usize = v.parse().ok().filter(|n| *n > 0).ok_or_else(|| format!("HECKEFORGE_THREADS={v:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(CONFIG_ERROR);
    }
    match cli.command {
        Command::Run { config, suites, out } => {
            let mut cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(CONFIG_ERROR);
                }
            };
            if !suites.is_empty() {
                if let Err(e) = check_suites(&suites) {
                    eprintln!("error: {e}");
                    return ExitCode::from(CONFIG_ERROR);
                }
                cfg.suites = suites;
            }
            let (report, times) = run(&cfg);
            for (s, t) in report.suites.iter().zip(&times) {
                eprintln!("{:<11} {:<8} {:>8.2}s", s.suite, verdict_word(s), t.as_secs_f64());
            }
            let json = report.to_json();
            match out.or(cfg.out.clone()) {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, json + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(CONFIG_ERROR);
                    }
                }
                None => println!("{json}"),
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Describe { config } => {
            let text = RunConfig::load(&config).map_err(|e| e.to_string()).and_then(|c| describe(&c));
            match text {
                Ok(t) => {
                    print!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(CONFIG_ERROR)
                }
            }
        }
    }
}

fn verdict_word(s: &heckeforge::suites::SuiteOutcome) -> &'static str {
    match s.verdict {
        heckeforge::suites::Verdict::Pass => "pass",
        heckeforge::suites::Verdict::Fail => "FAIL",
        heckeforge::suites::Verdict::Skipped { .. } => "skipped",
    }
}
