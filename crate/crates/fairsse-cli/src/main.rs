//! `fairsse`: ingest corpora into encrypted indexes, run fairness
//! scenarios, and analyze execution traces.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on invariant
//! violations, 1 on other failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fairsse_core::analysis::{analyze, ExecutionTrace, ObserverView};
use fairsse_core::crypto::SecurityParam;
use fairsse_core::ledger::PricingConfig;
use fairsse_core::scenario::{ingest_corpus, run_scenario, ScenarioConfig, ScenarioError};
use fairsse_core::sse::{setup, write_index, EdbJson};

#[derive(Parser)]
#[command(name = "fairsse", version, about = "Fair searchable-encryption simulator")]
struct Cli {
    /// RNG seed; overrides the scenario seed and feeds ingest setup.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Pricing config JSON; overrides the scenario pricing.
    #[arg(long, global = true, value_name = "FILE")]
    pricing: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an encrypted index from a directory of text files.
    Ingest {
        /// Corpus directory.
        dir: PathBuf,
        /// Output path for the binary index.
        #[arg(long, value_name = "EDB-FILE")]
        out: PathBuf,
        /// Identifiers per index row.
        #[arg(long, default_value_t = 2)]
        block_size: usize,
        /// Security parameter in bits.
        #[arg(long, default_value_t = 256)]
        lambda: u32,
        /// Also write the JSON debug export here.
        #[arg(long, value_name = "FILE")]
        json_out: Option<PathBuf>,
    },
    /// Execute a scenario config and write its report.
    Run {
        /// Scenario config JSON.
        scenario: PathBuf,
        /// Output path for the report JSON.
        #[arg(long, value_name = "REPORT-FILE")]
        out: PathBuf,
        /// Also write the execution trace here.
        #[arg(long, value_name = "FILE")]
        trace_out: Option<PathBuf>,
        /// Also write the ledger event log (JSON lines) here.
        #[arg(long, value_name = "FILE")]
        events_out: Option<PathBuf>,
    },
    /// Compute leakage statistics from an execution trace.
    Analyze {
        /// Execution trace JSON (written by `run --trace-out`).
        trace: PathBuf,
        /// Observer view to analyze.
        #[arg(long, value_enum, default_value_t = ViewArg::Ledger)]
        view: ViewArg,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Ledger,
    Server,
}

impl From<ViewArg> for ObserverView {
    fn from(arg: ViewArg) -> Self {
        match arg {
            ViewArg::Ledger => ObserverView::LedgerOnly,
            ViewArg::Server => ObserverView::ServerView,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), ScenarioError> {
    match cli.command {
        Command::Ingest {
            dir,
            out,
            block_size,
            lambda,
            json_out,
        } => {
            let lambda = SecurityParam::new(lambda)
                .map_err(|e| ScenarioError::Config(e.to_string()))?;
            let (db, stats) = ingest_corpus(&dir)?;
            let mut rng = fairsse_core::rng::seeded(cli.seed.unwrap_or(0));
            let (_, index) = setup(&db, lambda, block_size, &mut rng)?;
            write_index(&index, &out)?;
            if let Some(path) = json_out {
                let json = serde_json::to_string_pretty(&EdbJson::from_index(&index))
                    .expect("index serializes");
                std::fs::write(path, json)?;
            }
            println!(
                "ingested {} files ({} skipped), {} keywords, {} index rows -> {}",
                stats.files,
                stats.skipped,
                stats.keywords,
                index.row_count(),
                out.display()
            );
            Ok(())
        }
        Command::Run {
            scenario,
            out,
            trace_out,
            events_out,
        } => {
            let text = std::fs::read_to_string(&scenario)?;
            let mut config: ScenarioConfig = serde_json::from_str(&text)
                .map_err(|e| ScenarioError::Config(format!("{}: {e}", scenario.display())))?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(path) = &cli.pricing {
                let pricing_text = std::fs::read_to_string(path)?;
                let pricing: PricingConfig = serde_json::from_str(&pricing_text)
                    .map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))?;
                config.pricing = pricing;
            }
            let run = run_scenario(&config)?;
            std::fs::write(&out, run.report.to_json())?;
            if let Some(path) = trace_out {
                let json =
                    serde_json::to_string_pretty(&run.trace).expect("trace serializes");
                std::fs::write(path, json)?;
            }
            if let Some(path) = events_out {
                std::fs::write(path, run.ledger.export_events_jsonl())?;
            }
            for session in &run.report.sessions {
                println!(
                    "{}: {} ({:?})",
                    session.session_id, session.terminal_state, session.adversary
                );
            }
            println!(
                "report -> {} (sessions {}, conservation {})",
                out.display(),
                run.report.sessions.len(),
                if run.report.conservation_ok { "ok" } else { "VIOLATED" }
            );
            Ok(())
        }
        Command::Analyze { trace, view, out } => {
            let text = std::fs::read_to_string(&trace)?;
            let trace: ExecutionTrace = serde_json::from_str(&text)
                .map_err(|e| ScenarioError::Config(format!("trace: {e}")))?;
            let report = analyze(&trace, view.into());
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match out {
                Some(path) => std::fs::write(path, json)?,
                None => println!("{json}"),
            }
            Ok(())
        }
    }
}

