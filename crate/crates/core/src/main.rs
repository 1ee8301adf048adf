//! Operator CLI: validate models, build/inspect the DAG and hop matrix,
//! run batch predictions with trace output, and watch live log files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use failsense::engine::{Engine, EnginePolicy, PredictionReport, Strictness, Verdict};
use failsense::graph::{build_dag, build_hop_matrix, render_artifact};
use failsense::model::{load_model, validate_matrix, Model};
use failsense::output::{report_to_csv_rows, report_to_json, trace_line, CSV_HEADER};
use failsense::parser::{compile_rules, parse_window, RuleSet, WindowConfig};
use failsense::source::{poll, run_fetch_hook, Checkpoint};

/// Exit codes for `predict`: a terminal prediction at or above the alert
/// threshold, no prediction at all, or invalid sequences only. Shell
/// pipelines can branch on these without parsing output.
const EXIT_PREDICTED: u8 = 0;
const EXIT_NO_PREDICTION: u8 = 2;
const EXIT_INVALID_ONLY: u8 = 3;

#[derive(Parser)]
#[command(name = "failsense", version, about = "Log-based failure prediction for network elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model config file against the matrix invariants.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Emit the DAG / hop matrix debug artifact for a model.
    Build {
        #[arg(long)]
        model: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the prediction pipeline over a complete log file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        /// Print a human-readable per-event table instead of records.
        #[arg(long)]
        trace: bool,
    },
    /// Poll a log file periodically and stream predictions.
    Watch {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        /// Local log path (or the staging target of the fetch hook).
        #[arg(long)]
        path: PathBuf,
        /// Poll interval in seconds.
        #[arg(long, default_value_t = 5.0)]
        interval: f64,
        #[arg(long)]
        checkpoint: PathBuf,
        /// External copy command; must print the staged path on stdout.
        #[arg(long)]
        fetch_hook: Option<String>,
        /// Sliding window length in seconds.
        #[arg(long, default_value_t = 60.0)]
        window: f64,
        /// Stop after this many poll cycles (0 = run forever).
        #[arg(long, default_value_t = 0)]
        cycles: u64,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
}

#[derive(Args)]
struct EngineArgs {
    /// Disable event bit-mask candidate pruning.
    #[arg(long)]
    no_prune: bool,
    /// Ignore non-matching events instead of declaring invalid sequences.
    #[arg(long)]
    lenient: bool,
    /// Alert threshold on reported probabilities.
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    /// Close sessions idle longer than this many seconds.
    #[arg(long)]
    session_timeout: Option<f64>,
}

impl EngineArgs {
    fn policy(&self) -> EnginePolicy {
        EnginePolicy {
            pruning: !self.no_prune,
            strictness: if self.lenient {
                Strictness::Lenient
            } else {
                Strictness::Strict
            },
            alert_threshold: self.threshold,
            session_timeout: self
                .session_timeout
                .map(|s| chrono::Duration::milliseconds((s * 1000.0) as i64)),
            single_transition_skip: true,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

fn load_model_file(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading model {}", path.display()))?;
    load_model(&text).with_context(|| format!("loading model {}", path.display()))
}

fn load_rules_file(path: &Path, model: &Model) -> Result<RuleSet> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading rules {}", path.display()))?;
    compile_rules(&text, model).with_context(|| format!("compiling rules {}", path.display()))
}

fn cmd_validate(model_path: &Path) -> Result<ExitCode> {
    let model = load_model_file(model_path)?;
    let report = validate_matrix(model.matrix());
    for v in &report.violations {
        println!("violation: {v}");
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if report.is_clean() {
        println!(
            "ok: {} events, {} failures",
            model.matrix().n_events(),
            model.matrix().n_failures()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_build(model_path: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let model = load_model_file(model_path)?;
    let report = validate_matrix(model.matrix());
    if !report.is_clean() {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        anyhow::bail!("model failed validation");
    }
    let dag = build_dag(model.matrix());
    let hops = build_hop_matrix(model.matrix());
    let artifact = render_artifact(&model, &dag, &hops);
    match out {
        Some(path) => std::fs::write(path, artifact)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{artifact}"),
    }
    Ok(ExitCode::SUCCESS)
}

struct ReportWriter {
    format: Format,
    trace: bool,
    wrote_header: bool,
}

impl ReportWriter {
    fn new(format: Format, trace: bool) -> Self {
        ReportWriter {
            format,
            trace,
            wrote_header: false,
        }
    }

    fn write(&mut self, report: &PredictionReport, model: &Model) {
        if self.trace {
            println!("{}", trace_line(report, model));
            return;
        }
        match self.format {
            Format::Jsonl => println!("{}", report_to_json(report, model)),
            Format::Csv => {
                if !self.wrote_header {
                    println!("{CSV_HEADER}");
                    self.wrote_header = true;
                }
                for row in report_to_csv_rows(report, model) {
                    println!("{row}");
                }
            }
        }
    }
}

fn prediction_exit(reports: &[PredictionReport], threshold: f64) -> ExitCode {
    let terminal_hit = reports.iter().any(|r| {
        r.entries
            .iter()
            .any(|c| r.terminal.contains(&c.failure) && c.probability >= threshold)
    });
    if terminal_hit {
        return ExitCode::from(EXIT_PREDICTED);
    }
    let any_terminal = reports.iter().any(|r| !r.terminal.is_empty());
    let any_invalid = reports
        .iter()
        .any(|r| r.verdict == Verdict::InvalidSequence);
    if any_invalid && !any_terminal {
        ExitCode::from(EXIT_INVALID_ONLY)
    } else {
        ExitCode::from(EXIT_NO_PREDICTION)
    }
}

fn cmd_predict(
    model_path: &Path,
    rules_path: &Path,
    log_path: &Path,
    engine_args: &EngineArgs,
    format: Format,
    trace: bool,
) -> Result<ExitCode> {
    let model = load_model_file(model_path)?;
    let rules = load_rules_file(rules_path, &model)?;
    let log = std::fs::read_to_string(log_path)
        .with_context(|| format!("reading log {}", log_path.display()))?;

    let dag = build_dag(model.matrix());
    let hops = build_hop_matrix(model.matrix());
    let mut engine = Engine::new(model.matrix().clone(), dag, hops, engine_args.policy())?;

    // Batch mode treats the whole file as one window.
    let window = WindowConfig::new(chrono::Duration::days(36500), true);
    let parsed = parse_window(&log, 1, &rules, &window);
    for d in &parsed.diagnostics {
        eprintln!("line {}: {}", d.line_no, d.reason);
    }

    let mut writer = ReportWriter::new(format, trace);
    let mut all_reports = Vec::new();
    for record in &parsed.records {
        let reports = engine
            .ingest(record)
            .with_context(|| format!("line {}", record.line_no))?;
        for report in &reports {
            writer.write(report, &model);
        }
        all_reports.extend(reports);
    }
    Ok(prediction_exit(&all_reports, engine_args.threshold))
}

#[allow(clippy::too_many_arguments)]
fn cmd_watch(
    model_path: &Path,
    rules_path: &Path,
    path: &Path,
    interval: f64,
    checkpoint_path: &Path,
    fetch_hook: Option<&str>,
    window_secs: f64,
    cycles: u64,
    engine_args: &EngineArgs,
    format: Format,
) -> Result<ExitCode> {
    let model = load_model_file(model_path)?;
    let rules = load_rules_file(rules_path, &model)?;
    let dag = build_dag(model.matrix());
    let hops = build_hop_matrix(model.matrix());
    let mut engine = Engine::new(model.matrix().clone(), dag, hops, engine_args.policy())?;

    let window = WindowConfig::new(
        chrono::Duration::milliseconds((window_secs * 1000.0) as i64),
        true,
    );
    let mut checkpoint = Checkpoint::load(checkpoint_path)
        .with_context(|| format!("loading checkpoint {}", checkpoint_path.display()))?;
    let mut writer = ReportWriter::new(format, false);
    let mut cycle = 0u64;
    let mut last_ts: Option<chrono::NaiveDateTime> = None;

    loop {
        cycle += 1;

        let poll_path: PathBuf = match fetch_hook {
            Some(cmd) => match run_fetch_hook(cmd) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("fetch: {e}");
                    if cycles != 0 && cycle >= cycles {
                        break;
                    }
                    std::thread::sleep(std::time::Duration::from_secs_f64(interval));
                    continue;
                }
            },
            None => path.to_path_buf(),
        };

        match poll(&poll_path, &mut checkpoint) {
            Ok(out) => {
                if out.rotated {
                    eprintln!("poll: rotation detected, restarting from offset 0");
                }
                if out.chunk.is_empty() {
                    eprintln!("heartbeat: cycle {cycle}, no new lines");
                } else {
                    let parsed = parse_window(&out.chunk, out.first_line_no, &rules, &window);
                    for d in &parsed.diagnostics {
                        eprintln!("line {}: {}", d.line_no, d.reason);
                    }
                    for record in &parsed.records {
                        last_ts = Some(record.timestamp);
                        checkpoint.last_timestamp = Some(record.timestamp.to_string());
                        for report in engine.ingest(record)? {
                            writer.write(&report, &model);
                        }
                    }
                }
                if let Some(now) = last_ts {
                    for report in engine.tick(now) {
                        writer.write(&report, &model);
                    }
                }
                checkpoint
                    .save(checkpoint_path)
                    .with_context(|| format!("saving checkpoint {}", checkpoint_path.display()))?;
            }
            Err(e) => eprintln!("poll: {e}"),
        }

        if cycles != 0 && cycle >= cycles {
            break;
        }
        std::thread::sleep(std::time::Duration::from_secs_f64(interval));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate { model } => cmd_validate(model),
        Command::Build { model, out } => cmd_build(model, out.as_deref()),
        Command::Predict {
            model,
            rules,
            log,
            engine,
            format,
            trace,
        } => cmd_predict(model, rules, log, engine, *format, *trace),
        Command::Watch {
            model,
            rules,
            path,
            interval,
            checkpoint,
            fetch_hook,
            window,
            cycles,
            engine,
            format,
        } => cmd_watch(
            model,
            rules,
            path,
            *interval,
            checkpoint,
            fetch_hook.as_deref(),
            *window,
            *cycles,
            engine,
            *format,
        ),
    }
}
