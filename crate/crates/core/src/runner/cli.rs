//! Command-line front end. `run_cli` returns the process exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::archive::{write_atomic, ArchiveError, ArchiveWriter, StoredArchive};
use super::config::{Config, ConfigError, Environment, GeneratorMode};
use super::metrics::{compute_metrics, front_csv, heatmap_csv, metrics_csv};
use crate::dsl::{parse, validate_signature};
use crate::evolution::{run_meoh, RunError};
use crate::problem::bpp::evaluate_bpp;
use crate::problem::tsp::evaluate_tsp;
use crate::problem::{ObjectiveMode, ProblemEnvironment};

pub const EXIT_OK: i32 = 0;
/// Bad arguments, unreadable or invalid config, corrupt archive.
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INIT_EXHAUSTED: i32 = 2;
/// The heuristic given to `eval` was rejected.
pub const EXIT_HEURISTIC: i32 = 3;

pub const ARCHIVE_FILE: &str = "archive.jsonl";
pub const METRICS_FILE: &str = "metrics.csv";
pub const FRONT_FILE: &str = "front.csv";
pub const HEATMAP_FILE: &str = "heatmap.csv";
pub const EVAL_FILE: &str = "eval.csv";

#[derive(Debug, Parser)]
#[command(name = "meoh", version, about = "Multi-objective evolution of heuristic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a population and write the archive and metrics.
    Run(RunArgs),
    /// Evaluate one heuristic file on the configured instances.
    Eval(EvalArgs),
    /// Per-generation HV, IGD and mean score of an archive.
    Metrics(ArchiveArgs),
    /// Non-dominated members of an archive's final population.
    ExportFront(ArchiveArgs),
    /// Generations by slots grid of dominance-dissimilarity scores.
    Heatmap(ArchiveArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<GeneratorMode>,
    #[arg(long)]
    objective: Option<ObjectiveMode>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Suppress per-generation progress lines.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Heuristic source file.
    heuristic: PathBuf,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    objective: Option<ObjectiveMode>,
    /// Also write the report as CSV here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ArchiveArgs {
    /// Archive written by `run`.
    archive: PathBuf,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }
}

impl From<ArchiveError> for Failure {
    fn from(e: ArchiveError) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, stdout, stderr),
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Metrics(a) => cmd_archive(a, METRICS_FILE, stdout, |s| {
            compute_metrics(s).map(|rows| metrics_csv(&rows))
        }),
        Command::ExportFront(a) => cmd_archive(a, FRONT_FILE, stdout, front_csv),
        Command::Heatmap(a) => cmd_archive(a, HEATMAP_FILE, stdout, heatmap_csv),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn cmd_run(args: RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let mut config = Config::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.run.seed = seed;
    }
    if let Some(mode) = args.mode {
        config.llm.mode = mode;
    }
    if let Some(objective) = args.objective {
        config.run.objective_mode = objective;
    }
    let env = config.environment()?;
    let mut generator = config.generator()?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| config_failure(format!("cannot create `{}`: {e}", args.out_dir.display())))?;
    let archive_path = args.out_dir.join(ARCHIVE_FILE);
    let progress: Option<&mut dyn Write> = if args.quiet { None } else { Some(stderr) };
    let mut writer = ArchiveWriter::new(config.clone(), archive_path.clone(), progress);
    let outcome = run_meoh(&config.run, generator.as_mut(), &env, &mut writer);
    // failed attempts are kept even when the run stops early
    writer.flush().map_err(config_failure)?;
    match outcome {
        Ok(_) => {}
        Err(e @ RunError::InitializationExhausted { .. }) => {
            return Err(Failure {
                code: EXIT_INIT_EXHAUSTED,
                message: e.to_string(),
            })
        }
        Err(e) => return Err(config_failure(e.to_string())),
    }
    let rows = compute_metrics(&writer.stored).map_err(config_failure)?;
    write_atomic(&args.out_dir.join(METRICS_FILE), metrics_csv(&rows).as_bytes())?;
    let _ = writeln!(
        stdout,
        "run {} finished: archive {}",
        writer.stored.header.run_id,
        archive_path.display()
    );
    Ok(())
}

fn cmd_archive(
    args: ArchiveArgs,
    file_name: &str,
    stdout: &mut dyn Write,
    render: impl Fn(&StoredArchive) -> Result<String, String>,
) -> Result<(), Failure> {
    let stored = StoredArchive::read(&args.archive)?;
    let csv = render(&stored).map_err(|message| {
        Failure::from(ArchiveError::CorruptArchive {
            path: args.archive.clone(),
            message,
        })
    })?;
    emit(&csv, args.out_dir.as_deref(), file_name, stdout)
}

fn emit(csv: &str, out_dir: Option<&Path>, file_name: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| config_failure(format!("cannot create `{}`: {e}", dir.display())))?;
            write_atomic(&dir.join(file_name), csv.as_bytes())?;
            Ok(())
        }
        None => stdout
            .write_all(csv.as_bytes())
            .map_err(|e| config_failure(format!("cannot write output: {e}"))),
    }
}

fn cmd_eval(args: EvalArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = Config::load(&args.config)?;
    let mode = args.objective.unwrap_or(config.run.objective_mode);
    let env = config.environment()?;
    let rejected = |category: &str, message: String| Failure {
        code: EXIT_HEURISTIC,
        message: format!("{category}: {message}"),
    };
    let source = std::fs::read_to_string(&args.heuristic)
        .map_err(|e| config_failure(format!("cannot read `{}`: {e}", args.heuristic.display())))?;
    let tree = parse(&source).map_err(|e| rejected("parse_error", e.to_string()))?;
    validate_signature(&tree, &env.task().signature).map_err(|e| rejected("signature_error", e.to_string()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let runtime = |e: crate::problem::EvalError| rejected("runtime_error", e.to_string());
    match &env {
        Environment::Bpp(b) => {
            w.write_record(["instance", "bins_used", "lower_bound", "gap", "cost"]).expect("in-memory csv");
            let (mut gaps, mut total) = (Vec::new(), 0.0);
            for (k, inst) in b.instances.iter().enumerate() {
                let (eval, reports) =
                    evaluate_bpp(&tree, std::slice::from_ref(inst), mode, &b.limits, b.rule).map_err(runtime)?;
                let r = &reports[0];
                let cost = eval.objectives[1];
                w.write_record([
                    k.to_string(),
                    r.bins_used.to_string(),
                    r.lower_bound.to_string(),
                    r.gap.to_string(),
                    cost.to_string(),
                ])
                .expect("in-memory csv");
                gaps.push(r.gap);
                total += cost;
            }
            let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
            w.write_record(["mean", "", "", &mean.to_string(), &total.to_string()]).expect("in-memory csv");
        }
        Environment::Tsp(t) => {
            w.write_record(["instance", "best_length", "reference", "gap", "cost"]).expect("in-memory csv");
            let (mut gaps, mut total) = (Vec::new(), 0.0);
            for (inst, &reference) in t.instances.iter().zip(&t.reference_lengths) {
                let (eval, reports) =
                    evaluate_tsp(&tree, std::slice::from_ref(inst), &[reference], &t.gls, &t.limits, mode)
                        .map_err(runtime)?;
                let r = &reports[0];
                let cost = eval.objectives[1];
                w.write_record([
                    r.name.clone(),
                    r.best_length.to_string(),
                    r.reference.to_string(),
                    r.gap.to_string(),
                    cost.to_string(),
                ])
                .expect("in-memory csv");
                gaps.push(r.gap);
                total += cost;
            }
            let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
            w.write_record(["mean", "", "", &mean.to_string(), &total.to_string()]).expect("in-memory csv");
        }
    }
    let csv = String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8");
    stdout
        .write_all(csv.as_bytes())
        .map_err(|e| config_failure(format!("cannot write output: {e}")))?;
    if let Some(dir) = args.out_dir.as_deref() {
        emit(&csv, Some(dir), EVAL_FILE, stdout)?;
    }
    Ok(())
}
