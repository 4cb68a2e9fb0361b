//! `dapm` — declarative process mining over data-aware constraints.
//!
//! Subcommands:
//! - `check`    — conformance-check a log against a model
//! - `generate` — produce a log of traces satisfying a model
//! - `query`    — enumerate variable assignments under which a log conforms
//! - `emit-asp` — print the answer-set program for one of the three problems
//!
//! Exit codes: 0 success, 1 negative analysis result (non-conforming log,
//! empty query answer with `--fail-empty`, infeasible generation), 2 for
//! usage, input, or environment errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dapm::asp;
use dapm::conformance::check_log;
use dapm::io::{load_log, load_model, save_log, DecodeMode, LogFormat};
use dapm::loggen::{
    generate, GenerationLimits, GenerationMode, GenerationOutcome, GenerationRequest,
};
use dapm::model::Log;
use dapm::querycheck::{format_assignment, query_check, QueryResult};
use dapm::ProcessModel;

#[derive(Parser)]
#[command(name = "dapm", version, about = "Declarative process mining over data-aware constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every trace of a log against every constraint of a model.
    ///
    /// Exits 0 when all traces conform and 1 otherwise.
    Check(CheckArgs),
    /// Generate traces that satisfy a model.
    ///
    /// Exits 1 when no trace in the requested length range satisfies the
    /// model.
    Generate(GenerateArgs),
    /// Enumerate the activity-variable assignments under which every trace
    /// of a log satisfies the model.
    Query(QueryArgs),
    /// Print an answer-set program for an external solver.
    #[command(name = "emit-asp", subcommand)]
    EmitAsp(AspCommand),
}

#[derive(Args)]
struct ModelArg {
    /// Model file (activity declarations and constraints).
    #[arg(short, long, value_name = "FILE")]
    model: PathBuf,
}

#[derive(Args)]
struct LogArgs {
    /// Log file to read.
    #[arg(short, long, value_name = "FILE")]
    log: PathBuf,
    /// Log file format; inferred from the extension when omitted
    /// (`.xes` means XES, anything else means the text format).
    #[arg(long, value_enum, value_name = "FORMAT")]
    format: Option<Format>,
    /// Repair recoverable log defects (clamp out-of-range integers, drop
    /// undeclared attributes, skip invalid traces) instead of failing;
    /// each repair prints a warning on stderr.
    #[arg(long)]
    lenient: bool,
}

impl LogArgs {
    fn load(&self, model: &ProcessModel) -> Result<Log> {
        let mode = if self.lenient { DecodeMode::Lenient } else { DecodeMode::Strict };
        let loaded = load_log(
            &self.log,
            &model.vocabulary,
            self.format.map(Format::into_log_format),
            mode,
        )?;
        for warning in &loaded.warnings {
            eprintln!("warning: {warning}");
        }
        Ok(loaded.log)
    }
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("length-spec").required(true).args(["length", "max_length"]))]
struct LengthArgs {
    /// Generate traces of exactly this length.
    #[arg(short = 't', long, value_name = "N", conflicts_with_all = ["min_length", "max_length"])]
    length: Option<usize>,
    /// Shortest admissible trace length (default 1; requires --max-length).
    #[arg(long, value_name = "N", requires = "max_length")]
    min_length: Option<usize>,
    /// Longest admissible trace length.
    #[arg(long, value_name = "N")]
    max_length: Option<usize>,
}

impl LengthArgs {
    fn bounds(&self) -> (usize, usize) {
        match self.length {
            Some(t) => (t, t),
            None => {
                let max = self.max_length.expect("clap guarantees a length bound");
                (self.min_length.unwrap_or(1), max)
            }
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Text,
    Xes,
}

impl Format {
    fn into_log_format(self) -> LogFormat {
        match self {
            Format::Text => LogFormat::Text,
            Format::Xes => LogFormat::Xes,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum ReportStyle {
    Text,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArg,
    #[command(flatten)]
    log: LogArgs,
    /// Report style.
    #[arg(long, value_enum, default_value = "text")]
    report: ReportStyle,
    /// Write the report here instead of standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArg,
    #[command(flatten)]
    length: LengthArgs,
    /// Number of traces to generate.
    #[arg(short = 'n', long, value_name = "N", default_value_t = 1)]
    count: usize,
    /// Seed for the random walk (default 0).
    #[arg(long, value_name = "N", conflicts_with = "exhaustive")]
    seed: Option<u64>,
    /// Keep sampling until the requested number of distinct traces exist.
    #[arg(long, conflicts_with = "exhaustive")]
    unique: bool,
    /// Enumerate satisfying traces exhaustively, in lexicographic order,
    /// instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    /// Print progress to stderr while searching.
    #[arg(long)]
    progress: bool,
    /// Worker threads for the search (default 1; 0 means one per core).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Write the log here instead of standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Log file format; inferred from the output extension when omitted,
    /// and text when writing to standard output.
    #[arg(long, value_enum, value_name = "FORMAT")]
    format: Option<Format>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    model: ModelArg,
    #[command(flatten)]
    log: LogArgs,
    /// Report style.
    #[arg(long, value_enum, default_value = "text")]
    report: ReportStyle,
    /// Exit 1 when no assignment satisfies the model.
    #[arg(long)]
    fail_empty: bool,
    /// Write the report here instead of standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AspCommand {
    /// Program whose answer sets are the satisfying traces.
    Generate {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        length: LengthArgs,
        #[command(flatten)]
        out: AspOutputArgs,
    },
    /// Program that is satisfiable iff the whole log conforms.
    Check {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        log: LogArgs,
        #[command(flatten)]
        out: AspOutputArgs,
    },
    /// Program whose answer sets are the satisfying variable assignments.
    Query {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        log: LogArgs,
        #[command(flatten)]
        out: AspOutputArgs,
    },
}

#[derive(Args)]
struct AspOutputArgs {
    /// Write the program here instead of standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Also run the solver named by the DAPM_ASP_SOLVER environment
    /// variable on the program and report its verdict on stderr.
    #[arg(long)]
    solve: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check(args) => run_check(args),
        Command::Generate(args) => run_generate(args),
        Command::Query(args) => run_query(args),
        Command::EmitAsp(args) => run_emit_asp(args),
    }
}

/// Write to the given file, or to standard output when there is none.
fn deliver(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_check(args: CheckArgs) -> Result<ExitCode> {
    let model = load_model(&args.model.model)?;
    let log = args.log.load(&model)?;
    let report = check_log(&model, &log)?;
    let text = match args.report {
        ReportStyle::Text => format!(
            "{}{} of {} traces conform\n",
            report.text(),
            report.conforming(),
            report.verdicts.len()
        ),
        ReportStyle::Json => format!("{:#}\n", report.to_json()),
    };
    deliver(args.output.as_ref(), &text)?;
    Ok(ExitCode::from(if report.all_conform() { 0 } else { 1 }))
}

fn progress_line(found: usize, requested: usize) {
    eprintln!("progress: {found}/{requested} traces");
}

fn run_generate(args: GenerateArgs) -> Result<ExitCode> {
    let workers = args.jobs.unwrap_or(1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .context("configuring the worker pool")?;

    let model = load_model(&args.model.model)?;
    let (min_length, max_length) = args.length.bounds();
    let request = GenerationRequest {
        count: args.count,
        min_length,
        max_length,
        mode: if args.exhaustive {
            GenerationMode::Exhaustive
        } else {
            GenerationMode::Random { seed: args.seed.unwrap_or(0), unique: args.unique }
        },
        limits: GenerationLimits::default(),
        progress: args.progress.then_some(progress_line),
    };

    let (log, exhausted) = match generate(&model, &request)? {
        GenerationOutcome::Complete(log) => (log, false),
        GenerationOutcome::Exhausted(log) => (log, true),
        GenerationOutcome::Infeasible => {
            eprintln!(
                "no trace of length {min_length}..{max_length} satisfies the model"
            );
            return Ok(ExitCode::from(1));
        }
    };
    if exhausted {
        eprintln!(
            "note: only {} of the requested {} traces exist (or were found \
             within the search budget)",
            log.traces.len(),
            args.count
        );
    }

    match &args.output {
        Some(path) => save_log(
            &log,
            &model.vocabulary,
            path,
            args.format.map(Format::into_log_format),
        )?,
        None => {
            let format = args.format.map_or(LogFormat::Text, Format::into_log_format);
            let text = match format {
                LogFormat::Text => dapm::io::write_text_log(&log, &model.vocabulary),
                LogFormat::Xes => dapm::io::write_xes_log(&log, &model.vocabulary),
            }
            .context("rendering the generated log")?;
            print!("{text}");
        }
    }
    Ok(ExitCode::from(0))
}

fn query_text(result: &QueryResult) -> String {
    let mut out = String::new();
    if result.variables.is_empty() {
        out.push_str("variables: (none)\n");
    } else {
        let names: Vec<String> =
            result.variables.iter().map(|v| format!("?{v}")).collect();
        out.push_str(&format!("variables: {}\n", names.join(" ")));
    }
    out.push_str(&format!("traces checked: {}\n", result.trace_count));
    out.push_str(&format!("satisfying assignments: {}\n", result.assignments.len()));
    for assignment in &result.assignments {
        let line = format_assignment(assignment);
        if line.is_empty() {
            out.push_str("(empty assignment)\n");
        } else {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

fn run_query(args: QueryArgs) -> Result<ExitCode> {
    let model = load_model(&args.model.model)?;
    let log = args.log.load(&model)?;
    let result = query_check(&model, &log)?;
    let text = match args.report {
        ReportStyle::Text => query_text(&result),
        ReportStyle::Json => format!("{:#}\n", result.to_json()),
    };
    deliver(args.output.as_ref(), &text)?;
    Ok(ExitCode::from(if args.fail_empty && result.is_empty() { 1 } else { 0 }))
}

fn run_emit_asp(command: AspCommand) -> Result<ExitCode> {
    let (program, out) = match command {
        AspCommand::Generate { model, length, out } => {
            let model = load_model(&model.model)?;
            let (min, max) = length.bounds();
            (asp::emit_generation_problem(&model, min, max)?, out)
        }
        AspCommand::Check { model, log, out } => {
            let model = load_model(&model.model)?;
            let log = log.load(&model)?;
            (asp::emit_conformance_problem(&model, &log)?, out)
        }
        AspCommand::Query { model, log, out } => {
            let model = load_model(&model.model)?;
            let log = log.load(&model)?;
            (asp::emit_query_problem(&model, &log)?, out)
        }
    };
    deliver(out.output.as_ref(), &program)?;
    if out.solve {
        match asp::solver::solve_with_configured(&program)? {
            None => bail!(
                "--solve requested but no solver is configured; \
                 set {} to a solver command",
                asp::solver::SOLVER_ENV
            ),
            Some(outcome) => {
                let verdict =
                    if outcome.satisfiable { "SATISFIABLE" } else { "UNSATISFIABLE" };
                eprintln!("solver: {verdict} ({} answer set(s))", outcome.answers.len());
            }
        }
    }
    Ok(ExitCode::from(0))
}
