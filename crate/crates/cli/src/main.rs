//! `narrate`: run narratives through the pipeline, generate task datasets,
//! and score them.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use narrate::eval::{evaluate_task, render_jsonl, render_table, TaskEval};
use narrate::sim::{generate_dataset, GenConfig, SUPPORTED_TASKS};
use narrate::{emit_path, load_pipeline};
use narrate_core::alm::{parse_program, render_program};
use narrate_core::babi::parse_babi;
use narrate_core::drs::serialize_drs;
use narrate_core::pipeline::{Pipeline, PipelineError};
use narrate_core::semantics::render_model;

#[derive(Parser)]
#[command(name = "narrate", version, about = "Narratives to models to answers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SourceKind {
    /// Numbered story sentences with inline questions.
    Babi,
    /// Discourse facts, one per line.
    Drs,
    /// A system description with a history.
    Alm,
}

#[derive(Subcommand)]
enum Command {
    /// Run one input file through the pipeline and print its results.
    Run {
        /// File to process.
        #[arg(long)]
        input: PathBuf,
        /// What the input file contains.
        #[arg(long, value_enum, default_value_t = SourceKind::Babi)]
        from: SourceKind,
        /// Write the discourse representation here.
        #[arg(long)]
        emit_drs: Option<PathBuf>,
        /// Write the generated program here.
        #[arg(long)]
        emit_alm: Option<PathBuf>,
        /// Write the computed model here.
        #[arg(long)]
        emit_model: Option<PathBuf>,
        /// Treat executability violations as errors instead of warnings.
        #[arg(long)]
        strict_exec: bool,
        /// Directory of theory files extending the built-in library.
        #[arg(long)]
        lib: Option<PathBuf>,
        /// Verb lexicon file merged over the built-in entries.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Generate a task dataset from a seeded simulation.
    Gen {
        /// Task number.
        #[arg(long)]
        task: u32,
        /// Questions to generate.
        #[arg(long)]
        count: usize,
        /// Random seed.
        #[arg(long)]
        seed: u64,
        /// Probability of replacing a verb with a synonym.
        #[arg(long, default_value_t = 0.0)]
        synonym_swap: f64,
        /// Directory to write task<N>.txt into.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score datasets and print a per-task accuracy table.
    Eval {
        /// Directory holding task<N>.txt files.
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated task numbers.
        #[arg(long)]
        tasks: String,
        /// Also write the results as JSON lines.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

struct CliError {
    code: i32,
    message: String,
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError {
            code: e.class.exit_code(),
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError {
        code: 1,
        message: message.into(),
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    std::process::exit(code);
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            input,
            from,
            emit_drs,
            emit_alm,
            emit_model,
            strict_exec,
            lib,
            lexicon,
        } => {
            let pipeline = load_pipeline(lib.as_deref(), lexicon.as_deref(), strict_exec)
                .map_err(input_error)?;
            let source = read_input(&input)?;
            let emits = Emits {
                drs: emit_drs,
                alm: emit_alm,
                model: emit_model,
            };
            match from {
                SourceKind::Babi => run_babi(&pipeline, &source, &emits),
                SourceKind::Drs => run_drs(&pipeline, &source, &emits),
                SourceKind::Alm => run_alm(&pipeline, &source, &emits),
            }
        }
        Command::Gen {
            task,
            count,
            seed,
            synonym_swap,
            out,
        } => cmd_gen(task, count, seed, synonym_swap, &out),
        Command::Eval {
            data,
            tasks,
            report,
        } => cmd_eval(&data, &tasks, report.as_deref()),
    }
}

struct Emits {
    drs: Option<PathBuf>,
    alm: Option<PathBuf>,
    model: Option<PathBuf>,
}

impl Emits {
    /// Writes one story's artifact to its (possibly suffixed) destination.
    fn write(
        target: &Option<PathBuf>,
        index: usize,
        total: usize,
        content: String,
    ) -> Result<(), CliError> {
        if let Some(base) = target {
            write_output(&emit_path(base, index, total), &content)?;
        }
        Ok(())
    }
}

fn run_babi(pipeline: &Pipeline, source: &str, emits: &Emits) -> Result<(), CliError> {
    let stories = parse_babi(source).map_err(|d| input_error(d.message))?;
    let total = stories.len();
    for (index, story) in stories.iter().enumerate() {
        let sentences = story.sentences_before(story.items.len());
        let run = pipeline.run_story(&sentences)?;
        for d in &run.diagnostics {
            eprintln!("warning: {}", d.message);
        }
        Emits::write(&emits.drs, index, total, serialize_drs(&run.drs))?;
        Emits::write(&emits.alm, index, total, render_program(&run.program))?;
        Emits::write(&emits.model, index, total, render_model(&run.model))?;
        for (item_index, question) in story.questions() {
            let prefix = story.sentences_before(item_index);
            let prefix_run = pipeline.run_story(&prefix)?;
            let answer = pipeline.answer(&question.text, &prefix_run)?;
            println!("{}\t{answer}", question.number);
        }
    }
    Ok(())
}

fn run_drs(pipeline: &Pipeline, source: &str, emits: &Emits) -> Result<(), CliError> {
    let run = pipeline.run_drs_text(source, "base")?;
    for d in &run.diagnostics {
        eprintln!("warning: {}", d.message);
    }
    Emits::write(&emits.drs, 0, 1, serialize_drs(&run.drs))?;
    Emits::write(&emits.alm, 0, 1, render_program(&run.program))?;
    Emits::write(&emits.model, 0, 1, render_model(&run.model))?;
    print!("{}", render_model(&run.model));
    Ok(())
}

fn run_alm(pipeline: &Pipeline, source: &str, emits: &Emits) -> Result<(), CliError> {
    if emits.drs.is_some() {
        eprintln!("warning: --emit-drs has no effect when the input is already a program");
    }
    let program = parse_program(source).map_err(|d| input_error(d.message))?;
    let (model, diagnostics) = pipeline.run_program_text(source)?;
    for d in &diagnostics {
        eprintln!("warning: {}", d.message);
    }
    Emits::write(&emits.alm, 0, 1, render_program(&program))?;
    Emits::write(&emits.model, 0, 1, render_model(&model))?;
    print!("{}", render_model(&model));
    Ok(())
}

fn cmd_gen(task: u32, count: usize, seed: u64, synonym_swap: f64, out: &Path) -> Result<(), CliError> {
    if !SUPPORTED_TASKS.contains(&task) {
        return Err(input_error(format!(
            "task {task} is not supported (supported tasks: {})",
            SUPPORTED_TASKS.map(|t| t.to_string()).join(",")
        )));
    }
    if !(0.0..=1.0).contains(&synonym_swap) {
        return Err(input_error(format!(
            "--synonym-swap must be between 0 and 1, got {synonym_swap}"
        )));
    }
    let text = generate_dataset(&GenConfig {
        task,
        count,
        seed,
        synonym_swap,
    });
    fs::create_dir_all(out).map_err(|e| input_error(format!("{}: {e}", out.display())))?;
    let path = out.join(format!("task{task}.txt"));
    write_output(&path, &text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_eval(data: &Path, tasks: &str, report: Option<&Path>) -> Result<(), CliError> {
    let mut numbers = Vec::new();
    for part in tasks.split(',') {
        let part = part.trim();
        let task: u32 = part
            .parse()
            .map_err(|_| input_error(format!("\"{part}\" is not a task number")))?;
        if !SUPPORTED_TASKS.contains(&task) {
            return Err(input_error(format!(
                "task {task} is not supported (supported tasks: {})",
                SUPPORTED_TASKS.map(|t| t.to_string()).join(",")
            )));
        }
        numbers.push(task);
    }
    if numbers.is_empty() {
        return Err(input_error("--tasks names no tasks"));
    }
    let pipeline = Pipeline::default();
    let mut evals: Vec<TaskEval> = Vec::new();
    for task in numbers {
        let path = data.join(format!("task{task}.txt"));
        let text = read_input(&path)?;
        let eval = evaluate_task(&pipeline, task, &text).map_err(input_error)?;
        for failure in &eval.failures {
            eprintln!("miss: {failure}");
        }
        evals.push(eval);
    }
    print!("{}", render_table(&evals));
    if let Some(path) = report {
        write_output(path, &render_jsonl(&evals))?;
    }
    Ok(())
}
