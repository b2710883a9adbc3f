//! `gicl` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 backend
//! exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use gicl_core::analytics::{pagerank, PageRankParams};
use gicl_core::code::{enumerate_codes, MethodCode};
use gicl_core::dataset::{load_dataset, write_dataset, TextAttributedGraph};
use gicl_core::eval::{self, RunPlan, RunSummary, Task};
use gicl_core::fixtures;
use gicl_core::gateway::BackendConfig;
use gicl_core::prompt::{Renderer, RendererOptions, RenderError};
use gicl_core::selection::{SelectionBudget, SelectionError};
use gicl_core::template::TemplatePack;

#[derive(Parser)]
#[command(name = "gicl", version, about = "Graph in-context-learning prompts and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Nc,
    Lp,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Nc => Task::Nc,
            TaskArg::Lp => Task::Lp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Mock,
    Http,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Load a dataset directory and report what it contains.
    Validate {
        #[arg(long)]
        data: PathBuf,
    },
    /// Graph analytics over a dataset.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
    /// Print the 55 method codes, one per line.
    Enumerate,
    /// Render one prompt bundle as JSON.
    Render(RenderArgs),
    /// Template pack management.
    Templates {
        #[command(subcommand)]
        what: TemplatesCommand,
    },
    /// Evaluate codes over a test set against a backend.
    Run(RunArgs),
    /// Aggregate a run directory into a report.
    Report(ReportArgs),
    /// Write the built-in demo dataset for trying out the CLI.
    Fixture {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// PageRank scores over the whole graph.
    Pagerank {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TemplatesCommand {
    /// Write the default template pack to a directory.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long)]
    code: String,
    /// Anchor node id (node classification).
    #[arg(long)]
    node: Option<usize>,
    /// Anchor pair "src,dst" (link prediction).
    #[arg(long)]
    pair: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cot: bool,
    /// Directory holding a custom template pack.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Render anchors outside the test split.
    #[arg(long)]
    allow_any_split: bool,
    #[arg(long)]
    max_neighbors: Option<usize>,
    #[arg(long)]
    max_demos: Option<usize>,
    /// Anchor text cap in characters.
    #[arg(long)]
    anchor_cap: Option<usize>,
    /// Per-neighbor / per-demonstration text cap in characters.
    #[arg(long)]
    item_cap: Option<usize>,
    /// Replace the default CoT sentence.
    #[arg(long)]
    cot_text: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    /// Comma-separated method codes.
    #[arg(long, conflicts_with = "all_codes")]
    codes: Option<String>,
    /// Evaluate all 55 codes (primed codes are skipped for lp).
    #[arg(long)]
    all_codes: bool,
    #[arg(long, value_enum)]
    backend: BackendArg,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value = "gpt-4o")]
    model: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    concurrency: usize,
    #[arg(long)]
    cot: bool,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    resume: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    max_neighbors: Option<usize>,
    #[arg(long)]
    max_demos: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    #[arg(long, default_value_t = 512)]
    max_output_tokens: u32,
    #[arg(long, default_value_t = 30_000)]
    timeout_ms: u64,
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
    #[arg(long)]
    max_in_flight: Option<usize>,
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    cot_text: Option<String>,
    /// Anchor text cap in characters.
    #[arg(long)]
    anchor_cap: Option<usize>,
    /// Per-neighbor / per-demonstration text cap in characters.
    #[arg(long)]
    item_cap: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    run: PathBuf,
    /// Paired run with CoT enabled, for the delta column.
    #[arg(long)]
    cot_run: Option<PathBuf>,
    /// Named baseline accuracy, e.g. "MLP=47.23". Repeatable.
    #[arg(long = "baseline")]
    baselines: Vec<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
}

enum CliError {
    Usage(String),
    Data(String),
    Backend(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Backend(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Backend(m) => m,
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when stdout is closed early (e.g. `gicl enumerate | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn load(data: &Path) -> Result<TextAttributedGraph, CliError> {
    load_dataset(data).map_err(|e| CliError::Data(e.to_string()))
}

fn load_pack(dir: Option<&PathBuf>) -> Result<TemplatePack, CliError> {
    match dir {
        None => Ok(TemplatePack::default()),
        Some(d) => TemplatePack::load(d).map_err(|e| CliError::Data(e.to_string())),
    }
}

fn parse_codes(spec: Option<&str>, all: bool, task: Task) -> Result<Vec<MethodCode>, CliError> {
    if all {
        let mut codes = enumerate_codes();
        if task == Task::Lp {
            codes.retain(|c| !c.is_primed());
        }
        return Ok(codes);
    }
    let spec = spec.ok_or_else(|| CliError::Usage("pass --codes LIST or --all-codes".into()))?;
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| CliError::Usage(format!("{e}"))))
        .collect()
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { data } => {
            let g = load(&data)?;
            let edges: usize = (0..g.node_count()).map(|i| g.neighbors(i).len()).sum::<usize>() / 2;
            println!(
                "ok: {} ({} nodes, {} edges, {} labels, {} pairs, dim {})",
                g.name(),
                g.node_count(),
                edges,
                g.label_vocabulary().len(),
                g.lp_pairs().len(),
                g.dim()
            );
            println!("digest: {}", g.digest());
            Ok(())
        }
        Command::Analyze { what } => match what {
            AnalyzeCommand::Pagerank {
                data,
                damping,
                tol,
                max_iter,
                out,
            } => {
                let g = load(&data)?;
                let params = PageRankParams {
                    damping,
                    tolerance: tol,
                    max_iterations: max_iter,
                };
                let scores = pagerank(&g, &params).map_err(|e| CliError::Usage(e.to_string()))?;
                let body = serde_json::to_string_pretty(&scores).expect("scores serialize");
                std::fs::write(&out, body)
                    .map_err(|e| CliError::Data(format!("writing {}: {e}", out.display())))?;
                println!(
                    "pagerank: converged={} iterations={} -> {}",
                    scores.converged,
                    scores.iterations,
                    out.display()
                );
                Ok(())
            }
        },
        Command::Enumerate => {
            for code in enumerate_codes() {
                println!("{code}");
            }
            Ok(())
        }
        Command::Render(args) => render_command(args),
        Command::Templates { what } => match what {
            TemplatesCommand::Export { out } => {
                TemplatePack::default()
                    .export(&out)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                println!("templates exported to {}", out.display());
                Ok(())
            }
        },
        Command::Run(args) => run_command(args),
        Command::Report(args) => report_command(args),
        Command::Fixture { out } => {
            let g = fixtures::citation_fixture();
            write_dataset(&g, &out).map_err(|e| CliError::Data(e.to_string()))?;
            println!("demo dataset written to {}", out.display());
            Ok(())
        }
    }
}

fn render_command(args: RenderArgs) -> Result<(), CliError> {
    let g = load(&args.data)?;
    let pack = load_pack(args.templates.as_ref())?;
    let code: MethodCode = args
        .code
        .parse()
        .map_err(|e| CliError::Usage(format!("{e}")))?;

    let task: Task = args.task.into();
    let mut budget = match task {
        Task::Nc => SelectionBudget::nc_default(),
        Task::Lp => SelectionBudget::lp_default(),
    };
    if let Some(m) = args.max_neighbors {
        budget.max_neighbors = m;
    }
    if let Some(m) = args.max_demos {
        budget.max_demos = m;
    }

    let mut opts = RendererOptions {
        require_test_anchor: !args.allow_any_split,
        ..RendererOptions::default()
    };
    if let Some(text) = args.cot_text {
        opts.cot_sentence = text;
    }
    if let Some(cap) = args.anchor_cap {
        opts.anchor_cap = cap;
    }
    if let Some(cap) = args.item_cap {
        opts.item_cap = cap;
    }
    let renderer = Renderer::with_pack(&g, pack, opts);

    let bundle = match task {
        Task::Nc => {
            let node = args
                .node
                .ok_or_else(|| CliError::Usage("--task nc needs --node".into()))?;
            renderer.render_nc(&code, node, args.seed, args.cot, &budget)
        }
        Task::Lp => {
            let pair = args
                .pair
                .as_deref()
                .ok_or_else(|| CliError::Usage("--task lp needs --pair SRC,DST".into()))?;
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| CliError::Usage("--pair must be SRC,DST".into()))?;
            let src: usize = a
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("bad --pair src: {e}")))?;
            let dst: usize = b
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("bad --pair dst: {e}")))?;
            renderer.render_lp(&code, (src, dst), args.seed, args.cot, &budget)
        }
    }
    .map_err(render_error)?;

    #[derive(serde::Serialize)]
    struct RenderedBundle<'a> {
        system: &'a str,
        user: &'a str,
        audit: &'a gicl_core::prompt::Audit,
    }
    let out = RenderedBundle {
        system: &bundle.system_text,
        user: &bundle.user_text,
        audit: &bundle.audit,
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("bundle serializes"));
    Ok(())
}

fn render_error(e: RenderError) -> CliError {
    match e {
        RenderError::Selection(SelectionError::MissingPairs) => CliError::Data(e.to_string()),
        RenderError::Template(inner) => CliError::Data(inner.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn run_command(args: RunArgs) -> Result<(), CliError> {
    let g = load(&args.data)?;
    let pack = load_pack(args.templates.as_ref())?;
    let task: Task = args.task.into();
    let codes = parse_codes(args.codes.as_deref(), args.all_codes, task)?;

    let mut budgets = match task {
        Task::Nc => SelectionBudget::nc_default(),
        Task::Lp => SelectionBudget::lp_default(),
    };
    if let Some(m) = args.max_neighbors {
        budgets.max_neighbors = m;
    }
    if let Some(m) = args.max_demos {
        budgets.max_demos = m;
    }

    let backend = match args.backend {
        BackendArg::Mock => BackendConfig::mock(),
        BackendArg::Http => {
            let endpoint = args
                .endpoint
                .ok_or_else(|| CliError::Usage("--backend http needs --endpoint URL".into()))?;
            let mut cfg = BackendConfig::http(&endpoint, &args.model);
            cfg.temperature = args.temperature;
            cfg.max_output_tokens = args.max_output_tokens;
            cfg.timeout_ms = args.timeout_ms;
            cfg.max_retries = args.max_retries;
            cfg.max_in_flight = args.max_in_flight;
            cfg
        }
    };

    let plan = RunPlan {
        task,
        codes,
        trial_ids: None,
        seed: args.seed,
        cot: args.cot,
        budgets,
        backend,
        concurrency: args.concurrency.max(1),
        limit: args.limit,
        resume: args.resume,
        output_dir: args.out.clone(),
    };

    let mut opts = RendererOptions::default();
    if let Some(text) = args.cot_text {
        opts.cot_sentence = text;
    }
    if let Some(cap) = args.anchor_cap {
        opts.anchor_cap = cap;
    }
    if let Some(cap) = args.item_cap {
        opts.item_cap = cap;
    }

    let summary = eval::run_with_options(&g, &plan, pack, opts).map_err(eval_error)?;
    print_summary(&summary);

    let total: usize = summary.per_code.values().map(|s| s.n).sum();
    let errors: usize = summary.per_code.values().map(|s| s.errors).sum();
    if total > 0 && errors == total {
        // Nothing succeeded: distinguish an unusable backend from other
        // per-trial failures by the recorded diagnostics.
        let trials_path = args.out.join("trials.jsonl");
        let sample = std::fs::read_to_string(&trials_path)
            .ok()
            .and_then(|t| {
                t.lines().find_map(|l| {
                    serde_json::from_str::<serde_json::Value>(l)
                        .ok()
                        .and_then(|v| v["error"].as_str().map(str::to_string))
                })
            })
            .unwrap_or_default();
        let message = format!(
            "all {total} trials failed ({sample}); see {}",
            trials_path.display()
        );
        return Err(if sample.starts_with("backend:") {
            CliError::Backend(message)
        } else {
            CliError::Data(message)
        });
    }
    Ok(())
}

fn eval_error(e: eval::EvalError) -> CliError {
    match e {
        eval::EvalError::Gateway(inner) => CliError::Backend(inner.to_string()),
        eval::EvalError::BadPlan(m) => CliError::Usage(m),
        other => CliError::Data(other.to_string()),
    }
}

fn print_summary(summary: &RunSummary) {
    for (code, stats) in &summary.per_code {
        println!(
            "{code}: {:.2}% (n={}, unparsed={}, errors={})",
            stats.accuracy, stats.n, stats.unparsed, stats.errors
        );
    }
    if let Some(s1) = &summary.s1 {
        println!("S1: {s1}");
    }
    if let Some(s2) = &summary.s2 {
        println!("S2: {s2}");
    }
}

fn report_command(args: ReportArgs) -> Result<(), CliError> {
    let mut baselines = Vec::new();
    for spec in &args.baselines {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("baseline {spec:?} must be NAME=ACC")))?;
        let accuracy: f64 = value
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("baseline {spec:?}: {e}")))?;
        baselines.push((name.trim().to_string(), accuracy));
    }

    let report = eval::report(&args.run, &baselines, args.cot_run.as_deref())
        .map_err(|e| match e {
            eval::EvalError::NonPositiveBaseline(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        })?;

    match args.format {
        FormatArg::Table => print!("{}", eval::render_report_table(&report)),
        FormatArg::Json => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"))
        }
        FormatArg::Csv => print!("{}", eval::render_report_csv(&report)),
    }
    Ok(())
}
