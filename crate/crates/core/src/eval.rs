//! Trial orchestration, answer parsing, persistence, and reporting.
//!
//! A run walks every (code, trial) pair of its plan: select, render,
//! complete, extract, then append one JSON line to `trials.jsonl`. A
//! bounded worker pool computes trials concurrently, but a single ordered
//! writer serializes them in plan order, so the output is byte-identical
//! (modulo latency) at any concurrency level. Per-trial failures are
//! recorded, never fatal; only setup failures abort a run. Resume skips
//! (code, trial) pairs already on disk, and any prefix of `trials.jsonl`
//! is a valid resume state.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::MethodCode;
use crate::dataset::{split_members, PairSplit, Split, TextAttributedGraph};
use crate::gateway::{BackendConfig, Gateway};
use crate::prompt::{Renderer, RendererOptions, Subject};
use crate::selection::SelectionBudget;
use crate::template::TemplatePack;

pub use crate::prompt::Task;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Gateway(#[from] crate::gateway::GatewayError),
    #[error("bad plan: {0}")]
    BadPlan(String),
    #[error("accuracy of an empty result set is undefined")]
    EmptyResults,
    #[error("relative improvement needs a positive baseline, got {0}")]
    NonPositiveBaseline(f64),
    #[error("{path}:{line}: corrupt trial record: {message}")]
    CorruptTrials {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("run directory {0} has no trials.jsonl")]
    MissingRun(PathBuf),
}

/// Everything a run needs besides the dataset itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunPlan {
    pub task: Task,
    pub codes: Vec<MethodCode>,
    /// Explicit node ids (NC) or pair indices (LP). `None` takes the whole
    /// test split. Supplying ids overrides the test-split requirement.
    pub trial_ids: Option<Vec<usize>>,
    pub seed: u64,
    pub cot: bool,
    pub budgets: SelectionBudget,
    pub backend: BackendConfig,
    pub concurrency: usize,
    pub limit: Option<usize>,
    pub resume: bool,
    pub output_dir: PathBuf,
}

/// A prediction: a vocabulary label (NC) or a 0/1 verdict (LP).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prediction {
    Binary(u8),
    Label(String),
}

/// One completed trial, as persisted to `trials.jsonl`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_id: String,
    pub code: String,
    pub subject: Subject,
    pub prompt_digest: String,
    pub raw_text: String,
    pub predicted: Option<Prediction>,
    pub gold: Prediction,
    pub correct: bool,
    pub unparsed: bool,
    pub error: Option<String>,
    /// Wall-clock latency in milliseconds.
    #[serde(rename = "latency")]
    pub latency_ms: u64,
}

/// Per-code aggregate, as persisted to `summary.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeStats {
    pub accuracy: f64,
    pub n: usize,
    pub unparsed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub per_code: BTreeMap<String, CodeStats>,
    pub s1: Option<String>,
    pub s2: Option<String>,
    pub plan: RunPlan,
    pub dataset_digest: String,
}

/// Extraction outcome for one raw completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extraction {
    Label(String),
    Binary(u8),
    Unparsed,
}

/// Parse a model completion into a prediction.
///
/// NC: case-insensitive substring search over the vocabulary; the longest
/// matching label wins, then the earliest occurrence, then vocabulary
/// order (so "Video Surveillance" beats "Video", and `cs.XX` codes match
/// regardless of case). LP: the first standalone '0' or '1' wins, with
/// word "yes"/"no" as fallback. Anything else is unparsed, never a guess.
pub fn extract_label(raw: &str, vocab: &[String], task: Task) -> Extraction {
    match task {
        Task::Nc => extract_nc(raw, vocab),
        Task::Lp => extract_lp(raw),
    }
}

fn extract_nc(raw: &str, vocab: &[String]) -> Extraction {
    let haystack = raw.to_lowercase();
    let mut best: Option<(usize, usize, usize)> = None; // (len, pos, vocab idx)
    for (idx, label) in vocab.iter().enumerate() {
        let needle = label.to_lowercase();
        if needle.is_empty() {
            continue;
        }
        if let Some(pos) = haystack.find(&needle) {
            // Longest label first, then earliest occurrence; vocabulary
            // order falls out of the scan order (earlier entries are
            // never displaced by an equal-length, equal-position match).
            let wins = match best {
                None => true,
                Some((blen, bpos, _)) => needle.len() > blen || (needle.len() == blen && pos < bpos),
            };
            if wins {
                best = Some((needle.len(), pos, idx));
            }
        }
    }
    match best {
        Some((_, _, idx)) => Extraction::Label(vocab[idx].clone()),
        None => Extraction::Unparsed,
    }
}

fn is_boundary(bytes: &[u8], index: Option<usize>) -> bool {
    match index {
        None => true,
        Some(i) => !(bytes[i] as char).is_ascii_alphanumeric(),
    }
}

fn extract_lp(raw: &str) -> Extraction {
    let bytes = raw.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'0' || b == b'1')
            && is_boundary(bytes, i.checked_sub(1))
            && is_boundary(bytes, (i + 1 < bytes.len()).then_some(i + 1))
        {
            return Extraction::Binary(b - b'0');
        }
    }
    // Fallback: earliest standalone "yes" or "no", case-insensitive.
    let lower = raw.to_lowercase();
    let lb = lower.as_bytes();
    let mut earliest: Option<(usize, u8)> = None;
    for (word, verdict) in [("yes", 1u8), ("no", 0u8)] {
        let mut from = 0;
        while let Some(rel) = lower[from..].find(word) {
            let pos = from + rel;
            let end = pos + word.len();
            if is_boundary(lb, pos.checked_sub(1)) && is_boundary(lb, (end < lb.len()).then_some(end))
            {
                if earliest.is_none_or(|(e, _)| pos < e) {
                    earliest = Some((pos, verdict));
                }
                break;
            }
            from = pos + 1;
        }
    }
    match earliest {
        Some((_, v)) => Extraction::Binary(v),
        None => Extraction::Unparsed,
    }
}

/// Accuracy in percent; unparsed trials count against it.
pub fn accuracy(results: &[TrialResult]) -> Result<f64, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyResults);
    }
    let correct = results.iter().filter(|r| r.correct).count();
    Ok(100.0 * correct as f64 / results.len() as f64)
}

/// Relative percent difference of `best` over `baseline`.
pub fn relative_improvement(best: f64, baseline: f64) -> Result<f64, EvalError> {
    if baseline <= 0.0 {
        return Err(EvalError::NonPositiveBaseline(baseline));
    }
    Ok(100.0 * (best - baseline) / baseline)
}

/// Signed two-decimal percent, e.g. "+76.96%".
pub fn format_signed_percent(value: f64) -> String {
    format!("{value:+.2}%")
}

struct TrialSpec {
    code: MethodCode,
    /// Node id for NC; index into `lp_pairs` for LP.
    subject_id: usize,
}

impl TrialSpec {
    fn trial_id(&self) -> String {
        format!("{}:{}", self.code, self.subject_id)
    }
}

fn trial_subjects(g: &TextAttributedGraph, plan: &RunPlan) -> Result<Vec<usize>, EvalError> {
    let mut ids = match (&plan.trial_ids, plan.task) {
        (Some(ids), _) => ids.clone(),
        (None, Task::Nc) => split_members(g, Split::Test)
            .into_iter()
            .filter(|&id| g.label(id).is_some())
            .collect(),
        (None, Task::Lp) => g.pair_members(PairSplit::Test),
    };
    match plan.task {
        Task::Nc => {
            for &id in &ids {
                if !g.is_valid_node(id) {
                    return Err(EvalError::BadPlan(format!("trial node {id} out of range")));
                }
                if g.label(id).is_none() {
                    return Err(EvalError::BadPlan(format!(
                        "trial node {id} has no gold label"
                    )));
                }
            }
        }
        Task::Lp => {
            if !g.has_lp_pairs() {
                return Err(EvalError::BadPlan(
                    "link-prediction run needs pairs.jsonl in the dataset".into(),
                ));
            }
            for &idx in &ids {
                if idx >= g.lp_pairs().len() {
                    return Err(EvalError::BadPlan(format!("pair index {idx} out of range")));
                }
            }
        }
    }
    ids.sort_unstable();
    ids.dedup();
    if let Some(limit) = plan.limit {
        ids.truncate(limit);
    }
    Ok(ids)
}

fn execute_trial(
    renderer: &Renderer,
    gateway: &Gateway,
    plan: &RunPlan,
    spec: &TrialSpec,
) -> TrialResult {
    let g = renderer.graph();
    let (subject, gold) = match plan.task {
        Task::Nc => (
            Subject::Node(spec.subject_id),
            Prediction::Label(g.label(spec.subject_id).expect("trial nodes carry labels").to_string()),
        ),
        Task::Lp => {
            let p = g.lp_pairs()[spec.subject_id];
            (
                Subject::Pair { src: p.src, dst: p.dst },
                Prediction::Binary(p.connected as u8),
            )
        }
    };
    let mut result = TrialResult {
        trial_id: spec.trial_id(),
        code: spec.code.to_string(),
        subject,
        prompt_digest: String::new(),
        raw_text: String::new(),
        predicted: None,
        gold,
        correct: false,
        unparsed: false,
        error: None,
        latency_ms: 0,
    };

    let rendered = match plan.task {
        Task::Nc => renderer.render_nc(&spec.code, spec.subject_id, plan.seed, plan.cot, &plan.budgets),
        Task::Lp => {
            let p = g.lp_pairs()[spec.subject_id];
            renderer.render_lp(&spec.code, (p.src, p.dst), plan.seed, plan.cot, &plan.budgets)
        }
    };
    let bundle = match rendered {
        Ok(b) => b,
        Err(e) => {
            result.error = Some(format!("render: {e}"));
            return result;
        }
    };
    result.prompt_digest = bundle.audit.digest.clone();

    let started = Instant::now();
    let response = match gateway.complete(&bundle, g) {
        Ok(r) => r,
        Err(e) => {
            result.error = Some(format!("backend: {e}"));
            result.latency_ms = started.elapsed().as_millis() as u64;
            return result;
        }
    };
    result.latency_ms = response.latency.as_millis() as u64;
    result.raw_text = response.text;

    match extract_label(&result.raw_text, g.label_vocabulary(), plan.task) {
        Extraction::Label(l) => result.predicted = Some(Prediction::Label(l)),
        Extraction::Binary(b) => result.predicted = Some(Prediction::Binary(b)),
        Extraction::Unparsed => result.unparsed = true,
    }
    result.correct = result.predicted.as_ref() == Some(&result.gold);
    result
}

/// Read persisted trials, tolerating a torn tail from a killed run: any
/// unterminated final line (even one that happens to parse) is discarded
/// and the file truncated back to the last newline-terminated record, so
/// subsequent appends stay clean. A malformed record followed by more
/// content is real corruption and is reported, not repaired.
fn read_trials_repairing(path: &Path) -> Result<Vec<TrialResult>, EvalError> {
    let io_err = |source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut reader = BufReader::new(file);
    let mut results = Vec::new();
    let mut valid_bytes: u64 = 0;
    let mut truncate_tail = false;
    let mut line = String::new();
    let mut lineno = 0usize;
    loop {
        line.clear();
        let n = std::io::BufRead::read_line(&mut reader, &mut line).map_err(io_err)?;
        if n == 0 {
            break;
        }
        lineno += 1;
        if !line.ends_with('\n') {
            truncate_tail = true;
            break;
        }
        let trimmed = line.trim();
        if trimmed.is_empty() {
            valid_bytes += n as u64;
            continue;
        }
        match serde_json::from_str::<TrialResult>(trimmed) {
            Ok(t) => {
                results.push(t);
                valid_bytes += n as u64;
            }
            Err(e) => {
                // Terminated but unparseable: only acceptable as the very
                // last content in the file.
                let mut rest = String::new();
                std::io::Read::read_to_string(&mut reader, &mut rest).map_err(io_err)?;
                if rest.trim().is_empty() {
                    truncate_tail = true;
                    break;
                }
                return Err(EvalError::CorruptTrials {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: e.to_string(),
                });
            }
        }
    }
    if truncate_tail {
        let file = OpenOptions::new().write(true).open(path).map_err(io_err)?;
        file.set_len(valid_bytes).map_err(io_err)?;
    }
    Ok(results)
}

fn summarize_per_code(results: &[TrialResult]) -> BTreeMap<String, CodeStats> {
    let mut grouped: BTreeMap<String, Vec<&TrialResult>> = BTreeMap::new();
    for r in results {
        grouped.entry(r.code.clone()).or_default().push(r);
    }
    grouped
        .into_iter()
        .map(|(code, rs)| {
            let n = rs.len();
            let correct = rs.iter().filter(|r| r.correct).count();
            (
                code,
                CodeStats {
                    accuracy: 100.0 * correct as f64 / n as f64,
                    n,
                    unparsed: rs.iter().filter(|r| r.unparsed).count(),
                    errors: rs.iter().filter(|r| r.error.is_some()).count(),
                },
            )
        })
        .collect()
}

/// Best and second-best codes by accuracy; ties break toward the smaller
/// code string.
fn rank_codes(per_code: &BTreeMap<String, CodeStats>) -> (Option<String>, Option<String>) {
    let mut ranked: Vec<(&String, f64)> = per_code.iter().map(|(c, s)| (c, s.accuracy)).collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));
    let s1 = ranked.first().map(|(c, _)| (*c).clone());
    let s2 = ranked.get(1).map(|(c, _)| (*c).clone());
    (s1, s2)
}

/// Execute a plan against a dataset. Returns the summary, which is also
/// written to `output_dir/summary.json` alongside `trials.jsonl`.
pub fn run(g: &TextAttributedGraph, plan: &RunPlan, pack: TemplatePack) -> Result<RunSummary, EvalError> {
    run_with_options(g, plan, pack, RendererOptions::default())
}

pub fn run_with_options(
    g: &TextAttributedGraph,
    plan: &RunPlan,
    pack: TemplatePack,
    mut opts: RendererOptions,
) -> Result<RunSummary, EvalError> {
    if plan.codes.is_empty() {
        return Err(EvalError::BadPlan("codes must be non-empty".into()));
    }
    if plan.concurrency == 0 {
        return Err(EvalError::BadPlan("concurrency must be at least 1".into()));
    }
    if plan.task == Task::Lp {
        if let Some(primed) = plan.codes.iter().find(|c| c.is_primed()) {
            return Err(EvalError::BadPlan(format!(
                "primed code {primed} is invalid for link prediction"
            )));
        }
    }
    // Explicit trial ids are the caller's override of the test-split rule.
    opts.require_test_anchor = plan.trial_ids.is_none();
    let renderer = Renderer::with_pack(g, pack, opts);
    let gateway = Gateway::new(plan.backend.clone())?;

    let subjects = trial_subjects(g, plan)?;
    if subjects.is_empty() {
        return Err(EvalError::BadPlan("plan produced zero trials".into()));
    }
    let specs: Vec<TrialSpec> = plan
        .codes
        .iter()
        .flat_map(|&code| {
            subjects.iter().map(move |&subject_id| TrialSpec { code, subject_id })
        })
        .collect();

    fs::create_dir_all(&plan.output_dir).map_err(|source| EvalError::Io {
        path: plan.output_dir.clone(),
        source,
    })?;
    let trials_path = plan.output_dir.join("trials.jsonl");

    let mut existing: Vec<TrialResult> = Vec::new();
    if plan.resume && trials_path.exists() {
        existing = read_trials_repairing(&trials_path)?;
    } else if trials_path.exists() {
        return Err(EvalError::BadPlan(format!(
            "{} already exists; pass resume to continue it",
            trials_path.display()
        )));
    }
    let done: HashSet<String> = existing.iter().map(|t| t.trial_id.clone()).collect();
    let pending: Vec<&TrialSpec> = specs.iter().filter(|s| !done.contains(&s.trial_id())).collect();

    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&trials_path)
        .map_err(|source| EvalError::Io {
            path: trials_path.clone(),
            source,
        })?;

    let mut new_results: Vec<TrialResult> = Vec::with_capacity(pending.len());
    if !pending.is_empty() {
        let cursor = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel::<(usize, TrialResult)>();
        let workers = plan.concurrency.min(pending.len());
        std::thread::scope(|scope| -> Result<(), EvalError> {
            for _ in 0..workers {
                let tx = tx.clone();
                let cursor = &cursor;
                let pending = &pending;
                let renderer = &renderer;
                let gateway = &gateway;
                scope.spawn(move || loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    if i >= pending.len() {
                        break;
                    }
                    let result = execute_trial(renderer, gateway, plan, pending[i]);
                    if tx.send((i, result)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);

            // Ordered writer: buffer out-of-order arrivals, emit in plan
            // order so concurrency never changes the file.
            let mut buffer: BTreeMap<usize, TrialResult> = BTreeMap::new();
            let mut next = 0usize;
            for (i, result) in rx {
                buffer.insert(i, result);
                while let Some(result) = buffer.remove(&next) {
                    // One write per record keeps a killed run's tail to a
                    // single torn line.
                    let mut line = serde_json::to_string(&result).expect("trial serializes");
                    line.push('\n');
                    file.write_all(line.as_bytes()).map_err(|source| EvalError::Io {
                        path: trials_path.clone(),
                        source,
                    })?;
                    new_results.push(result);
                    next += 1;
                }
            }
            file.flush().map_err(|source| EvalError::Io {
                path: trials_path.clone(),
                source,
            })?;
            Ok(())
        })?;
    }

    let mut all = existing;
    all.extend(new_results);
    let per_code = summarize_per_code(&all);
    let (s1, s2) = rank_codes(&per_code);
    let summary = RunSummary {
        per_code,
        s1,
        s2,
        plan: plan.clone(),
        dataset_digest: g.digest(),
    };
    let summary_path = plan.output_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&summary_path, json).map_err(|source| EvalError::Io {
        path: summary_path,
        source,
    })?;
    Ok(summary)
}

/// One named baseline compared against the run's best code.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineComparison {
    pub name: String,
    pub accuracy: f64,
    /// Relative percent difference of the best code over this baseline.
    pub relative_improvement: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_code: BTreeMap<String, CodeStats>,
    pub s1: Option<String>,
    pub s2: Option<String>,
    pub best_accuracy: Option<f64>,
    pub baselines: Vec<BaselineComparison>,
    /// Per-code accuracy delta (percentage points) of a paired CoT run
    /// over this run; empty when no paired run was supplied.
    pub cot_delta_pp: BTreeMap<String, f64>,
}

/// Aggregate a run directory into a report. `cot_run_dir`, when given,
/// must hold a paired run of the same codes with CoT enabled; its
/// per-code deltas land in `cot_delta_pp`.
pub fn report(
    run_dir: &Path,
    baselines: &[(String, f64)],
    cot_run_dir: Option<&Path>,
) -> Result<EvalReport, EvalError> {
    let per_code = load_per_code(run_dir)?;
    let (s1, s2) = rank_codes(&per_code);
    let best_accuracy = s1.as_ref().map(|c| per_code[c].accuracy);

    let mut comparisons = Vec::new();
    if let Some(best) = best_accuracy {
        for (name, baseline_accuracy) in baselines {
            comparisons.push(BaselineComparison {
                name: name.clone(),
                accuracy: *baseline_accuracy,
                relative_improvement: relative_improvement(best, *baseline_accuracy)?,
            });
        }
    }

    let mut cot_delta_pp = BTreeMap::new();
    if let Some(cot_dir) = cot_run_dir {
        let cot_per_code = load_per_code(cot_dir)?;
        for (code, stats) in &per_code {
            if let Some(cot_stats) = cot_per_code.get(code) {
                cot_delta_pp.insert(code.clone(), cot_stats.accuracy - stats.accuracy);
            }
        }
    }

    Ok(EvalReport {
        per_code,
        s1,
        s2,
        best_accuracy,
        baselines: comparisons,
        cot_delta_pp,
    })
}

fn load_per_code(run_dir: &Path) -> Result<BTreeMap<String, CodeStats>, EvalError> {
    let trials_path = run_dir.join("trials.jsonl");
    if !trials_path.exists() {
        return Err(EvalError::MissingRun(run_dir.to_path_buf()));
    }
    let trials = read_trials_strict(&trials_path)?;
    Ok(summarize_per_code(&trials))
}

fn read_trials_strict(path: &Path) -> Result<Vec<TrialResult>, EvalError> {
    let file = File::open(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut results = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| EvalError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let t = serde_json::from_str(&line).map_err(|e| EvalError::CorruptTrials {
            path: path.to_path_buf(),
            line: lineno + 1,
            message: e.to_string(),
        })?;
        results.push(t);
    }
    Ok(results)
}

/// Human-readable report table.
pub fn render_report_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let has_cot = !report.cot_delta_pp.is_empty();
    out.push_str(&format!(
        "{:<8} {:>8} {:>6} {:>9} {:>7}{}\n",
        "code",
        "acc%",
        "n",
        "unparsed",
        "errors",
        if has_cot { "   cot_delta_pp" } else { "" }
    ));
    for (code, stats) in &report.per_code {
        out.push_str(&format!(
            "{:<8} {:>8.2} {:>6} {:>9} {:>7}",
            code, stats.accuracy, stats.n, stats.unparsed, stats.errors
        ));
        if has_cot {
            match report.cot_delta_pp.get(code) {
                Some(delta) => out.push_str(&format!("   {:+.2}", delta)),
                None => out.push_str("   -"),
            }
        }
        out.push('\n');
    }
    if let (Some(s1), Some(best)) = (&report.s1, report.best_accuracy) {
        out.push_str(&format!("S1: {s1} ({best:.2}%)\n"));
    }
    if let Some(s2) = &report.s2 {
        out.push_str(&format!("S2: {s2} ({:.2}%)\n", report.per_code[s2].accuracy));
    }
    for b in &report.baselines {
        out.push_str(&format!(
            "baseline {}: {:.2} ({})\n",
            b.name,
            b.accuracy,
            format_signed_percent(b.relative_improvement)
        ));
    }
    out
}

/// CSV form: one row per code.
pub fn render_report_csv(report: &EvalReport) -> String {
    let has_cot = !report.cot_delta_pp.is_empty();
    let mut out = String::from("code,accuracy,n,unparsed,errors");
    if has_cot {
        out.push_str(",cot_delta_pp");
    }
    out.push('\n');
    for (code, stats) in &report.per_code {
        out.push_str(&format!(
            "{},{:.4},{},{},{}",
            code, stats.accuracy, stats.n, stats.unparsed, stats.errors
        ));
        if has_cot {
            match report.cot_delta_pp.get(code) {
                Some(delta) => out.push_str(&format!(",{delta:.4}")),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}
