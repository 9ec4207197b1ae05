use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {source}")]
    Record { line: usize, source: serde_json::Error },
    #[error("bad report: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskOutcome {
    Proved,
    BudgetExhausted,
    Errored,
}

/// Result for one task across all of its repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub task_id: String,
    pub outcome: TaskOutcome,
    /// Iterations of the reported repetition: the first that proved the
    /// task, otherwise the one that drew the most samples.
    pub iterations: u32,
    pub samples_used: u64,
    pub proof_length: Option<usize>,
    pub distinct_correct_proofs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregate {
    pub solved_count: usize,
    pub total_count: usize,
    pub errored_count: usize,
    /// `solved/total`.
    pub pass_at_k: String,
}

impl Aggregate {
    pub fn of(tasks: &[TaskResult]) -> Self {
        let solved_count = tasks.iter().filter(|t| t.outcome == TaskOutcome::Proved).count();
        let errored_count = tasks.iter().filter(|t| t.outcome == TaskOutcome::Errored).count();
        Aggregate {
            solved_count,
            total_count: tasks.len(),
            errored_count,
            pass_at_k: format!("{solved_count}/{}", tasks.len()),
        }
    }
}

/// Deterministic part of a benchmark run. Wall-clock time is kept apart in
/// [`crate::run::RunOutput`] so identical runs give identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub sample_budget: u64,
    pub repetitions: u32,
    pub tasks: Vec<TaskResult>,
    pub aggregate: Aggregate,
}

impl BenchReport {
    pub fn new(sample_budget: u64, repetitions: u32, tasks: Vec<TaskResult>) -> Self {
        let aggregate = Aggregate::of(&tasks);
        BenchReport { sample_budget, repetitions, tasks, aggregate }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ReportError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Fixed-width table of per-task results with a tally line.
    pub fn render_table(&self) -> String {
        let width = self.tasks.iter().map(|t| t.task_id.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:<15}  {:>6}  {:>7}  {:>5}  {:>8}", "task", "outcome", "iters", "samples", "len", "distinct");
        for t in &self.tasks {
            let len = t.proof_length.map_or("-".to_string(), |l| l.to_string());
            let _ = writeln!(
                out,
                "{:<width$}  {:<15}  {:>6}  {:>7}  {:>5}  {:>8}",
                t.task_id,
                format!("{:?}", t.outcome),
                t.iterations,
                t.samples_used,
                len,
                t.distinct_correct_proofs
            );
        }
        let _ = writeln!(out, "pass@{}: {}", self.sample_budget, self.aggregate.pass_at_k);
        out
    }
}

/// Reads a line-delimited log of [`TaskResult`] records.
pub fn read_results(text: &str) -> Result<Vec<TaskResult>, ReportError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| ReportError::Record { line: i + 1, source }))
        .collect()
}
