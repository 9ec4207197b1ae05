use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{BenchReport, TaskOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("reports cover different corpora (first difference at position {position})")]
    CorpusMismatch { position: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDiff {
    pub task_id: String,
    pub a: TaskOutcome,
    pub b: TaskOutcome,
}

/// Differences between two reports over the same corpus, `b` relative to `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub pass_at_k_a: String,
    pub pass_at_k_b: String,
    pub solved_delta: i64,
    pub errored_delta: i64,
    pub solved_only_by_a: Vec<String>,
    pub solved_only_by_b: Vec<String>,
    /// Tasks whose outcome differs.
    pub changed: Vec<TaskDiff>,
}

impl Comparison {
    /// Signed solved delta, e.g. `+8`.
    pub fn delta_string(&self) -> String {
        format!("{:+}", self.solved_delta)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} -> {} ({})\n", self.pass_at_k_a, self.pass_at_k_b, self.delta_string());
        for id in &self.solved_only_by_a {
            out.push_str(&format!("  only a: {id}\n"));
        }
        for id in &self.solved_only_by_b {
            out.push_str(&format!("  only b: {id}\n"));
        }
        out
    }
}

pub fn compare_runs(a: &BenchReport, b: &BenchReport) -> Result<Comparison, CompareError> {
    if a.tasks.len() != b.tasks.len() {
        return Err(CompareError::CorpusMismatch { position: a.tasks.len().min(b.tasks.len()) });
    }
    if let Some(position) = a.tasks.iter().zip(&b.tasks).position(|(x, y)| x.task_id != y.task_id) {
        return Err(CompareError::CorpusMismatch { position });
    }
    let mut out = Comparison {
        pass_at_k_a: a.aggregate.pass_at_k.clone(),
        pass_at_k_b: b.aggregate.pass_at_k.clone(),
        solved_delta: b.aggregate.solved_count as i64 - a.aggregate.solved_count as i64,
        errored_delta: b.aggregate.errored_count as i64 - a.aggregate.errored_count as i64,
        solved_only_by_a: Vec::new(),
        solved_only_by_b: Vec::new(),
        changed: Vec::new(),
    };
    for (x, y) in a.tasks.iter().zip(&b.tasks) {
        if x.outcome == y.outcome {
            continue;
        }
        match (x.outcome, y.outcome) {
            (TaskOutcome::Proved, _) => out.solved_only_by_a.push(x.task_id.clone()),
            (_, TaskOutcome::Proved) => out.solved_only_by_b.push(x.task_id.clone()),
            _ => {}
        }
        out.changed.push(TaskDiff { task_id: x.task_id.clone(), a: x.outcome, b: y.outcome });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::TaskResult;

    fn report(outcomes: &[(&str, TaskOutcome)]) -> BenchReport {
        let tasks = outcomes
            .iter()
            .map(|(id, o)| TaskResult {
                task_id: id.to_string(),
                outcome: *o,
                iterations: 0,
                samples_used: 0,
                proof_length: None,
                distinct_correct_proofs: 0,
                proof: None,
                error: None,
            })
            .collect();
        BenchReport::new(1, 1, tasks)
    }

    #[test]
    fn identical_reports_have_no_delta() {
        let r = report(&[("a", TaskOutcome::Proved), ("b", TaskOutcome::BudgetExhausted)]);
        let c = compare_runs(&r, &r).unwrap();
        assert_eq!((c.solved_delta, c.changed.len()), (0, 0));
        assert_eq!(c.delta_string(), "+0");
    }

    #[test]
    fn one_sided_solves_are_listed() {
        let a = report(&[("a", TaskOutcome::Proved), ("b", TaskOutcome::BudgetExhausted), ("c", TaskOutcome::Errored)]);
        let b = report(&[("a", TaskOutcome::BudgetExhausted), ("b", TaskOutcome::Proved), ("c", TaskOutcome::Proved)]);
        let c = compare_runs(&a, &b).unwrap();
        assert_eq!(c.delta_string(), "+1");
        assert_eq!(c.solved_only_by_a, ["a"]);
        assert_eq!(c.solved_only_by_b, ["b", "c"]);
        assert_eq!(c.errored_delta, -1);
    }

    #[test]
    fn different_corpora_are_rejected() {
        let a = report(&[("a", TaskOutcome::Proved)]);
        let b = report(&[("z", TaskOutcome::Proved)]);
        assert_eq!(compare_runs(&a, &b), Err(CompareError::CorpusMismatch { position: 0 }));
        let c = report(&[("a", TaskOutcome::Proved), ("b", TaskOutcome::Proved)]);
        assert!(compare_runs(&a, &c).is_err());
    }
}
