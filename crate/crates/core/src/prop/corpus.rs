//! Random task corpora and the line-delimited task file format.
//!
//! One JSON record per line:
//!
//! ```text
//! {"id":"t7-0000","hypotheses":["h: (A ∧ B)"],"target":"(B ∧ A)","oracle_depth":4}
//! ```

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::env::{parse_hypothesis, Task};
use super::formula::{parse_formula, Atom, Formula};
use super::oracle::{oracle_solve, MAX_ORACLE_DEPTH};
use super::state::Hypothesis;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("invalid difficulty profile: {0}")]
    Profile(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub id: String,
    pub hypotheses: Vec<String>,
    pub target: String,
    pub oracle_depth: Option<u32>,
}

impl From<&Task> for TaskRecord {
    fn from(task: &Task) -> Self {
        TaskRecord {
            id: task.id.clone(),
            hypotheses: task.hypotheses.iter().map(|h| h.to_string()).collect(),
            target: task.target.to_string(),
            oracle_depth: task.oracle_depth,
        }
    }
}

impl TryFrom<&TaskRecord> for Task {
    type Error = String;

    fn try_from(rec: &TaskRecord) -> Result<Self, Self::Error> {
        let hypotheses = rec
            .hypotheses
            .iter()
            .map(|h| parse_hypothesis(h).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let target = parse_formula(&rec.target).map_err(|e| format!("target: {e}"))?;
        let task = Task {
            id: rec.id.clone(),
            hypotheses,
            target,
            oracle_depth: rec.oracle_depth,
        };
        task.validate().map_err(|e| e.to_string())?;
        Ok(task)
    }
}

pub fn parse_corpus(text: &str) -> Result<Vec<Task>, CorpusError> {
    let mut tasks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| CorpusError::Record { line: i + 1, message };
        let rec: TaskRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        tasks.push(Task::try_from(&rec).map_err(err)?);
    }
    Ok(tasks)
}

pub fn read_corpus(path: &Path) -> Result<Vec<Task>, CorpusError> {
    let file = fs::File::open(path)?;
    let mut text = String::new();
    for line in io::BufReader::new(file).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    parse_corpus(&text)
}

pub fn write_corpus(path: &Path, tasks: &[Task]) -> Result<(), CorpusError> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    for task in tasks {
        let line = serde_json::to_string(&TaskRecord::from(task)).expect("records serialize");
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Inclusive range of shortest-proof lengths to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultyProfile {
    pub min_depth: usize,
    pub max_depth: usize,
}

impl DifficultyProfile {
    pub fn new(min_depth: usize, max_depth: usize) -> Result<Self, CorpusError> {
        if min_depth == 0 || min_depth > max_depth || max_depth > MAX_ORACLE_DEPTH {
            return Err(CorpusError::Profile(format!(
                "need 1 <= min <= max <= {MAX_ORACLE_DEPTH}, got {min_depth}..={max_depth}"
            )));
        }
        Ok(DifficultyProfile { min_depth, max_depth })
    }
}

/// Candidate tasks drawn per requested depth before settling for any
/// provable task inside the profile.
const ATTEMPTS_PER_TASK: usize = 4000;
const ATOMS_IN_PLAY: u8 = 5;
const MAX_FORMULA_DEPTH: usize = 3;

fn random_atom(rng: &mut ChaCha8Rng) -> Formula {
    Formula::Atom(Atom::new(rng.gen_range(0..ATOMS_IN_PLAY)).unwrap())
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_atom(rng);
    }
    let l = random_formula(rng, depth - 1);
    let r = random_formula(rng, depth - 1);
    match rng.gen_range(0..3) {
        0 => Formula::and(l, r),
        1 => Formula::or(l, r),
        _ => Formula::implies(l, r),
    }
}

/// A hypothesis that tends to be useful for `target`: one of its parts,
/// an implication into it or one of its parts, or noise.
fn random_hypothesis(rng: &mut ChaCha8Rng, target: &Formula) -> Formula {
    let parts = target.subformulas();
    let part = (*parts.choose(rng).unwrap()).clone();
    match rng.gen_range(0..6) {
        0 | 1 => part,
        2 => Formula::implies(random_formula(rng, 1), part),
        3 => Formula::and(part, random_formula(rng, 1)),
        4 => Formula::or(part.clone(), part),
        _ => random_formula(rng, 2),
    }
}

fn random_task(rng: &mut ChaCha8Rng, id: String) -> Task {
    let depth = rng.gen_range(1..=MAX_FORMULA_DEPTH);
    let target = random_formula(rng, depth);
    let n = rng.gen_range(0..=3);
    let hypotheses = (0..n)
        .map(|i| Hypothesis::new(format!("h{i}"), random_hypothesis(rng, &target)))
        .collect();
    Task::new(id, hypotheses, target)
}

/// Sample `count` oracle-certified tasks, cycling through the profile's
/// depths so the corpus is stratified by shortest-proof length. Each task's
/// `oracle_depth` is its certified shortest-proof length. Deterministic
/// per seed.
pub fn generate_corpus(
    seed: u64,
    count: usize,
    profile: DifficultyProfile,
) -> Vec<Task> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = profile.max_depth - profile.min_depth + 1;
    let mut tasks = Vec::with_capacity(count);
    let mut fallback: Option<Task> = None;
    for i in 0..count {
        let want = profile.min_depth + i % span;
        let id = format!("t{seed}-{i:04}");
        let mut chosen = None;
        for _ in 0..ATTEMPTS_PER_TASK {
            let mut task = random_task(&mut rng, id.clone());
            if tasks.iter().any(|t: &Task| t.hypotheses == task.hypotheses && t.target == task.target) {
                continue;
            }
            let Ok(Some(proof)) = oracle_solve(&task, profile.max_depth) else {
                continue;
            };
            if proof.len() < profile.min_depth {
                continue;
            }
            task.oracle_depth = Some(proof.len() as u32);
            if proof.len() == want {
                chosen = Some(task);
                break;
            }
            fallback = Some(task);
        }
        let task = chosen.or_else(|| fallback.take()).map(|mut t| {
            t.id = id;
            t
        });
        if let Some(task) = task {
            tasks.push(task);
        }
    }
    tasks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trip() {
        let task = Task::parse_sequent("x", "h: A ∧ B ⊢ B ∧ A").unwrap();
        let text = serde_json::to_string(&TaskRecord::from(&task)).unwrap();
        assert_eq!(
            text,
            r#"{"id":"x","hypotheses":["h: (A ∧ B)"],"target":"(B ∧ A)","oracle_depth":null}"#
        );
        assert_eq!(parse_corpus(&text).unwrap(), vec![task]);
    }

    #[test]
    fn bad_records_report_line() {
        let text = "\n{\"id\":\"a\",\"hypotheses\":[],\"target\":\"(A\",\"oracle_depth\":1}\n";
        match parse_corpus(text) {
            Err(CorpusError::Record { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_corpus() {
        assert!(generate_corpus(7, 0, DifficultyProfile::new(1, 6).unwrap()).is_empty());
    }

    #[test]
    fn profile_validation() {
        assert!(DifficultyProfile::new(0, 3).is_err());
        assert!(DifficultyProfile::new(4, 3).is_err());
        assert!(DifficultyProfile::new(1, 9).is_err());
    }
}
