use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sgmdp::policy::{Policy, PolicyError};
use sgmdp::prop::{check_proof, read_corpus, CorpusError, PropEnv, Task};
use sgmdp::search::{search, trace_to_jsonl, SearchOutcome, TraceRecord};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::diversity::count_distinct_proofs;
use crate::report::{BenchReport, TaskOutcome, TaskResult};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("policy backend: {0}")]
    Backend(#[from] PolicyError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: BenchReport,
    /// `(file name, line-delimited trace)` per task and repetition.
    pub traces: Vec<(String, String)>,
    pub wall_time_secs: f64,
}

#[derive(Serialize, Deserialize)]
struct Timing {
    wall_time_secs: f64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Search seed for repetition `rep` of the task at `index`.
pub fn repetition_seed(global: u64, index: usize, rep: u32) -> u64 {
    splitmix(splitmix(splitmix(global) ^ index as u64) ^ u64::from(rep))
}

struct Repetition {
    outcome: TaskOutcome,
    iterations: u32,
    samples: u64,
    proof: Option<Vec<String>>,
    error: Option<String>,
    trace: Vec<TraceRecord>,
}

fn run_repetition(task: &Task, policy: &dyn Policy<PropEnv>, config: &RunConfig, seed: u64) -> Repetition {
    let env = PropEnv::default();
    let result = match search(&env, policy, task, config.search_config(seed)) {
        Ok(r) => r,
        Err(e) => {
            return Repetition {
                outcome: TaskOutcome::Errored,
                iterations: 0,
                samples: 0,
                proof: None,
                error: Some(e.to_string()),
                trace: Vec::new(),
            }
        }
    };
    let policy_errors: u64 = result.trace.iter().map(|r| u64::from(r.policy_errors)).sum();
    let (outcome, error) = if result.outcome == SearchOutcome::Proved {
        (TaskOutcome::Proved, None)
    } else if result.policy_samples_used > 0 && policy_errors == result.policy_samples_used {
        (TaskOutcome::Errored, Some("policy backend failed on every request".to_string()))
    } else {
        (TaskOutcome::BudgetExhausted, None)
    };
    Repetition {
        outcome,
        iterations: result.iterations_used,
        samples: result.policy_samples_used,
        proof: result.proof,
        error,
        trace: result.trace,
    }
}

fn run_task(task: &Task, index: usize, policy: &dyn Policy<PropEnv>, config: &RunConfig) -> (TaskResult, Vec<Vec<TraceRecord>>) {
    let reps: Vec<Repetition> = (0..config.repetitions)
        .map(|rep| run_repetition(task, policy, config, repetition_seed(config.seed, index, rep)))
        .collect();
    let shown = reps
        .iter()
        .position(|r| r.outcome == TaskOutcome::Proved)
        .unwrap_or_else(|| {
            // most samples, earliest on ties
            let most = reps.iter().map(|r| r.samples).max().unwrap_or(0);
            reps.iter().position(|r| r.samples == most).unwrap_or(0)
        });
    let outcome = if reps.iter().any(|r| r.outcome == TaskOutcome::Proved) {
        TaskOutcome::Proved
    } else if reps.iter().all(|r| r.outcome == TaskOutcome::Errored) {
        TaskOutcome::Errored
    } else {
        TaskOutcome::BudgetExhausted
    };
    let traces: Vec<Vec<TraceRecord>> = reps.iter().map(|r| r.trace.clone()).collect();
    let rep = &reps[shown];
    let result = TaskResult {
        task_id: task.id.clone(),
        outcome,
        iterations: rep.iterations,
        samples_used: rep.samples,
        proof_length: rep.proof.as_ref().map(Vec::len),
        distinct_correct_proofs: count_distinct_proofs(task, &traces),
        proof: rep.proof.clone(),
        error: if outcome == TaskOutcome::Errored { reps.iter().find_map(|r| r.error.clone()) } else { None },
    };
    (result, traces)
}

/// Demotes any proved record whose proof does not re-verify.
fn verification_gate(tasks: &[Task], results: &mut [TaskResult]) {
    for (task, r) in tasks.iter().zip(results.iter_mut()) {
        if r.outcome != TaskOutcome::Proved {
            continue;
        }
        let ok = r.proof.as_ref().is_some_and(|p| check_proof(task, p));
        if !ok {
            r.outcome = TaskOutcome::Errored;
            r.error = Some("proof failed verification".into());
        }
    }
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Runs every task of `tasks` and collects the report and traces.
pub fn run_tasks(config: &RunConfig, tasks: &[Task]) -> Result<RunOutput, BenchError> {
    config.validate()?;
    let policy = config.policy.build()?;
    let started = Instant::now();
    let workers = config
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let outputs: Vec<(TaskResult, Vec<Vec<TraceRecord>>)> = pool.install(|| {
        tasks
            .par_iter()
            .enumerate()
            .map(|(i, t)| run_task(t, i, policy.as_ref(), config))
            .collect()
    });
    let mut results = Vec::with_capacity(outputs.len());
    let mut traces = Vec::new();
    for (r, reps) in outputs {
        for (rep, trace) in reps.iter().enumerate() {
            traces.push((format!("{}.r{rep}.jsonl", file_stem(&r.task_id)), trace_to_jsonl(trace)));
        }
        results.push(r);
    }
    verification_gate(tasks, &mut results);
    Ok(RunOutput {
        report: BenchReport::new(config.sample_budget, config.repetitions, results),
        traces,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

fn write(path: &Path, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(|source| BenchError::Io { path: path.display().to_string(), source })
}

/// Writes `report.json`, `report.txt`, `timing.json` and `traces/` under
/// `dir`.
pub fn write_outputs(output: &RunOutput, dir: &Path) -> Result<(), BenchError> {
    let trace_dir = dir.join("traces");
    fs::create_dir_all(&trace_dir).map_err(|source| BenchError::Io { path: trace_dir.display().to_string(), source })?;
    write(&dir.join("report.json"), &output.report.to_json())?;
    write(&dir.join("report.txt"), &output.report.render_table())?;
    let timing = serde_json::to_string_pretty(&Timing { wall_time_secs: output.wall_time_secs }).expect("timing serializes");
    write(&dir.join("timing.json"), &(timing + "\n"))?;
    for (name, text) in &output.traces {
        write(&trace_dir.join(name), text)?;
    }
    Ok(())
}

/// Reads the corpus, runs it and writes all outputs to `config.out_dir`.
pub fn run_benchmark(config: &RunConfig) -> Result<RunOutput, BenchError> {
    config.validate()?;
    let tasks = read_corpus(&config.corpus)?;
    let output = run_tasks(config, &tasks)?;
    write_outputs(&output, &config.out_dir)?;
    Ok(output)
}
