//! Benchmark harness for the sgmdp prover: budgeted runs over a task
//! corpus, pass@k tallies, proof-diversity counts and run comparisons.

pub mod compare;
pub mod config;
pub mod diversity;
pub mod report;
pub mod run;

pub use compare::{compare_runs, CompareError, Comparison, TaskDiff};
pub use config::{ConfigError, PolicySpec, RunConfig};
pub use diversity::{count_distinct_proofs, proofs_in_trace};
pub use report::{read_results, Aggregate, BenchReport, ReportError, TaskOutcome, TaskResult};
pub use run::{repetition_seed, run_benchmark, run_tasks, write_outputs, BenchError, RunOutput};
