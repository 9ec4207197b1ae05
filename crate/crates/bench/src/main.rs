use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sgmdp::policy::RemotePolicyConfig;
use sgmdp::prop::{generate_corpus, oracle_solve, read_corpus, write_corpus, DifficultyProfile, Task, MAX_ORACLE_DEPTH};
use sgmdp::search::UcbVariant;
use sgmdp_bench::{compare_runs, run_benchmark, BenchReport, PolicySpec, RunConfig, TaskOutcome};

#[derive(Parser)]
#[command(name = "sgmdp-bench", version, about = "Benchmark runner for the sgmdp prover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a corpus under a sample budget and write reports.
    Run(RunArgs),
    /// Compare two report.json files over the same corpus.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Print the comparison as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Generate an oracle-certified corpus.
    GenCorpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        min_depth: usize,
        #[arg(long, default_value_t = 5)]
        max_depth: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shortest have-free proof of a sequent or of every corpus task.
    Oracle {
        /// Sequent such as `h: A ∧ B ⊢ B ∧ A`.
        #[arg(long, conflicts_with = "corpus")]
        sequent: Option<String>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = MAX_ORACLE_DEPTH)]
        bound: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyKind {
    Enumeration,
    Stochastic,
    Remote,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ucb {
    ParentVisits,
    NodeVisits,
}

/// Flags override the config file, which overrides the defaults.
#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    sample_budget: Option<u64>,
    #[arg(long)]
    repetitions: Option<u32>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    policy: Option<PolicyKind>,
    /// Malformed-candidate rate of the stochastic policy.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Completion endpoint; repeat for an ensemble.
    #[arg(long)]
    endpoint: Vec<String>,
    /// Do not propose `have` conjectures (local policies).
    #[arg(long)]
    no_conjectures: bool,
    #[arg(long)]
    max_iterations: Option<u32>,
    #[arg(long)]
    max_expansion_trials: Option<u32>,
    #[arg(long)]
    max_children: Option<usize>,
    #[arg(long)]
    exploration_c: Option<f64>,
    #[arg(long, value_enum)]
    ucb: Option<Ucb>,
    #[arg(long)]
    lambda: Option<f64>,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.corpus {
            c.corpus = v;
        }
        if let Some(v) = self.out_dir {
            c.out_dir = v;
        }
        if let Some(v) = self.sample_budget {
            c.sample_budget = v;
        }
        if let Some(v) = self.repetitions {
            c.repetitions = v;
        }
        if self.workers.is_some() {
            c.workers = self.workers;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.max_iterations {
            c.search.max_iterations = v;
        }
        if let Some(v) = self.max_expansion_trials {
            c.search.max_expansion_trials = v;
        }
        if let Some(v) = self.max_children {
            c.search.max_children = v;
        }
        if let Some(v) = self.exploration_c {
            c.search.exploration_c = v;
        }
        if let Some(v) = self.ucb {
            c.search.ucb_variant = match v {
                Ucb::ParentVisits => UcbVariant::ParentVisits,
                Ucb::NodeVisits => UcbVariant::NodeVisits,
            };
        }
        if let Some(v) = self.lambda {
            c.search.reward.lambda = v;
        }
        let conjectures = !self.no_conjectures;
        let kind = self.policy.or(match (&c.policy, self.epsilon, self.endpoint.is_empty()) {
            (_, _, false) => Some(PolicyKind::Remote),
            (_, Some(_), _) => Some(PolicyKind::Stochastic),
            _ => None,
        });
        match kind {
            Some(PolicyKind::Enumeration) => c.policy = PolicySpec::Enumeration { conjectures },
            Some(PolicyKind::Stochastic) => {
                let epsilon = match (self.epsilon, &c.policy) {
                    (Some(e), _) => e,
                    (None, PolicySpec::Stochastic { epsilon, .. }) => *epsilon,
                    (None, _) => 0.1,
                };
                c.policy = PolicySpec::Stochastic { epsilon, conjectures };
            }
            Some(PolicyKind::Remote) => {
                if !self.endpoint.is_empty() {
                    c.policy = PolicySpec::Remote {
                        endpoints: self.endpoint.into_iter().map(RemotePolicyConfig::new).collect(),
                    };
                } else if !matches!(c.policy, PolicySpec::Remote { .. }) {
                    bail!("--policy remote needs --endpoint or endpoints in the config file");
                }
            }
            None if self.no_conjectures => match &mut c.policy {
                PolicySpec::Enumeration { conjectures } | PolicySpec::Stochastic { conjectures, .. } => *conjectures = false,
                PolicySpec::Remote { .. } => {}
            },
            None => {}
        }
        c.validate()?;
        Ok(c)
    }
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let config = args.resolve()?;
    let out = run_benchmark(&config).context("benchmark run failed")?;
    print!("{}", out.report.render_table());
    println!("wall time: {:.2}s, outputs in {}", out.wall_time_secs, config.out_dir.display());
    let all_errored =
        !out.report.tasks.is_empty() && out.report.tasks.iter().all(|t| t.outcome == TaskOutcome::Errored);
    Ok(if all_errored { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn oracle(sequent: Option<String>, corpus: Option<PathBuf>, bound: usize) -> Result<()> {
    let tasks = match (sequent, corpus) {
        (Some(s), _) => vec![Task::parse_sequent("sequent", &s)?],
        (None, Some(path)) => read_corpus(&path)?,
        (None, None) => bail!("give --sequent or --corpus"),
    };
    for t in &tasks {
        match oracle_solve(t, bound)? {
            Some(p) => {
                let text: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                println!("{}\t{}\t{}", t.id, p.len(), text.join("; "));
            }
            None => println!("{}\tunprovable within {bound}", t.id),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Compare { a, b, json } => (|| {
            let c = compare_runs(&BenchReport::load(&a)?, &BenchReport::load(&b)?)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&c)?);
            } else {
                print!("{}", c.render());
            }
            Ok(ExitCode::SUCCESS)
        })(),
        Command::GenCorpus { seed, count, min_depth, max_depth, out } => (|| {
            let tasks = generate_corpus(seed, count, DifficultyProfile::new(min_depth, max_depth)?);
            write_corpus(&out, &tasks)?;
            println!("wrote {} tasks to {}", tasks.len(), out.display());
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Oracle { sequent, corpus, bound } => oracle(sequent, corpus, bound).map(|_| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
