//! Acceptance suite. Every criterion runs, prints one PASS/FAIL line, and
//! the test fails if any criterion does.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sgmdp::mdp::{step, Environment, GoalStack, RewardSpec, TransitionCase};
use sgmdp::policy::{EnumerationPolicy, Policy, StochasticPolicy};
use sgmdp::prop::{
    applicable_tactics, check_proof, conjecture_tactics, generate_corpus, oracle_solve, write_corpus,
    DifficultyProfile, Goal, ProofState, PropEnv, Task, TaskRecord,
};
use sgmdp::search::{
    replay_trace, search, ucb_score, NodeStatus, Search, SearchConfig, SearchOutcome, TraceRecord, UcbVariant,
};
use sgmdp_bench::{
    compare_runs, count_distinct_proofs, read_results, run_benchmark, BenchReport, PolicySpec, RunConfig,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let took = started.elapsed();
    if took > limit {
        Err(format!("took {took:.1?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Transition-table conformance

/// What the case table prescribes for a triple, decided from the tactic
/// semantics on the active sequent rather than from the MDP code.
fn table_case(env: &PropEnv, state: &ProofState, goals: &GoalStack<Goal>, action: &str, kind: Kind) -> TransitionCase {
    match kind {
        Kind::Junk => TransitionCase::NoOp,
        Kind::Conjecture => TransitionCase::GoalPushed,
        Kind::Tactic(t) => {
            let top = goals.top().unwrap();
            let (seq, pending) = env.active_sequent(state, top).unwrap();
            let rest = seq.refine(&t).unwrap_or_else(|e| panic!("{action}: {e}"));
            let frame_len = if pending { 1 } else { state.frames().last().unwrap().sequents.len() };
            if rest.is_empty() && frame_len == 1 {
                TransitionCase::GoalSolved
            } else {
                TransitionCase::Progressed
            }
        }
    }
}

#[derive(Clone)]
enum Kind {
    Junk,
    Conjecture,
    Tactic(sgmdp::prop::Tactic),
}

fn triples_for(env: &PropEnv, state: &ProofState, goals: &GoalStack<Goal>) -> Vec<(String, Kind)> {
    let top = goals.top().unwrap();
    let (seq, pending) = env.active_sequent(state, top).unwrap();
    let mut out: Vec<(String, Kind)> = applicable_tactics(&seq)
        .into_iter()
        .map(|t| (t.to_string(), Kind::Tactic(t)))
        .collect();
    if !pending {
        out.extend(conjecture_tactics(&seq).into_iter().map(|t| (t.to_string(), Kind::Conjecture)));
    }
    for junk in ["", "sorry", "exact nope", "intro", "apply ?", "have c : (A ∧"] {
        out.push((junk.to_string(), Kind::Junk));
    }
    if let Some(h) = seq.context.first() {
        out.push((format!("have {} : A", h.label), Kind::Junk));
    }
    out
}

fn transition_table() -> Outcome {
    let started = Instant::now();
    let env = PropEnv::default();
    let tasks = [
        "h: A ⊢ A",
        "⊢ A → A",
        "h: A ∧ B ⊢ B ∧ A",
        "h: A ∨ B ⊢ B ∨ A",
        "f: A → B, a: A ⊢ B",
        "h: A, k: B ⊢ A ∧ B",
        "g: A → B, k: B → C, a: A ⊢ C",
        "d: A ∨ B, f: A → C, g: B → C ⊢ C",
        "h: A ∧ B ⊢ (A ∨ C) ∧ B",
        "⊢ A → (B → (A ∧ B))",
        "h: (A ∧ B) ∧ C ⊢ A ∧ (B ∧ C)",
        "f: A → B, g: A → C, a: A ⊢ B ∧ C",
    ];
    let mut counts = [0usize; 4];
    let mut total = 0;
    for text in tasks {
        let task = Task::parse_sequent("t", text).unwrap();
        let (s0, root) = env.initial(&task).unwrap();
        // states along the oracle proof, plus each with a conjecture pushed
        let mut states = vec![(s0, GoalStack::new(root))];
        let proof = oracle_solve(&task, 8).unwrap().expect(text);
        for t in &proof {
            let (s, g) = states.last().unwrap().clone();
            let out = step(&env, &s, &g, &t.to_string()).unwrap();
            if !out.next_goals.is_empty() {
                states.push((out.next_state, out.next_goals));
            }
        }
        let mut with_pushed = Vec::new();
        for (s, g) in &states {
            let top = g.top().unwrap();
            let (seq, _) = env.active_sequent(s, top).unwrap();
            for have in conjecture_tactics(&seq) {
                let out = step(&env, s, g, &have.to_string()).unwrap();
                with_pushed.push((out.next_state, out.next_goals));
            }
        }
        states.extend(with_pushed);
        for (state, goals) in &states {
            for (action, kind) in triples_for(&env, state, goals) {
                let want = table_case(&env, state, goals, &action, kind);
                let got = step(&env, state, goals, &action).map_err(|e| format!("{text} / {action}: {e}"))?;
                let delta = got.next_goals.len() as isize - goals.len() as isize;
                let state_changed = got.next_state != *state;
                let expect_change = matches!(want, TransitionCase::Progressed | TransitionCase::GoalSolved);
                let stack_ok = match want {
                    TransitionCase::GoalPushed => got.next_goals.top() == env.to_goal(&action).as_ref(),
                    TransitionCase::GoalSolved => got.next_goals == goals.remove_last(),
                    _ => got.next_goals == *goals,
                };
                if got.case != want || delta != want.stack_delta() || state_changed != expect_change || !stack_ok {
                    return Err(format!("{text} / {action:?}: got {:?}, table says {want:?}", got.case));
                }
                counts[want as usize] += 1;
                total += 1;
            }
        }
    }
    within(Duration::from_secs(5), started)?;
    if total < 200 || counts.contains(&0) {
        return Err(format!("{total} triples, per case {counts:?}"));
    }
    Ok(format!(
        "{total} triples match (NoOp {}, GoalPushed {}, GoalSolved {}, Progressed {})",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

// ---------------------------------------------------------------------------
// Oracle equivalence

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let corpus = generate_corpus(2024, 100, DifficultyProfile::new(1, 5).unwrap());
    if corpus.len() != 100 || corpus.iter().any(|t| !matches!(t.oracle_depth, Some(1..=5))) {
        return Err(format!("corpus has {} certified tasks", corpus.len()));
    }
    let env = PropEnv::default();
    let config = SearchConfig {
        max_iterations: 512,
        max_expansion_trials: 10,
        max_children: 10,
        ..Default::default()
    };
    let mut solved = 0;
    for task in &corpus {
        let r = search(&env, &EnumerationPolicy::default(), task, config).map_err(|e| e.to_string())?;
        if let Some(proof) = &r.proof {
            if !check_proof(task, proof) {
                return Err(format!("{}: returned proof {proof:?} fails the checker", task.id));
            }
            solved += 1;
        }
    }
    within(Duration::from_secs(120), started)?;
    let msg = format!("{solved}/100 solved, all proofs verified");
    if solved >= 95 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------------------
// Subgoal-shaping benefit

/// Tasks `h: X → (Y → Z), x, y, distractors ⊢ Z` where X and Y are atoms
/// or disjunctions with one disjunct in context. Proved in short segments
/// with `have c : Y → Z`.
fn shaping_family() -> Vec<(Task, Vec<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < 20 {
        let mut atoms: Vec<char> = ('A'..='Z').collect();
        atoms.shuffle(&mut rng);
        let z = atoms.pop().unwrap();
        let mut hyps = Vec::new();
        let mut side = |rng: &mut ChaCha8Rng, atoms: &mut Vec<char>, label: &str| -> (String, Vec<String>) {
            let a = atoms.pop().unwrap();
            hyps.push(format!("{label}: {a}"));
            match rng.gen_range(0..3) {
                0 => (a.to_string(), vec![format!("exact {label}")]),
                1 => {
                    let b = atoms.pop().unwrap();
                    (format!("({a} ∨ {b})"), vec!["left".into(), format!("exact {label}")])
                }
                _ => {
                    let b = atoms.pop().unwrap();
                    (format!("({b} ∨ {a})"), vec!["right".into(), format!("exact {label}")])
                }
            }
        };
        let (x, px) = side(&mut rng, &mut atoms, "x");
        let (y, py) = side(&mut rng, &mut atoms, "y");
        let mut all = vec![format!("h: {x} → ({y} → {z})")];
        all.extend(hyps);
        for k in 0..rng.gen_range(0..=3) {
            let (p, q) = (atoms.pop().unwrap(), atoms.pop().unwrap());
            let f = match rng.gen_range(0..4) {
                0 => format!("({p} ∨ {q})"),
                1 => format!("({p} → {q})"),
                2 => format!("({p} ∧ {q})"),
                _ => p.to_string(),
            };
            all.push(format!("d{k}: {f}"));
        }
        let task = Task::parse_sequent(format!("shape-{i:02}"), &format!("{} ⊢ {z}", all.join(", "))).unwrap();
        i += 1;
        let mut proof = vec![format!("have c : {y} → {z}"), "apply h".to_string()];
        proof.extend(px);
        proof.push("apply c".into());
        proof.extend(py);
        out.push((task, proof));
    }
    out
}

fn median(mut xs: Vec<u64>) -> f64 {
    xs.sort_unstable();
    let n = xs.len();
    (xs[(n - 1) / 2] + xs[n / 2]) as f64 / 2.0
}

fn shaping_benefit() -> Outcome {
    let started = Instant::now();
    let env = PropEnv::default();
    let policy = StochasticPolicy::with_epsilon(0.1);
    let budget = 2000u64;
    let mut wins = 0;
    for (task, proof) in shaping_family() {
        if oracle_solve(&task, 5).map_err(|e| e.to_string())?.is_some() {
            return Err(format!("{task}: has a have-free proof of depth <= 5"));
        }
        if !check_proof(&task, &proof) {
            return Err(format!("{task}: conjecture proof {proof:?} rejected"));
        }
        // conjecture segment, then the main goal from `apply c` on
        let main = proof.iter().position(|a| a == "apply c").unwrap();
        let segments_ok = main - 1 <= 3 && proof.len() - main <= 3;
        if !segments_ok {
            return Err(format!("{task}: proof segments exceed 3 steps"));
        }
        let samples = |lambda: f64| -> Result<Vec<u64>, String> {
            (0..20u64)
                .map(|seed| {
                    let config = SearchConfig {
                        seed,
                        sample_budget: Some(budget),
                        reward: RewardSpec { lambda, ..Default::default() },
                        ..Default::default()
                    };
                    let r = search(&env, &policy, &task, config).map_err(|e| e.to_string())?;
                    // unsolved runs rank above every solved one
                    Ok(if r.outcome == SearchOutcome::Proved { r.policy_samples_used } else { budget + 1 })
                })
                .collect()
        };
        if median(samples(0.5)?) <= median(samples(0.0)?) {
            wins += 1;
        }
    }
    within(Duration::from_secs(600), started)?;
    let msg = format!("lambda=0.5 median samples <= lambda=0 on {wins}/20 tasks (need 12)");
    if wins >= 12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------------------
// MCTS bookkeeping

fn random_task(rng: &mut ChaCha8Rng) -> Task {
    let corpus_like = ["A", "B", "(A ∧ B)", "(A ∨ B)", "(A → B)", "(B → A)", "(A → (B → C))", "(C ∨ A)", "¬A"];
    let pick = |rng: &mut ChaCha8Rng| corpus_like.choose(rng).unwrap().to_string();
    let n = rng.gen_range(0..=3);
    let hyps: Vec<String> = (0..n).map(|i| format!("h{i}: {}", pick(rng))).collect();
    let target = format!("({} {} {})", pick(rng), ["∧", "∨", "→"].choose(rng).unwrap(), pick(rng));
    Task::parse_sequent("fuzz", &format!("{} ⊢ {target}", hyps.join(", "))).unwrap()
}

fn bookkeeping() -> Outcome {
    let env = PropEnv::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let (mut iterations, mut runs) = (0u32, 0);
    while iterations < 1000 {
        let task = random_task(&mut rng);
        let config = SearchConfig {
            exploration_c: rng.gen_range(0.0..2.0),
            max_expansion_trials: rng.gen_range(1..=5),
            max_children: rng.gen_range(1..=4),
            max_iterations: rng.gen_range(5..=80),
            ucb_variant: if rng.gen_bool(0.5) { UcbVariant::ParentVisits } else { UcbVariant::NodeVisits },
            seed: rng.gen(),
            sample_budget: rng.gen_bool(0.5).then(|| rng.gen_range(1..=150)),
            ..Default::default()
        };
        let policy: Box<dyn Policy<PropEnv>> = if rng.gen_bool(0.3) {
            Box::new(EnumerationPolicy::default())
        } else {
            Box::new(StochasticPolicy::with_epsilon(rng.gen_range(0.0..0.5)))
        };
        let result = Search::new(&env, policy.as_ref(), &task, config).map_err(|e| e.to_string())?.run();
        let replay = replay_trace(&result.trace, &config, NodeStatus::Open).map_err(|v| format!("{task}: {v}"))?;
        if replay.samples != result.policy_samples_used || replay.nodes.len() != result.nodes_created {
            return Err(format!("{task}: replay totals disagree with the result"));
        }
        iterations += result.iterations_used;
        runs += 1;
    }
    Ok(format!("{iterations} fuzzed iterations over {runs} searches, zero violations"))
}

// ---------------------------------------------------------------------------
// UCB values

fn ucb_values() -> Outcome {
    let pv = ucb_score(0.5, 2, 10, 1.0, UcbVariant::ParentVisits).map_err(|e| e.to_string())?;
    let lit = ucb_score(0.5, 4, 77, 1.0, UcbVariant::NodeVisits).map_err(|e| e.to_string())?;
    if (pv - 1.5729).abs() <= 1e-4 && (lit - 1.0887).abs() <= 1e-4 {
        Ok(format!("ParentVisits {pv:.4}, NodeVisits {lit:.4}"))
    } else {
        Err(format!("ParentVisits {pv}, NodeVisits {lit}"))
    }
}

// ---------------------------------------------------------------------------
// Determinism

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for name in ["report.json", "report.txt"] {
        files.push((name.to_string(), std::fs::read(dir.join(name)).unwrap()));
    }
    let mut traces: Vec<_> = std::fs::read_dir(dir.join("traces")).unwrap().map(|e| e.unwrap().path()).collect();
    traces.sort();
    for p in traces {
        files.push((p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()));
    }
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = tmp.path().join("corpus.jsonl");
    write_corpus(&corpus, &generate_corpus(31, 12, DifficultyProfile::new(1, 4).unwrap())).map_err(|e| e.to_string())?;
    let config = |out: &str| RunConfig {
        corpus: corpus.clone(),
        policy: PolicySpec::Stochastic { epsilon: 0.2, conjectures: true },
        sample_budget: 200,
        repetitions: 2,
        workers: Some(2),
        out_dir: tmp.path().join(out),
        seed: 17,
        ..Default::default()
    };
    run_benchmark(&config("a")).map_err(|e| e.to_string())?;
    run_benchmark(&config("b")).map_err(|e| e.to_string())?;
    let (a, b) = (read_tree(&tmp.path().join("a")), read_tree(&tmp.path().join("b")));
    if a != b {
        return Err("outputs differ between identical runs".into());
    }
    Ok(format!("{} files byte-identical across two runs", a.len()))
}

// ---------------------------------------------------------------------------
// Report fixtures

fn load_results(name: &str) -> Result<BenchReport, String> {
    let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
    Ok(BenchReport::new(512, 1, read_results(&text).map_err(|e| e.to_string())?))
}

fn report_fixtures() -> Outcome {
    let table1 = load_results("tally_results.jsonl")?;
    let without = load_results("compare_before.jsonl")?;
    let with = load_results("compare_after.jsonl")?;
    let cmp = compare_runs(&without, &with).map_err(|e| e.to_string())?;
    let got = (
        table1.aggregate.pass_at_k.as_str(),
        without.aggregate.pass_at_k.as_str(),
        with.aggregate.pass_at_k.as_str(),
        cmp.delta_string(),
    );
    if got == ("26/658", "15/658", "23/658", "+8".to_string()) {
        Ok(format!("tally {}, comparison {} -> {} ({})", got.0, got.1, got.2, got.3))
    } else {
        Err(format!("{got:?}"))
    }
}

// ---------------------------------------------------------------------------
// Proof diversity

#[derive(Deserialize)]
struct DiversityFixture {
    task: TaskRecord,
    runs: Vec<Vec<TraceRecord>>,
}

fn diversity_count(name: &str) -> Result<usize, String> {
    let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
    let f: DiversityFixture = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let task = Task::try_from(&f.task).map_err(|e| e.to_string())?;
    Ok(count_distinct_proofs(&task, &f.runs))
}

fn diversity() -> Outcome {
    let got = [
        diversity_count("diversity_identical.json")?,
        diversity_count("diversity_relabelled.json")?,
        diversity_count("diversity_105.json")?,
    ];
    if got == [1, 2, 105] {
        Ok(format!("counts {got:?}"))
    } else {
        Err(format!("counts {got:?}, want [1, 2, 105]"))
    }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("transition-table conformance", transition_table),
        ("oracle equivalence", oracle_equivalence),
        ("subgoal-shaping benefit", shaping_benefit),
        ("MCTS bookkeeping invariants", bookkeeping),
        ("UCB unit values", ucb_values),
        ("determinism", determinism),
        ("report-format fixtures", report_fixtures),
        ("proof-diversity counting", diversity),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(msg.unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg} [{:.1?}]", started.elapsed()),
            Err(msg) => {
                println!("FAIL {name}: {msg} [{:.1?}]", started.elapsed());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
