mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgmdp::policy::{EnumerationPolicy, Policy, StochasticPolicy};
use sgmdp::prop::{PropEnv, Task};
use sgmdp::search::{replay_trace, search, NodeStatus, Search, SearchConfig, SearchOutcome, UcbVariant};

fn fuzz_config(rng: &mut ChaCha8Rng) -> SearchConfig {
    SearchConfig {
        exploration_c: rng.gen_range(0.0..2.0),
        max_expansion_trials: rng.gen_range(1..=6),
        max_children: rng.gen_range(1..=4),
        max_iterations: rng.gen_range(1..=60),
        ucb_variant: if rng.gen_bool(0.5) { UcbVariant::ParentVisits } else { UcbVariant::NodeVisits },
        seed: rng.gen(),
        sample_budget: rng.gen_bool(0.5).then(|| rng.gen_range(1..=120)),
        ..Default::default()
    }
}

/// Runs the search one iteration at a time, replaying the trace so far
/// against the live tree after each step.
fn check_run(task: &Task, policy: &dyn Policy<PropEnv>, config: SearchConfig) -> u32 {
    let env = PropEnv::default();
    let mut s = Search::new(&env, policy, task, config).unwrap();
    let root_status = s.nodes()[0].status;
    loop {
        let stop = s.iterate();
        let replay = replay_trace(s.trace(), &config, root_status).unwrap_or_else(|v| panic!("{task}: {v}"));
        assert_eq!(replay.nodes.len(), s.nodes().len());
        assert_eq!(replay.samples, s.samples_used());
        for (r, n) in replay.nodes.iter().zip(s.nodes()) {
            assert_eq!((r.visits, r.parent, &r.children, r.status), (n.visits, n.parent, &n.children, n.status));
            assert!((r.value - n.value).abs() < 1e-9);
            assert!(n.children.len() <= config.max_children);
            if n.status == NodeStatus::ExpansionExhausted {
                assert!(n.failed_trials >= config.max_expansion_trials);
            }
        }
        if stop.is_some() {
            return replay.iterations;
        }
    }
}

#[test]
fn fuzzed_searches_keep_their_books() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut iterations = 0;
    let mut runs = 0;
    while iterations < 1000 {
        let task = common::random_task(&mut rng);
        let config = fuzz_config(&mut rng);
        let policy: Box<dyn Policy<PropEnv>> = match rng.gen_range(0..3) {
            0 => Box::new(EnumerationPolicy::default()),
            _ => Box::new(StochasticPolicy::with_epsilon(rng.gen_range(0.0..0.6))),
        };
        iterations += check_run(&task, policy.as_ref(), config);
        runs += 1;
    }
    assert!(runs > 10);
}

#[test]
fn identical_seeds_give_identical_traces() {
    let env = PropEnv::default();
    let task = Task::parse_sequent("t", "h: A ∧ (B ∨ C), k: B → D, m: C → D ⊢ D ∧ A").unwrap();
    let policy = StochasticPolicy::with_epsilon(0.2);
    let config = SearchConfig { seed: 5, ..Default::default() };
    let a = search(&env, &policy, &task, config).unwrap();
    let b = search(&env, &policy, &task, config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.outcome, SearchOutcome::Proved);
    let c = search(&env, &policy, &task, SearchConfig { seed: 6, ..config }).unwrap();
    assert_eq!(c.outcome, SearchOutcome::Proved);
}

#[test]
fn proofs_pass_the_checker() {
    let env = PropEnv::default();
    for text in ["h: A ⊢ A", "⊢ A → A", "h: A ∧ B ⊢ B ∧ A", "h: A ∨ B ⊢ B ∨ A", "f: A → B, g: B → C, a: A ⊢ C"] {
        let task = Task::parse_sequent("t", text).unwrap();
        let r = search(&env, &EnumerationPolicy::default(), &task, SearchConfig::default()).unwrap();
        let proof = r.proof.expect(text);
        assert!(sgmdp::prop::check_proof(&task, &proof), "{text}: {proof:?}");
    }
}
