#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sgmdp::prop::{
    applicable_tactics, conjecture_tactics, Formula, Goal, Hypothesis, ProofState, PropEnv, Task,
};

pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return Formula::atom((b'A' + rng.gen_range(0..4)) as char);
    }
    let l = random_formula(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::not(l),
        1 => Formula::and(l, random_formula(rng, depth - 1)),
        2 => Formula::or(l, random_formula(rng, depth - 1)),
        _ => Formula::implies(l, random_formula(rng, depth - 1)),
    }
}

pub fn random_task(rng: &mut ChaCha8Rng) -> Task {
    let target = random_formula(rng, 3);
    let n = rng.gen_range(0..=3);
    let mut hyps = Vec::new();
    for i in 0..n {
        let f = if rng.gen_bool(0.4) {
            let parts = target.subformulas();
            (*parts.choose(rng).unwrap()).clone()
        } else {
            random_formula(rng, 2)
        };
        hyps.push(Hypothesis::new(format!("h{i}"), f));
    }
    Task::new("fuzz", hyps, target)
}

/// Candidate action texts on `goal`: the applicable tactics, the proposed
/// conjectures, and a few that should be rejected.
pub fn candidate_actions(env: &PropEnv, state: &ProofState, goal: &Goal, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut out = vec![
        String::new(),
        "exact zz".into(),
        "intro".into(),
        "apply 3".into(),
        "have c : ".into(),
        "sorry".into(),
        format!("have q : {}", random_formula(rng, 2)),
        format!("have h0 : {}", random_formula(rng, 1)),
    ];
    if let Some((seq, _)) = env.active_sequent(state, goal) {
        out.extend(applicable_tactics(&seq).iter().map(|t| t.to_string()));
        out.extend(conjecture_tactics(&seq).iter().map(|t| t.to_string()));
        for h in &seq.context {
            out.push(format!("exact {}", h.label));
            out.push(format!("cases {}", h.label));
        }
    }
    out.extend(["split", "left", "right"].map(String::from));
    out
}
