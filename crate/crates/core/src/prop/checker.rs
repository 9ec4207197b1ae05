//! Stand-alone proof checker.
//!
//! Replays a tactic script from the task statement using its own goal
//! bookkeeping; it shares only the formula and tactic parsers with the
//! search engine. `have` opens its obligation immediately here, whereas the
//! engine opens it on first use; both must agree on every script.

use super::env::Task;
use super::formula::Formula;
use super::tactic::{is_binder_label, parse_tactic, Tactic};

type Context = Vec<(String, Formula)>;

struct Obligation {
    /// Hypothesis granted to the parent once every goal here is closed.
    grants: Option<(String, Formula)>,
    goals: Vec<(Context, Formula)>,
}

fn find<'a>(ctx: &'a Context, label: &str) -> Option<&'a Formula> {
    ctx.iter().rev().find(|(l, _)| l == label).map(|(_, f)| f)
}

fn unused(ctx: &Context, label: &str) -> bool {
    let dotted = format!("{label}.");
    !ctx.iter().any(|(l, _)| l == label || l.starts_with(&dotted))
}

/// Goals replacing `(ctx ⊢ target)` after `tactic`, or `None` if it fails.
fn run(ctx: &Context, target: &Formula, tactic: &Tactic) -> Option<Vec<(Context, Formula)>> {
    use Formula::*;
    match (tactic, target) {
        (Tactic::Exact(l), _) => (find(ctx, l)? == target).then(Vec::new),
        (Tactic::Intro(l), Implies(a, b)) => {
            if !is_binder_label(l) || !unused(ctx, l) {
                return None;
            }
            let mut c = ctx.clone();
            c.push((l.clone(), (**a).clone()));
            Some(vec![(c, (**b).clone())])
        }
        (Tactic::Apply(l), _) => match find(ctx, l)? {
            Implies(a, b) if **b == *target => Some(vec![(ctx.clone(), (**a).clone())]),
            _ => None,
        },
        (Tactic::Split, And(a, b)) => Some(vec![
            (ctx.clone(), (**a).clone()),
            (ctx.clone(), (**b).clone()),
        ]),
        (Tactic::Left, Or(a, _)) => Some(vec![(ctx.clone(), (**a).clone())]),
        (Tactic::Right, Or(_, b)) => Some(vec![(ctx.clone(), (**b).clone())]),
        (Tactic::Cases(l), _) => match find(ctx, l)? {
            Or(a, b) => {
                let rebind = |f: &Formula| -> Context {
                    ctx.iter()
                        .map(|(k, g)| (k.clone(), if k == l { f.clone() } else { g.clone() }))
                        .collect()
                };
                Some(vec![(rebind(a), target.clone()), (rebind(b), target.clone())])
            }
            And(a, b) => {
                let first = format!("{l}.1");
                let second = format!("{l}.2");
                if ctx.iter().any(|(k, _)| *k == first || *k == second) {
                    return None;
                }
                let mut c: Context = ctx.iter().filter(|(k, _)| k != l).cloned().collect();
                c.push((first, (**a).clone()));
                c.push((second, (**b).clone()));
                Some(vec![(c, target.clone())])
            }
            _ => None,
        },
        _ => None,
    }
}

/// True iff every tactic applies in turn and no goal is left open.
pub fn check_proof(task: &Task, tactics: &[String]) -> bool {
    if task.validate().is_err() {
        return false;
    }
    let ctx: Context = task
        .hypotheses
        .iter()
        .map(|h| (h.label.clone(), h.formula.clone()))
        .collect();
    let mut stack = vec![Obligation {
        grants: None,
        goals: vec![(ctx, task.target.clone())],
    }];

    for text in tactics {
        let Some(tactic) = parse_tactic(text) else {
            return false;
        };
        let Some(top) = stack.last_mut() else {
            // script continues after the proof is finished
            return false;
        };
        let (ctx, target) = top.goals[0].clone();
        if let Tactic::Have(label, statement) = tactic {
            if !unused(&ctx, &label) {
                return false;
            }
            stack.push(Obligation {
                grants: Some((label, statement.clone())),
                goals: vec![(ctx, statement)],
            });
            continue;
        }
        let Some(rest) = run(&ctx, &target, &tactic) else {
            return false;
        };
        top.goals.splice(0..1, rest);
        while stack.last().is_some_and(|o| o.goals.is_empty()) {
            let done = stack.pop().unwrap();
            if let (Some(grant), Some(parent)) = (done.grants, stack.last_mut()) {
                parent.goals[0].0.push(grant);
            }
        }
    }
    stack.is_empty()
}
