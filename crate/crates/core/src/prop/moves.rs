//! Finite enumeration of the moves available on a sequent.

use super::formula::Formula;
use super::state::Sequent;
use super::tactic::Tactic;

/// At most this many `have` proposals per sequent.
pub const MAX_CONJECTURES: usize = 8;

/// Applicable primitive tactics in canonical order: `exact` by label,
/// `intro`, `apply` by label, `split`, `left`, `right`, `cases` by label.
/// Every returned tactic refines `seq` successfully.
pub fn applicable_tactics(seq: &Sequent) -> Vec<Tactic> {
    let mut labels: Vec<&str> = seq.context.iter().map(|h| h.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();

    let mut out = Vec::new();
    for l in &labels {
        if seq.lookup(l) == Some(&seq.target) {
            out.push(Tactic::Exact(l.to_string()));
        }
    }
    if matches!(seq.target, Formula::Implies(..)) {
        out.push(Tactic::Intro(seq.fresh_label("h")));
    }
    for l in &labels {
        if matches!(seq.lookup(l), Some(Formula::Implies(_, y)) if **y == seq.target) {
            out.push(Tactic::Apply(l.to_string()));
        }
    }
    if matches!(seq.target, Formula::And(..)) {
        out.push(Tactic::Split);
    }
    if matches!(seq.target, Formula::Or(..)) {
        out.push(Tactic::Left);
        out.push(Tactic::Right);
    }
    for l in &labels {
        if matches!(seq.lookup(l), Some(Formula::And(..) | Formula::Or(..))) {
            let t = Tactic::Cases(l.to_string());
            if seq.refine(&t).is_ok() {
                out.push(t);
            }
        }
    }
    out
}

/// Necessary condition for `context ⊢ f`: every atom or negation the
/// proof would have to close must occur in the context, after the
/// antecedents of `f` are introduced.
pub fn plausible(context: &[&Formula], f: &Formula) -> bool {
    let occurs = |g: &Formula| context.iter().any(|h| h.subformulas().contains(&g));
    match f {
        Formula::Atom(_) | Formula::Not(_) => occurs(f),
        Formula::And(a, b) => occurs(f) || (plausible(context, a) && plausible(context, b)),
        Formula::Or(a, b) => occurs(f) || plausible(context, a) || plausible(context, b),
        Formula::Implies(a, b) => {
            let mut extended = context.to_vec();
            extended.push(a);
            occurs(f) || plausible(&extended, b)
        }
    }
}

/// Subformulas of `f` in strictly positive position, pre-order: the parts
/// a proof of `f` has to establish.
fn positive_parts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) | Formula::Or(a, b) => {
            out.push((**a).clone());
            positive_parts(a, out);
            out.push((**b).clone());
            positive_parts(b, out);
        }
        Formula::Implies(_, b) => {
            out.push((**b).clone());
            positive_parts(b, out);
        }
        Formula::Atom(_) | Formula::Not(_) => {}
    }
}

/// Conjectures worth proposing on `seq`: the strictly positive subformulas
/// of the target, the commuted target when it is a conjunction or
/// disjunction, then the inner implications of curried hypotheses
/// (`Y → Z` from `X → (Y → Z)`). Statements already in context, the target
/// itself, duplicates, and statements that fail [`plausible`] are skipped;
/// capped at [`MAX_CONJECTURES`].
pub fn conjecture_statements(seq: &Sequent) -> Vec<Formula> {
    let mut candidates: Vec<Formula> = Vec::new();
    positive_parts(&seq.target, &mut candidates);
    match &seq.target {
        Formula::And(x, y) => candidates.push(Formula::and((**y).clone(), (**x).clone())),
        Formula::Or(x, y) => candidates.push(Formula::or((**y).clone(), (**x).clone())),
        _ => {}
    }
    for h in &seq.context {
        let mut f = &h.formula;
        while let Formula::Implies(_, y) = f {
            if matches!(**y, Formula::Implies(..)) {
                candidates.push((**y).clone());
            }
            f = y;
        }
    }

    let context: Vec<&Formula> = seq.context.iter().map(|h| &h.formula).collect();
    let mut out: Vec<Formula> = Vec::new();
    for c in candidates {
        if c == seq.target
            || out.contains(&c)
            || seq.context.iter().any(|h| h.formula == c)
            || !plausible(&context, &c)
        {
            continue;
        }
        out.push(c);
        if out.len() == MAX_CONJECTURES {
            break;
        }
    }
    out
}

/// `have` tactics for [`conjecture_statements`], each with a fresh label.
pub fn conjecture_tactics(seq: &Sequent) -> Vec<Tactic> {
    let label = seq.fresh_label("c");
    conjecture_statements(seq)
        .into_iter()
        .map(|f| Tactic::Have(label.clone(), f))
        .collect()
}
