use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;

use super::{Alphabet, Formula, ThresholdExpr, F};
use crate::interval::Interval;

/// Direct subformulas, counted formulas of thresholds included.
pub(crate) fn children(f: &Formula) -> Vec<&F> {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) => Vec::new(),
        Formula::Not(g) => vec![g],
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
        Formula::Until {
            left,
            threshold,
            right,
            ..
        } => {
            let mut out = vec![left, right];
            if let Some(t) = threshold {
                out.extend(t.atoms().into_iter().map(|a| &a.counted));
            }
            out
        }
        Formula::WeakUntil { left, right, .. } => vec![left, right],
        Formula::Count { body, .. }
        | Formula::Eventually { body, .. }
        | Formula::Always { body, .. }
        | Formula::Next { body, .. }
        | Formula::WeakEventually { body, .. }
        | Formula::WeakAlways { body, .. } => vec![body],
    }
}

/// Visit every distinct node of the formula DAG once.
pub(crate) fn visit(f: &Formula, mut visitor: impl FnMut(&Formula)) {
    let mut seen: HashSet<*const Formula> = HashSet::new();
    let mut stack: Vec<&Formula> = vec![f];
    while let Some(g) = stack.pop() {
        if !seen.insert(g as *const Formula) {
            continue;
        }
        visitor(g);
        for c in children(g) {
            stack.push(c);
        }
    }
}

fn memo_fold(
    f: &Formula,
    memo: &mut HashMap<*const Formula, usize>,
    rule: &impl Fn(&Formula, &dyn Fn(&F) -> usize) -> usize,
) -> usize {
    let key = f as *const Formula;
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    // Children first, so the rule can read their values from the memo.
    for c in children(f) {
        memo_fold(c, memo, rule);
    }
    let snapshot = &*memo;
    let v = rule(f, &|c: &F| snapshot[&(&**c as *const Formula)]);
    memo.insert(key, v);
    v
}

fn threshold_depth(t: &Option<ThresholdExpr>, d: &dyn Fn(&F) -> usize, skip_trivial: bool) -> usize {
    match t {
        None => usize::from(!skip_trivial),
        Some(t) => t
            .atoms()
            .into_iter()
            .map(|a| {
                if skip_trivial && a.is_trivial() {
                    0
                } else {
                    d(&a.counted) + 1
                }
            })
            .max()
            .unwrap_or(0),
    }
}

/// Nesting depth of counting operators, where a plain until carries the
/// implicit threshold `#true >= 0` and therefore has depth at least 1.
pub fn depth(f: &Formula) -> usize {
    memo_fold(f, &mut HashMap::new(), &|g, d| match g {
        Formula::True | Formula::False | Formula::Prop(_) => 0,
        Formula::Not(a) => d(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => d(a).max(d(b)),
        Formula::Until {
            left,
            threshold,
            right,
            ..
        } => d(left).max(d(right)).max(threshold_depth(threshold, d, false)),
        Formula::Count { body, .. } => d(body) + 1,
        Formula::Eventually { body, .. }
        | Formula::Always { body, .. }
        | Formula::Next { body, .. }
        | Formula::WeakEventually { body, .. }
        | Formula::WeakAlways { body, .. } => d(body).max(1),
        Formula::WeakUntil { left, right, .. } => d(left).max(d(right)).max(1),
    })
}

/// Like [`depth`], but plain untils contribute nothing: only genuine counting
/// (C nodes and non-trivial threshold atoms) nests.
pub fn counting_depth(f: &Formula) -> usize {
    memo_fold(f, &mut HashMap::new(), &|g, d| match g {
        Formula::True | Formula::False | Formula::Prop(_) => 0,
        Formula::Not(a) => d(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => d(a).max(d(b)),
        Formula::Until {
            left,
            threshold,
            right,
            ..
        } => d(left).max(d(right)).max(threshold_depth(threshold, d, true)),
        Formula::Count { body, .. } => d(body) + 1,
        Formula::Eventually { body, .. }
        | Formula::Always { body, .. }
        | Formula::Next { body, .. }
        | Formula::WeakEventually { body, .. }
        | Formula::WeakAlways { body, .. } => d(body),
        Formula::WeakUntil { left, right, .. } => d(left).max(d(right)),
    })
}

/// Number of game rounds needed to separate by this formula: every temporal
/// or counting operator costs one round, booleans are free.
pub fn modal_depth(f: &Formula) -> usize {
    memo_fold(f, &mut HashMap::new(), &|g, d| match g {
        Formula::True | Formula::False | Formula::Prop(_) => 0,
        Formula::Not(a) => d(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => d(a).max(d(b)),
        Formula::Until {
            left,
            threshold,
            right,
            ..
        } => {
            let counted = threshold
                .as_ref()
                .map(|t| t.atoms().into_iter().map(|a| d(&a.counted)).max().unwrap_or(0))
                .unwrap_or(0);
            1 + d(left).max(d(right)).max(counted)
        }
        Formula::Count { body, .. }
        | Formula::Eventually { body, .. }
        | Formula::Always { body, .. }
        | Formula::Next { body, .. }
        | Formula::WeakEventually { body, .. }
        | Formula::WeakAlways { body, .. } => 1 + d(body),
        Formula::WeakUntil { left, right, .. } => 1 + d(left).max(d(right)),
    })
}

pub fn alphabet(f: &Formula) -> Alphabet {
    let mut out = BTreeSet::new();
    visit(f, |g| {
        if let Formula::Prop(p) = g {
            out.insert(p.clone());
        }
    });
    out
}

pub fn intervals(f: &Formula) -> BTreeSet<Interval> {
    let mut out = BTreeSet::new();
    visit(f, |g| match g {
        Formula::Until { interval, .. }
        | Formula::Count { interval, .. }
        | Formula::Eventually { interval, .. }
        | Formula::Always { interval, .. }
        | Formula::Next { interval, .. }
        | Formula::WeakEventually { interval, .. }
        | Formula::WeakAlways { interval, .. }
        | Formula::WeakUntil { interval, .. } => {
            out.insert(interval.clone());
        }
        _ => {}
    });
    out
}

/// Largest counting constant among C bounds and threshold bounds.
pub fn max_constant(f: &Formula) -> BigUint {
    let mut best = BigUint::from(0u32);
    visit(f, |g| match g {
        Formula::Count { bound, .. } => best = best.clone().max(bound.clone()),
        Formula::Until {
            threshold: Some(t), ..
        } => {
            for a in t.atoms() {
                best = best.clone().max(a.bound.clone());
            }
        }
        _ => {}
    });
    best
}

/// Number of distinct nodes in the formula DAG.
pub fn node_count(f: &Formula) -> usize {
    let mut n = 0;
    visit(f, |_| n += 1);
    n
}

/// No C node and no threshold other than `#true >= 0`.
pub fn is_pure_mtl(f: &Formula) -> bool {
    let mut pure = true;
    visit(f, |g| {
        if g.is_counting_modality() {
            pure = false;
        }
    });
    pure
}
