use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::build::*;
use super::{Cmp, Formula, ThresholdAtom, ThresholdExpr, F};
use crate::interval::Interval;

/// Rewrite a desugared formula so that every until carries at most one
/// threshold atom.
///
/// Thresholds are put in disjunctive normal form and disjunctions become
/// disjunctions of untils. A clause with only lower bounds (or only upper
/// bounds) becomes a conjunction of single-atom untils. A clause mixing both
/// keeps the timed single-atom conjuncts and expresses the untimed mixed part
/// as an unrolling over (remaining lower-bound need, remaining upper-bound
/// budget) whose leaves are single-atom untils.
pub fn normalize_thresholds(f: &F) -> F {
    Normalizer::default().run(f)
}

#[derive(Default)]
struct Normalizer {
    memo: HashMap<*const Formula, F>,
}

type Clause = Vec<ThresholdAtom>;

impl Normalizer {
    fn run(&mut self, f: &F) -> F {
        let key = Arc::as_ptr(f);
        if let Some(done) = self.memo.get(&key) {
            return done.clone();
        }
        let out = self.rewrite(f);
        self.memo.insert(key, out.clone());
        out
    }

    fn rewrite(&mut self, f: &F) -> F {
        match &**f {
            Formula::True | Formula::False | Formula::Prop(_) => f.clone(),
            Formula::Not(a) => not(self.run(a)),
            Formula::And(a, b) => and(self.run(a), self.run(b)),
            Formula::Or(a, b) => or(self.run(a), self.run(b)),
            Formula::Implies(a, b) => implies(self.run(a), self.run(b)),
            Formula::Count {
                cmp,
                bound,
                interval,
                body,
            } => count(*cmp, bound.clone(), interval.clone(), self.run(body)),
            Formula::Until {
                left,
                interval,
                threshold,
                right,
            } => {
                let (l, r) = (self.run(left), self.run(right));
                match threshold {
                    None => until(l, interval.clone(), r),
                    Some(ThresholdExpr::Atom(a)) => {
                        until_thr(l, interval.clone(), self.atom(a), r)
                    }
                    Some(t) => {
                        let nnf = self.nnf(t, false);
                        let clauses = dnf(&nnf);
                        or_all(
                            clauses
                                .into_iter()
                                .map(|c| clause_until(&l, interval, c, &r)),
                        )
                    }
                }
            }
            Formula::Eventually { interval, body } => eventually(interval.clone(), self.run(body)),
            Formula::Always { interval, body } => always(interval.clone(), self.run(body)),
            Formula::Next { interval, body } => next(interval.clone(), self.run(body)),
            Formula::WeakEventually { interval, body } => {
                weak_eventually(interval.clone(), self.run(body))
            }
            Formula::WeakAlways { interval, body } => weak_always(interval.clone(), self.run(body)),
            Formula::WeakUntil {
                left,
                interval,
                right,
            } => weak_until(self.run(left), interval.clone(), self.run(right)),
        }
    }

    fn atom(&mut self, a: &ThresholdAtom) -> ThresholdExpr {
        ThresholdExpr::Atom(ThresholdAtom::new(self.run(&a.counted), a.cmp, a.bound.clone()))
    }

    /// Negation normal form: negations are absorbed into atoms by flipping
    /// `>=` and `<`.
    fn nnf(&mut self, t: &ThresholdExpr, negate: bool) -> ThresholdExpr {
        match t {
            ThresholdExpr::Atom(a) => {
                let cmp = match (a.cmp, negate) {
                    (c, false) => c,
                    (Cmp::Ge, true) => Cmp::Lt,
                    (Cmp::Lt, true) => Cmp::Ge,
                    (c, true) => panic!("threshold comparison {c} must be desugared first"),
                };
                ThresholdExpr::Atom(ThresholdAtom::new(self.run(&a.counted), cmp, a.bound.clone()))
            }
            ThresholdExpr::Not(e) => self.nnf(e, !negate),
            ThresholdExpr::And(a, b) | ThresholdExpr::Or(a, b) => {
                let (x, y) = (Box::new(self.nnf(a, negate)), Box::new(self.nnf(b, negate)));
                match (t, negate) {
                    (ThresholdExpr::And(..), false) | (ThresholdExpr::Or(..), true) => {
                        ThresholdExpr::And(x, y)
                    }
                    _ => ThresholdExpr::Or(x, y),
                }
            }
        }
    }
}

fn dnf(t: &ThresholdExpr) -> Vec<Clause> {
    match t {
        ThresholdExpr::Atom(a) => vec![vec![a.clone()]],
        ThresholdExpr::Or(a, b) => {
            let mut out = dnf(a);
            out.extend(dnf(b));
            out
        }
        ThresholdExpr::And(a, b) => {
            let (x, y) = (dnf(a), dnf(b));
            let mut out = Vec::with_capacity(x.len() * y.len());
            for cx in &x {
                for cy in &y {
                    let mut c = cx.clone();
                    c.extend(cy.iter().cloned());
                    out.push(c);
                }
            }
            out
        }
        ThresholdExpr::Not(_) => unreachable!("negations are absorbed by nnf"),
    }
}

fn single(l: &F, interval: &Interval, a: ThresholdAtom, r: &F) -> F {
    until_thr(l.clone(), interval.clone(), ThresholdExpr::Atom(a), r.clone())
}

fn clause_until(l: &F, interval: &Interval, clause: Clause, r: &F) -> F {
    if clause.len() == 1 {
        let a = clause.into_iter().next().expect("one atom");
        return single(l, interval, a, r);
    }
    let (lower, upper): (Clause, Clause) = clause.into_iter().partition(|a| a.cmp == Cmp::Ge);
    if lower.is_empty() || upper.is_empty() {
        return and_all(
            lower
                .into_iter()
                .chain(upper)
                .map(|a| single(l, interval, a, r)),
        );
    }
    let mut parts: Vec<F> = Vec::new();
    for ge in &lower {
        for lt in &upper {
            parts.push(untimed_pair(l, ge, lt, r));
        }
    }
    if !interval.is_full() {
        parts.extend(
            lower
                .into_iter()
                .chain(upper)
                .map(|a| single(l, interval, a, r)),
        );
    }
    and_all(parts)
}

/// `l U{#A >= n && #B < m} r` over `[0, inf)` without compound thresholds.
fn untimed_pair(l: &F, ge: &ThresholdAtom, lt: &ThresholdAtom, r: &F) -> F {
    let need = ge.bound.to_usize().expect("threshold bound too large to unroll");
    let budget = lt.bound.to_usize().expect("threshold bound too large to unroll");
    let (a, b) = (&ge.counted, &lt.counted);
    let (not_a, not_b) = (not(a.clone()), not(b.clone()));
    let skip = and(and(l.clone(), not_a.clone()), not_b.clone());
    // table[s][k]: need s more A-points, fewer than k more B-points allowed.
    let mut table: Vec<Vec<F>> = vec![Vec::with_capacity(budget + 1); need + 1];
    for s in 0..=need {
        for k in 0..=budget {
            let entry = if k == 0 {
                ff()
            } else if s == 0 {
                single(
                    l,
                    &Interval::full(),
                    ThresholdAtom::new(b.clone(), Cmp::Lt, BigUint::from(k)),
                    r,
                )
            } else {
                let only_a = and_all([l.clone(), a.clone(), not_b.clone(), table[s - 1][k].clone()]);
                let only_b = and_all([l.clone(), b.clone(), not_a.clone(), table[s][k - 1].clone()]);
                let both = and_all([l.clone(), a.clone(), b.clone(), table[s - 1][k - 1].clone()]);
                until(skip.clone(), Interval::full(), or_all([only_a, only_b, both]))
            };
            table[s].push(entry);
        }
    }
    table[need][budget].clone()
}

/// Remove counting constraints that always or never hold: `C>=0` becomes
/// `true`, `#φ >= 0` becomes a plain until and `#φ < 0` makes the until
/// `false`. Expects single-atom thresholds.
pub fn simplify_trivial(f: &F) -> F {
    fn go(f: &F, memo: &mut HashMap<*const Formula, F>) -> F {
        let key = Arc::as_ptr(f);
        if let Some(done) = memo.get(&key) {
            return done.clone();
        }
        let out = match &**f {
            Formula::True | Formula::False | Formula::Prop(_) => f.clone(),
            Formula::Not(a) => not(go(a, memo)),
            Formula::And(a, b) => and(go(a, memo), go(b, memo)),
            Formula::Or(a, b) => or(go(a, memo), go(b, memo)),
            Formula::Implies(a, b) => implies(go(a, memo), go(b, memo)),
            Formula::Count {
                cmp: Cmp::Ge,
                bound,
                ..
            } if bound.is_zero() => tt(),
            Formula::Count {
                cmp,
                bound,
                interval,
                body,
            } => count(*cmp, bound.clone(), interval.clone(), go(body, memo)),
            Formula::Until {
                left,
                interval,
                threshold,
                right,
            } => {
                let (l, r) = (go(left, memo), go(right, memo));
                match threshold {
                    Some(ThresholdExpr::Atom(a)) if a.bound.is_zero() && a.cmp == Cmp::Ge => {
                        until(l, interval.clone(), r)
                    }
                    Some(ThresholdExpr::Atom(a)) if a.bound.is_zero() && a.cmp == Cmp::Lt => ff(),
                    Some(ThresholdExpr::Atom(a)) => until_thr(
                        l,
                        interval.clone(),
                        ThresholdExpr::atom(go(&a.counted, memo), a.cmp, a.bound.clone()),
                        r,
                    ),
                    Some(_) => panic!("simplify_trivial expects normalized thresholds"),
                    None => until(l, interval.clone(), r),
                }
            }
            Formula::Eventually { interval, body } => eventually(interval.clone(), go(body, memo)),
            Formula::Always { interval, body } => always(interval.clone(), go(body, memo)),
            Formula::Next { interval, body } => next(interval.clone(), go(body, memo)),
            Formula::WeakEventually { interval, body } => {
                weak_eventually(interval.clone(), go(body, memo))
            }
            Formula::WeakAlways { interval, body } => {
                weak_always(interval.clone(), go(body, memo))
            }
            Formula::WeakUntil {
                left,
                interval,
                right,
            } => weak_until(go(left, memo), interval.clone(), go(right, memo)),
        };
        memo.insert(key, out.clone());
        out
    }
    go(f, &mut HashMap::new())
}
