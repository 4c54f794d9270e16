use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;

use super::build::*;
use super::{Cmp, Formula, ThresholdExpr, F};
use crate::interval::Interval;

/// Rewrite into core nodes: C only with `>=`, threshold atoms only with `>=`
/// and `<`, no implication and no temporal sugar.
pub fn desugar(f: &F) -> F {
    Desugar::default().run(f)
}

#[derive(Default)]
struct Desugar {
    memo: HashMap<*const Formula, F>,
}

fn succ(n: &BigUint) -> BigUint {
    n + 1u32
}

impl Desugar {
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
            Formula::Implies(a, b) => or(not(self.run(a)), self.run(b)),
            Formula::Until {
                left,
                interval,
                threshold,
                right,
            } => {
                let left = self.run(left);
                let right = self.run(right);
                match threshold {
                    None => until(left, interval.clone(), right),
                    Some(t) => until_thr(left, interval.clone(), self.threshold(t), right),
                }
            }
            Formula::Count {
                cmp,
                bound,
                interval,
                body,
            } => {
                let body = self.run(body);
                let ge = |n: BigUint| count(Cmp::Ge, n, interval.clone(), body.clone());
                match cmp {
                    Cmp::Ge => ge(bound.clone()),
                    Cmp::Gt => ge(succ(bound)),
                    Cmp::Le => not(ge(succ(bound))),
                    Cmp::Lt => not(ge(bound.clone())),
                    Cmp::Eq => and(ge(bound.clone()), not(ge(succ(bound)))),
                }
            }
            Formula::Eventually { interval, body } => {
                until(tt(), interval.clone(), self.run(body))
            }
            Formula::Always { interval, body } => {
                not(until(tt(), interval.clone(), not(self.run(body))))
            }
            Formula::Next { interval, body } => until(ff(), interval.clone(), self.run(body)),
            Formula::WeakEventually { interval, body } => {
                let b = self.run(body);
                or(b.clone(), until(tt(), interval.clone(), b))
            }
            Formula::WeakAlways { interval, body } => {
                let b = self.run(body);
                and(b.clone(), not(until(tt(), interval.clone(), not(b))))
            }
            Formula::WeakUntil {
                left,
                interval,
                right,
            } => {
                let (a, b) = (self.run(left), self.run(right));
                weak_until_core(a, interval, b)
            }
        }
    }

    fn threshold(&mut self, t: &ThresholdExpr) -> ThresholdExpr {
        match t {
            ThresholdExpr::Atom(a) => {
                let counted = self.run(&a.counted);
                let atom = |cmp, n: BigUint| ThresholdExpr::atom(counted.clone(), cmp, n);
                let n = &a.bound;
                match a.cmp {
                    Cmp::Ge => atom(Cmp::Ge, n.clone()),
                    Cmp::Lt => atom(Cmp::Lt, n.clone()),
                    Cmp::Gt => atom(Cmp::Ge, succ(n)),
                    Cmp::Le => ThresholdExpr::Not(Box::new(atom(Cmp::Ge, succ(n)))),
                    Cmp::Eq => ThresholdExpr::And(
                        Box::new(atom(Cmp::Ge, n.clone())),
                        Box::new(ThresholdExpr::Not(Box::new(atom(Cmp::Ge, succ(n))))),
                    ),
                }
            }
            ThresholdExpr::Not(e) => ThresholdExpr::Not(Box::new(self.threshold(e))),
            ThresholdExpr::And(a, b) => {
                ThresholdExpr::And(Box::new(self.threshold(a)), Box::new(self.threshold(b)))
            }
            ThresholdExpr::Or(a, b) => {
                ThresholdExpr::Or(Box::new(self.threshold(a)), Box::new(self.threshold(b)))
            }
        }
    }
}

/// `a Uw_I b` in core nodes: `b | (a & a U_I b)` when `0 ∈ I`, else `a & a U_I b`.
pub(crate) fn weak_until_core(a: F, interval: &Interval, b: F) -> F {
    let strict = and(a.clone(), until(a, interval.clone(), b.clone()));
    if interval.contains_zero() {
        or(b, strict)
    } else {
        strict
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn p(s: &str) -> F {
        parse_formula(s).unwrap()
    }

    #[test]
    fn count_equality() {
        assert_eq!(desugar(&p("C(0,1)=2 (a)")), p("C(0,1)>=2 (a) & !C(0,1)>=3 (a)"));
    }

    #[test]
    fn count_strict_lower_bound() {
        assert_eq!(desugar(&p("C[0,2)>1 (b)")), p("C[0,2)>=2 (b)"));
    }

    #[test]
    fn eventually_becomes_until() {
        assert_eq!(desugar(&p("F[0,1] a")), p("true U[0,1] a"));
        assert_eq!(desugar(&p("G(0,1) a")), p("!(true U(0,1) !a)"));
        assert_eq!(desugar(&p("X a")), p("false U a"));
    }

    #[test]
    fn threshold_comparisons() {
        assert_eq!(
            desugar(&p("a U{#(d)<=2 && #(e)=1 || #(f)>0} c")),
            p("a U{!#(d)>=3 && (#(e)>=1 && !#(e)>=2) || #(f)>=1} c"),
        );
    }

    #[test]
    fn idempotent() {
        let f = p("Gw[0,2] (a -> Uw(0,3)(b, C[1,2]<=2 (c)))");
        let once = desugar(&f);
        assert_eq!(desugar(&once), once);
    }
}
