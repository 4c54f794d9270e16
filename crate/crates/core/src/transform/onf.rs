use std::collections::HashMap;
use std::sync::Arc;

use crate::formula::build::*;
use crate::formula::{Alphabet, Formula, ThresholdAtom, ThresholdExpr, F};
use crate::interval::Interval;

/// `⋁Σ`: the point carries a base symbol.
pub fn act(sigma: &Alphabet) -> F {
    or_all(sigma.iter().map(prop_named))
}

/// Relativize `f` to action points: every modality skips points without a
/// symbol of `sigma`. On an action point of an extension, the result holds
/// iff `f` holds at the same point of the word with non-action points deleted.
pub fn onf(f: &F, sigma: &Alphabet) -> F {
    Onf::new(sigma).run(f)
}

pub(crate) struct Onf {
    act: F,
    memo: HashMap<*const Formula, (F, F)>,
}

impl Onf {
    pub(crate) fn new(sigma: &Alphabet) -> Self {
        Self {
            act: act(sigma),
            memo: HashMap::new(),
        }
    }

    pub(crate) fn act(&self) -> F {
        self.act.clone()
    }

    /// `act & ONF(f)`: `f` at an action point.
    pub(crate) fn at_act(&mut self, f: &F) -> F {
        let g = self.run(f);
        match &*g {
            Formula::True => self.act(),
            _ => and(self.act(), g),
        }
    }

    /// `act -> ONF(f)`.
    fn if_act(&mut self, f: &F) -> F {
        let g = self.run(f);
        match &*g {
            Formula::True => tt(),
            _ => implies(self.act(), g),
        }
    }

    pub(crate) fn run(&mut self, f: &F) -> F {
        let key = Arc::as_ptr(f);
        if let Some((_, done)) = self.memo.get(&key) {
            return done.clone();
        }
        let out = self.rewrite(f);
        self.memo.insert(key, (f.clone(), out.clone()));
        out
    }

    fn rewrite(&mut self, f: &F) -> F {
        match &**f {
            Formula::True | Formula::False => f.clone(),
            Formula::Prop(_) => and(f.clone(), self.act()),
            Formula::Not(a) => not(self.run(a)),
            Formula::And(a, b) => and(self.run(a), self.run(b)),
            Formula::Or(a, b) => or(self.run(a), self.run(b)),
            Formula::Implies(a, b) => implies(self.run(a), self.run(b)),
            Formula::Until {
                left,
                interval,
                threshold,
                right,
            } => {
                let l = self.if_act(left);
                let r = self.at_act(right);
                match threshold {
                    None => until(l, interval.clone(), r),
                    Some(t) => until_thr(l, interval.clone(), self.threshold(t), r),
                }
            }
            Formula::Count {
                cmp,
                bound,
                interval,
                body,
            } => count(*cmp, bound.clone(), interval.clone(), self.at_act(body)),
            Formula::Eventually { interval, body } => {
                eventually(interval.clone(), self.at_act(body))
            }
            Formula::Always { interval, body } => always(interval.clone(), self.if_act(body)),
            Formula::Next { interval, body } => {
                let skip = not(self.act());
                until(skip, interval.clone(), self.at_act(body))
            }
            Formula::WeakEventually { interval, body } => {
                let now = self.run(body);
                or(now, eventually(interval.clone(), self.at_act(body)))
            }
            Formula::WeakAlways { interval, body } => {
                let now = self.run(body);
                and(now, always(interval.clone(), self.if_act(body)))
            }
            Formula::WeakUntil {
                left,
                interval,
                right,
            } => {
                let (a, b) = (self.run(left), self.run(right));
                let strict = and(a, until(self.if_act(left), interval.clone(), self.at_act(right)));
                if interval.contains_zero() {
                    or(b, strict)
                } else {
                    strict
                }
            }
        }
    }

    fn threshold(&mut self, t: &ThresholdExpr) -> ThresholdExpr {
        match t {
            ThresholdExpr::Atom(a) => ThresholdExpr::Atom(ThresholdAtom {
                counted: self.at_act(&a.counted),
                cmp: a.cmp,
                bound: a.bound.clone(),
            }),
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

/// `Gw` restricted to action points, for a formula already relativized.
pub(crate) fn globally_act(act: &F, body: F) -> F {
    and(body.clone(), always(Interval::full(), implies(act.clone(), body)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_at, satisfying_positions};
    use crate::formula::parse_formula;
    use crate::gen::{random_formula, random_word, rng, FormulaParams, WordParams};
    use crate::word::restrict_to;

    fn sigma(xs: &[&str]) -> Alphabet {
        xs.iter().map(|s| Arc::from(*s)).collect()
    }

    #[test]
    fn atoms_gain_the_action_guard() {
        let f = onf(&parse_formula("a").unwrap(), &sigma(&["a", "d"]));
        assert_eq!(f.to_string(), "a & (a | d)");
        let t = onf(&parse_formula("true").unwrap(), &sigma(&["a"]));
        assert_eq!(*t, Formula::True);
    }

    #[test]
    fn always_becomes_guarded() {
        let f = onf(&parse_formula("G(0,1) a").unwrap(), &sigma(&["a", "d"]));
        assert_eq!(f.to_string(), "G(0,1) (a | d -> a & (a | d))");
    }

    /// Evaluating ONF(f) on an action point of an extension agrees with
    /// evaluating f on the word with non-action points deleted.
    #[test]
    fn relativization_matches_the_projection() {
        let base = sigma(&["a", "b"]);
        let fp = FormulaParams::new(&["a", "b"], 2);
        let wp = WordParams::new(&["a", "b", "x"], 7);
        let mut r = rng(11);
        for _ in 0..300 {
            let f = random_formula(&mut r, &fp);
            let w = random_word(&mut r, &wp);
            let Ok(projected) = restrict_to(&w, &base) else {
                continue;
            };
            let g = onf(&f, &base);
            let on_w = satisfying_positions(&w, &g);
            let action: Vec<usize> = (0..w.len())
                .filter(|&k| w.points()[k].touches(&base))
                .collect();
            for (p, &k) in action.iter().enumerate() {
                let expected = eval_at(&projected, p, &f).unwrap();
                assert_eq!(on_w.contains(k), expected, "{f} on {w} at {k}");
            }
        }
    }
}
