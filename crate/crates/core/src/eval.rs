//! Pointwise satisfaction of CTMTL formulas on a timed word.
//!
//! Each subformula is evaluated once into the set of positions where it
//! holds. Time windows are cached per interval.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::formula::{Formula, ThresholdExpr, F};
use crate::interval::Interval;
use crate::posset::PosSet;
use crate::word::{TimedWord, WordError};

pub struct Evaluator<'w> {
    word: &'w TimedWord,
    // The handle is kept alive so its address cannot be reused by another node.
    table: HashMap<*const Formula, (F, PosSet)>,
    windows: HashMap<Interval, Vec<PosSet>>,
}

impl<'w> Evaluator<'w> {
    pub fn new(word: &'w TimedWord) -> Self {
        Self {
            word,
            table: HashMap::new(),
            windows: HashMap::new(),
        }
    }

    pub fn word(&self) -> &TimedWord {
        self.word
    }

    /// Positions where `f` holds.
    pub fn holds(&mut self, f: &F) -> PosSet {
        let key = Arc::as_ptr(f);
        if let Some((_, set)) = self.table.get(&key) {
            return set.clone();
        }
        let set = self.compute(f);
        self.table.insert(key, (f.clone(), set.clone()));
        set
    }

    /// Number of memoized subformulas.
    pub fn table_size(&self) -> usize {
        self.table.len()
    }

    fn window(&mut self, interval: &Interval, i: usize) -> &PosSet {
        let word = self.word;
        &self
            .windows
            .entry(interval.clone())
            .or_insert_with(|| {
                (0..word.len())
                    .map(|i| word.window(i, interval).expect("position in range"))
                    .collect()
            })[i]
    }

    fn compute(&mut self, f: &F) -> PosSet {
        let n = self.word.len();
        match &**f {
            Formula::True => PosSet::full(n),
            Formula::False => PosSet::empty(n),
            Formula::Prop(p) => PosSet::from_fn(n, |k| self.word.events(k).contains(p)),
            Formula::Not(a) => self.holds(a).complement(),
            Formula::And(a, b) => self.holds(a).and(&self.holds(b)),
            Formula::Or(a, b) => self.holds(a).or(&self.holds(b)),
            Formula::Implies(a, b) => self.holds(a).complement().or(&self.holds(b)),
            Formula::Until {
                left,
                interval,
                threshold,
                right,
            } => {
                let l = self.holds(left);
                let r = self.holds(right);
                match threshold {
                    None => self.until(&l, interval, &r, |_, _, _| true),
                    Some(t) => {
                        let counters = self.prefix_counts(t);
                        self.until(&l, interval, &r, |_, i, j| {
                            threshold_holds(t, &counters, i, j)
                        })
                    }
                }
            }
            Formula::Count {
                cmp,
                bound,
                interval,
                body,
            } => {
                let b = self.holds(body);
                PosSet::from_fn(n, |i| {
                    let c = BigUint::from(self.window(interval, i).and(&b).count());
                    cmp.holds(&c, bound)
                })
            }
            Formula::Eventually { interval, body } => {
                let b = self.holds(body);
                PosSet::from_fn(n, |i| self.future(interval, i).intersects(&b))
            }
            Formula::Always { interval, body } => {
                let b = self.holds(body);
                PosSet::from_fn(n, |i| self.future(interval, i).and_not(&b).is_empty())
            }
            Formula::Next { interval, body } => {
                let b = self.holds(body);
                PosSet::from_fn(n, |i| {
                    i + 1 < n
                        && b.contains(i + 1)
                        && interval.contains(&(self.word.time(i + 1) - self.word.time(i)))
                })
            }
            Formula::WeakEventually { interval, body } => {
                let b = self.holds(body);
                PosSet::from_fn(n, |i| b.contains(i) || self.future(interval, i).intersects(&b))
            }
            Formula::WeakAlways { interval, body } => {
                let b = self.holds(body);
                PosSet::from_fn(n, |i| {
                    b.contains(i) && self.future(interval, i).and_not(&b).is_empty()
                })
            }
            Formula::WeakUntil {
                left,
                interval,
                right,
            } => {
                let l = self.holds(left);
                let r = self.holds(right);
                let strict = l.and(&self.until(&l, interval, &r, |_, _, _| true));
                if interval.contains_zero() {
                    r.or(&strict)
                } else {
                    strict
                }
            }
        }
    }

    /// Positions `j > i` with `t_j - t_i` in the interval.
    fn future(&mut self, interval: &Interval, i: usize) -> PosSet {
        let n = self.word.len();
        self.window(interval, i).and(&PosSet::range(n, i + 1, n))
    }

    /// Strict until: some `j > i` in the window satisfies `r` and `accept`,
    /// with `l` at every position strictly between.
    fn until(
        &mut self,
        l: &PosSet,
        interval: &Interval,
        r: &PosSet,
        accept: impl Fn(&Self, usize, usize) -> bool,
    ) -> PosSet {
        let n = self.word.len();
        let mut out = PosSet::empty(n);
        // reach: the first position after i where l fails (or n - 1); every
        // j in (i, reach] has only l-positions strictly between.
        let mut first_fail = n - 1;
        for i in (0..n).rev() {
            if i + 1 < n && !l.contains(i + 1) {
                first_fail = i + 1;
            }
            if i + 1 >= n {
                continue;
            }
            let candidates = self
                .window(interval, i)
                .and(r)
                .and(&PosSet::range(n, i + 1, first_fail + 1));
            if candidates.iter().any(|j| accept(self, i, j)) {
                out.insert(i);
            }
        }
        out
    }

    fn prefix_counts(&mut self, t: &ThresholdExpr) -> Vec<Vec<usize>> {
        t.atoms()
            .into_iter()
            .map(|a| {
                let set = self.holds(&a.counted);
                let mut pc = Vec::with_capacity(set.len() + 1);
                pc.push(0);
                for k in 0..set.len() {
                    pc.push(pc[k] + usize::from(set.contains(k)));
                }
                pc
            })
            .collect()
    }
}

/// The threshold holds for the strictly intermediate range `(i, j)`;
/// `counters[k]` is the prefix-count table of the k-th atom.
fn threshold_holds(t: &ThresholdExpr, counters: &[Vec<usize>], i: usize, j: usize) -> bool {
    let mut next = 0;
    t.eval_with(&mut |a| {
        let pc = &counters[next];
        next += 1;
        let c = BigUint::from(pc[j] - pc[i + 1]);
        a.cmp.holds(&c, &a.bound)
    })
}

/// Truth of `f` at position `i`.
pub fn eval_at(w: &TimedWord, i: usize, f: &F) -> Result<bool, WordError> {
    if i >= w.len() {
        return Err(WordError::OutOfRange {
            position: i,
            len: w.len(),
        });
    }
    Ok(Evaluator::new(w).holds(f).contains(i))
}

/// Truth of `f` at the first position.
pub fn eval_word(w: &TimedWord, f: &F) -> bool {
    Evaluator::new(w).holds(f).contains(0)
}

/// Every position where `f` holds.
pub fn satisfying_positions(w: &TimedWord, f: &F) -> PosSet {
    Evaluator::new(w).holds(f)
}

/// Exactly one of the two words satisfies `f`.
pub fn distinguishes(f: &F, w1: &TimedWord, w2: &TimedWord) -> bool {
    eval_word(w1, f) != eval_word(w2, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn example() -> TimedWord {
        TimedWord::from_triples(&[(&["a", "b"], 3, 10), (&["b"], 7, 10), (&["a"], 11, 10)])
    }

    fn at(w: &TimedWord, i: usize, s: &str) -> bool {
        eval_at(w, i, &parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn semantics_on_the_example_word() {
        let w = example();
        assert!(at(&w, 0, "a"));
        assert!(!at(&w, 0, "C(0,1)>=2 (b)"));
        assert!(at(&w, 0, "C(0,1)>=1 (b)"));
        assert!(at(&w, 0, "true U(0,1){#(b)>=1} a"));
        assert!(!at(&w, 0, "true U(0,1){#(b)>=2} a"));
        assert!(eval_word(&w, &parse_formula("a U[0,1] b").unwrap()));
        assert!(eval_word(&w, &parse_formula("true").unwrap()));
    }

    #[test]
    fn until_is_strict() {
        let w = example();
        // The current point never witnesses, even when 0 is in the interval.
        assert!(!at(&w, 2, "true U[0,1] a"));
        assert!(!at(&w, 1, "a U[0,1] b"));
        // Intermediates only: the left operand need not hold at i or j.
        assert!(at(&w, 0, "b U a"));
        assert!(!at(&w, 0, "a U a"));
    }

    #[test]
    fn count_includes_current_point() {
        let w = example();
        assert!(at(&w, 0, "C[0,1)>=2 (b)"));
        assert!(!at(&w, 0, "C(0,1)>=2 (b)"));
    }

    #[test]
    fn next_and_weak_operators() {
        let w = example();
        assert!(at(&w, 0, "X(0,1) b"));
        assert!(!at(&w, 0, "X[1,2] b"));
        assert!(!at(&w, 2, "X a"));
        assert!(at(&w, 0, "Fw[2,3] a"));
        assert!(!at(&w, 0, "Gw b"));
        assert!(at(&w, 1, "Gw[0,1] (a | b)"));
        assert!(at(&w, 2, "Uw(b, a)"));
    }

    #[test]
    fn out_of_range() {
        let w = example();
        assert!(eval_at(&w, 3, &parse_formula("a").unwrap()).is_err());
    }

    #[test]
    fn distinguishing() {
        let w = example();
        let v = TimedWord::from_triples(&[(&["b"], 0, 1)]);
        assert!(distinguishes(&parse_formula("a").unwrap(), &w, &v));
        assert!(!distinguishes(&parse_formula("a").unwrap(), &w, &w));
        assert!(!distinguishes(&parse_formula("true").unwrap(), &w, &v));
    }
}
