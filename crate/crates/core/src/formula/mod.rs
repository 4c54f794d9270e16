//! Formula syntax: AST, parser, printer, metrics, desugaring and threshold
//! normalization.

mod desugar;
mod fragment;
mod metrics;
mod normalize;
mod parse;
mod render;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::interval::Interval;

pub use desugar::desugar;
pub use fragment::{classify_fragment, Fragment};
pub use metrics::{
    alphabet, counting_depth, depth, intervals, is_pure_mtl, max_constant, modal_depth,
    node_count,
};
pub use normalize::{normalize_thresholds, simplify_trivial};
pub use parse::{parse_formula, ParseError, ParseErrorKind, KEYWORDS};

/// Proposition names are shared, cheap to clone.
pub type Name = Arc<str>;

/// Shared formula handle. Subformulas are reference counted so rewritings can
/// share structure instead of copying it.
pub type F = Arc<Formula>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Ge,
    Gt,
    Eq,
    Le,
    Lt,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
            Cmp::Eq => "=",
            Cmp::Le => "<=",
            Cmp::Lt => "<",
        }
    }

    /// Whether `count cmp bound` holds.
    pub fn holds(self, count: &BigUint, bound: &BigUint) -> bool {
        match self {
            Cmp::Ge => count >= bound,
            Cmp::Gt => count > bound,
            Cmp::Eq => count == bound,
            Cmp::Le => count <= bound,
            Cmp::Lt => count < bound,
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `#counted cmp bound`, counting strictly intermediate positions of an until.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdAtom {
    pub counted: F,
    pub cmp: Cmp,
    pub bound: BigUint,
}

impl ThresholdAtom {
    pub fn new(counted: F, cmp: Cmp, bound: impl Into<BigUint>) -> Self {
        Self {
            counted,
            cmp,
            bound: bound.into(),
        }
    }

    /// `#true >= 0`, the threshold every plain until carries implicitly.
    pub fn is_trivial(&self) -> bool {
        self.cmp == Cmp::Ge && *self.counted == Formula::True && self.bound == BigUint::from(0u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ThresholdExpr {
    Atom(ThresholdAtom),
    Not(Box<ThresholdExpr>),
    And(Box<ThresholdExpr>, Box<ThresholdExpr>),
    Or(Box<ThresholdExpr>, Box<ThresholdExpr>),
}

impl ThresholdExpr {
    pub fn atom(counted: F, cmp: Cmp, bound: impl Into<BigUint>) -> Self {
        ThresholdExpr::Atom(ThresholdAtom::new(counted, cmp, bound))
    }

    pub fn atoms(&self) -> Vec<&ThresholdAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a ThresholdAtom>) {
        match self {
            ThresholdExpr::Atom(a) => out.push(a),
            ThresholdExpr::Not(e) => e.collect_atoms(out),
            ThresholdExpr::And(a, b) | ThresholdExpr::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Evaluate with a per-atom truth assignment. `truth` is called once for
    /// every atom, in `atoms()` order (no short-circuiting), so callers may
    /// index atoms by call count.
    pub fn eval_with(&self, truth: &mut impl FnMut(&ThresholdAtom) -> bool) -> bool {
        match self {
            ThresholdExpr::Atom(a) => truth(a),
            ThresholdExpr::Not(e) => !e.eval_with(truth),
            ThresholdExpr::And(a, b) => {
                let x = a.eval_with(truth);
                b.eval_with(truth) && x
            }
            ThresholdExpr::Or(a, b) => {
                let x = a.eval_with(truth);
                b.eval_with(truth) || x
            }
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, ThresholdExpr::Atom(a) if a.is_trivial())
    }
}

/// CTMTL formulas. `Eventually` through `WeakUntil` are sugar kept for
/// readable output; [`desugar`] expands them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(Name),
    Not(F),
    And(F, F),
    Or(F, F),
    Implies(F, F),
    Until {
        left: F,
        interval: Interval,
        threshold: Option<ThresholdExpr>,
        right: F,
    },
    Count {
        cmp: Cmp,
        bound: BigUint,
        interval: Interval,
        body: F,
    },
    Eventually {
        interval: Interval,
        body: F,
    },
    Always {
        interval: Interval,
        body: F,
    },
    Next {
        interval: Interval,
        body: F,
    },
    WeakEventually {
        interval: Interval,
        body: F,
    },
    WeakAlways {
        interval: Interval,
        body: F,
    },
    WeakUntil {
        left: F,
        interval: Interval,
        right: F,
    },
}

impl Formula {
    /// Until carrying a threshold that is not `#true >= 0`.
    pub fn is_threshold_until(&self) -> bool {
        matches!(self, Formula::Until { threshold: Some(t), .. } if !t.is_trivial())
    }

    pub fn is_counting_modality(&self) -> bool {
        matches!(self, Formula::Count { .. }) || self.is_threshold_until()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render::write_formula(f, self)
    }
}

impl fmt::Display for ThresholdExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render::write_threshold(f, self)
    }
}

/// Constructors returning shared handles.
pub mod build {
    use super::*;

    pub fn tt() -> F {
        Arc::new(Formula::True)
    }

    pub fn ff() -> F {
        Arc::new(Formula::False)
    }

    pub fn prop(name: &str) -> F {
        Arc::new(Formula::Prop(Arc::from(name)))
    }

    pub fn prop_named(name: &Name) -> F {
        Arc::new(Formula::Prop(name.clone()))
    }

    pub fn not(f: F) -> F {
        Arc::new(Formula::Not(f))
    }

    pub fn and(a: F, b: F) -> F {
        Arc::new(Formula::And(a, b))
    }

    pub fn or(a: F, b: F) -> F {
        Arc::new(Formula::Or(a, b))
    }

    pub fn implies(a: F, b: F) -> F {
        Arc::new(Formula::Implies(a, b))
    }

    /// `(a -> b) & (b -> a)`, sharing both operands.
    pub fn iff(a: F, b: F) -> F {
        and(implies(a.clone(), b.clone()), implies(b, a))
    }

    /// Balanced fold, so long chains stay shallow for the recursive passes.
    fn balanced(items: &[F], op: fn(F, F) -> F) -> Option<F> {
        match items {
            [] => None,
            [x] => Some(x.clone()),
            _ => {
                let (l, r) = items.split_at(items.len() / 2);
                Some(op(balanced(l, op)?, balanced(r, op)?))
            }
        }
    }

    /// Conjunction, left-nested up to three operands and balanced beyond;
    /// `true` when empty.
    pub fn and_all(items: impl IntoIterator<Item = F>) -> F {
        let items: Vec<F> = items.into_iter().collect();
        if items.len() <= 3 {
            return items.into_iter().reduce(and).unwrap_or_else(tt);
        }
        balanced(&items, and).unwrap_or_else(tt)
    }

    /// Disjunction, shaped like [`and_all`]; `false` when empty.
    pub fn or_all(items: impl IntoIterator<Item = F>) -> F {
        let items: Vec<F> = items.into_iter().collect();
        if items.len() <= 3 {
            return items.into_iter().reduce(or).unwrap_or_else(ff);
        }
        balanced(&items, or).unwrap_or_else(ff)
    }

    pub fn until(left: F, interval: Interval, right: F) -> F {
        Arc::new(Formula::Until {
            left,
            interval,
            threshold: None,
            right,
        })
    }

    pub fn until_thr(left: F, interval: Interval, threshold: ThresholdExpr, right: F) -> F {
        Arc::new(Formula::Until {
            left,
            interval,
            threshold: Some(threshold),
            right,
        })
    }

    pub fn count(cmp: Cmp, bound: impl Into<BigUint>, interval: Interval, body: F) -> F {
        Arc::new(Formula::Count {
            cmp,
            bound: bound.into(),
            interval,
            body,
        })
    }

    pub fn eventually(interval: Interval, body: F) -> F {
        Arc::new(Formula::Eventually { interval, body })
    }

    pub fn always(interval: Interval, body: F) -> F {
        Arc::new(Formula::Always { interval, body })
    }

    pub fn next(interval: Interval, body: F) -> F {
        Arc::new(Formula::Next { interval, body })
    }

    /// Weak next: true at the last point, otherwise the next point satisfies `body`.
    pub fn weak_next(body: F) -> F {
        not(next(Interval::full(), not(body)))
    }

    pub fn weak_eventually(interval: Interval, body: F) -> F {
        Arc::new(Formula::WeakEventually { interval, body })
    }

    pub fn weak_always(interval: Interval, body: F) -> F {
        Arc::new(Formula::WeakAlways { interval, body })
    }

    /// `Gw body` over the whole future including the current point.
    pub fn globally(body: F) -> F {
        weak_always(Interval::full(), body)
    }

    pub fn weak_until(left: F, interval: Interval, right: F) -> F {
        Arc::new(Formula::WeakUntil {
            left,
            interval,
            right,
        })
    }

    /// `true` iff the current point is the last one.
    pub fn last() -> F {
        not(eventually(Interval::full(), tt()))
    }

    /// At most one of `fs` holds.
    pub fn at_most_one(fs: &[F]) -> F {
        let mut parts = Vec::new();
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                parts.push(not(and(fs[i].clone(), fs[j].clone())));
            }
        }
        and_all(parts)
    }

    /// Exactly one of `fs` holds.
    pub fn exactly_one(fs: &[F]) -> F {
        and(or_all(fs.iter().cloned()), at_most_one(fs))
    }
}

/// Sorted set of proposition names.
pub type Alphabet = BTreeSet<Name>;
