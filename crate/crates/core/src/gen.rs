//! Seeded random generation of timed words and formulas for property tests,
//! the acceptance suite and the CLI's randomized commands.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::formula::build::*;
use crate::formula::{Cmp, Name, ThresholdExpr, F};
use crate::interval::Interval;
use crate::word::{Point, TimedWord};

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct WordParams {
    pub alphabet: Vec<Name>,
    pub max_len: usize,
    /// Timestamps lie in `[0, max_time]`.
    pub max_time: u64,
    /// Candidate denominators; coarse grids make interval boundaries likely.
    pub denominators: Vec<u64>,
    pub strict: bool,
}

impl WordParams {
    pub fn new(alphabet: &[&str], max_len: usize) -> Self {
        Self {
            alphabet: alphabet.iter().map(|s| Arc::from(*s)).collect(),
            max_len,
            max_time: 5,
            denominators: vec![1, 2, 4, 10],
            strict: true,
        }
    }
}

pub fn random_word(rng: &mut impl Rng, p: &WordParams) -> TimedWord {
    let len = rng.gen_range(1..=p.max_len);
    let denom = *p.denominators.choose(rng).expect("some denominator");
    let slots = p.max_time * denom + 1;
    let mut ticks: Vec<u64> = if p.strict {
        let len = len.min(slots as usize);
        let mut chosen = BTreeSet::new();
        while chosen.len() < len {
            chosen.insert(rng.gen_range(0..slots));
        }
        chosen.into_iter().collect()
    } else {
        (0..len).map(|_| rng.gen_range(0..slots)).collect()
    };
    ticks.sort_unstable();
    let points = ticks
        .into_iter()
        .map(|t| Point {
            events: random_events(rng, &p.alphabet),
            time: BigRational::new(BigInt::from(t), BigInt::from(denom)),
        })
        .collect();
    TimedWord::new(points).expect("generated word is valid")
}

fn random_events(rng: &mut impl Rng, alphabet: &[Name]) -> BTreeSet<Name> {
    loop {
        let set: BTreeSet<Name> = alphabet
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        if !set.is_empty() {
            return set;
        }
    }
}

#[derive(Debug, Clone)]
pub struct FormulaParams {
    pub props: Vec<Name>,
    pub max_depth: usize,
    pub max_const: u64,
    pub max_endpoint: u64,
    pub counts: bool,
    pub thresholds: bool,
    /// Threshold expressions with several atoms and boolean structure.
    pub compound_thresholds: bool,
    /// Allow every comparison operator instead of `>=` and `<` only.
    pub all_comparisons: bool,
    pub sugar: bool,
    pub punctual: bool,
    /// Allow unbounded intervals.
    pub unbounded: bool,
}

impl FormulaParams {
    pub fn new(props: &[&str], max_depth: usize) -> Self {
        Self {
            props: props.iter().map(|s| Arc::from(*s)).collect(),
            max_depth,
            max_const: 3,
            max_endpoint: 4,
            counts: true,
            thresholds: true,
            compound_thresholds: false,
            all_comparisons: true,
            sugar: true,
            punctual: true,
            unbounded: true,
        }
    }

    /// Plain MTL: no counting of either kind.
    pub fn mtl(props: &[&str], max_depth: usize) -> Self {
        Self {
            counts: false,
            thresholds: false,
            ..Self::new(props, max_depth)
        }
    }
}

pub fn random_interval(rng: &mut impl Rng, p: &FormulaParams) -> Interval {
    loop {
        let lo = rng.gen_range(0..=p.max_endpoint);
        let lo_closed = rng.gen_bool(0.5);
        if p.unbounded && rng.gen_bool(0.2) {
            return Interval::unbounded(lo, lo_closed);
        }
        let hi = rng.gen_range(lo..=p.max_endpoint);
        if hi == lo {
            if !p.punctual {
                continue;
            }
            return Interval::bounded(lo, lo, true, true);
        }
        return Interval::bounded(lo, hi, lo_closed, rng.gen_bool(0.5));
    }
}

fn random_cmp(rng: &mut impl Rng, p: &FormulaParams) -> Cmp {
    if p.all_comparisons {
        *[Cmp::Ge, Cmp::Gt, Cmp::Eq, Cmp::Le, Cmp::Lt]
            .choose(rng)
            .expect("nonempty")
    } else if rng.gen_bool(0.5) {
        Cmp::Ge
    } else {
        Cmp::Lt
    }
}

fn random_prop(rng: &mut impl Rng, p: &FormulaParams) -> F {
    prop_named(p.props.choose(rng).expect("some proposition"))
}

/// A random formula whose literal depth is at most `p.max_depth`.
pub fn random_formula(rng: &mut impl Rng, p: &FormulaParams) -> F {
    formula_at(rng, p, p.max_depth, 0)
}

fn formula_at(rng: &mut impl Rng, p: &FormulaParams, budget: usize, size: usize) -> F {
    // Size pressure keeps boolean structure from exploding.
    let leaf_bias = 0.25 + 0.15 * size as f64;
    if budget == 0 || rng.gen_bool(leaf_bias.min(0.9)) {
        return boolean_leaf(rng, p);
    }
    let inner = budget - 1;
    let mut kinds = vec![0, 1, 2, 3];
    if p.counts {
        kinds.push(4);
        kinds.push(4);
    }
    if p.thresholds {
        kinds.push(5);
        kinds.push(5);
    }
    if p.sugar {
        kinds.push(6);
    }
    match *kinds.choose(rng).expect("nonempty") {
        0 => not(formula_at(rng, p, budget, size + 1)),
        1 => and(
            formula_at(rng, p, budget, size + 1),
            formula_at(rng, p, budget, size + 1),
        ),
        2 => or(
            formula_at(rng, p, budget, size + 1),
            formula_at(rng, p, budget, size + 1),
        ),
        3 => until(
            formula_at(rng, p, inner, size + 1),
            random_interval(rng, p),
            formula_at(rng, p, inner, size + 1),
        ),
        4 => count(
            random_cmp(rng, p),
            rng.gen_range(0..=p.max_const),
            random_interval(rng, p),
            formula_at(rng, p, inner, size + 1),
        ),
        5 => {
            let threshold = random_threshold(rng, p, inner, size + 1);
            until_thr(
                formula_at(rng, p, inner, size + 1),
                random_interval(rng, p),
                threshold,
                formula_at(rng, p, inner, size + 1),
            )
        }
        _ => {
            let body = formula_at(rng, p, inner, size + 1);
            let interval = random_interval(rng, p);
            match rng.gen_range(0..6) {
                0 => eventually(interval, body),
                1 => always(interval, body),
                2 => next(interval, body),
                3 => weak_eventually(interval, body),
                4 => weak_always(interval, body),
                _ => weak_until(formula_at(rng, p, inner, size + 1), interval, body),
            }
        }
    }
}

fn boolean_leaf(rng: &mut impl Rng, p: &FormulaParams) -> F {
    match rng.gen_range(0..10) {
        0 => tt(),
        1 => not(random_prop(rng, p)),
        _ => random_prop(rng, p),
    }
}

fn random_threshold(rng: &mut impl Rng, p: &FormulaParams, budget: usize, size: usize) -> ThresholdExpr {
    let shape = if p.compound_thresholds { 2 } else { 0 };
    threshold_tree(rng, p, budget, size, shape)
}

fn threshold_tree(
    rng: &mut impl Rng,
    p: &FormulaParams,
    budget: usize,
    size: usize,
    levels: usize,
) -> ThresholdExpr {
    if levels == 0 || rng.gen_bool(0.3) {
        let counted = formula_at(rng, p, budget, size + 1);
        let cmp = random_cmp(rng, p);
        return ThresholdExpr::atom(counted, cmp, rng.gen_range(0..=p.max_const));
    }
    let sub = |rng: &mut _| Box::new(threshold_tree(rng, p, budget, size + 1, levels - 1));
    match rng.gen_range(0..3) {
        0 => ThresholdExpr::Not(sub(rng)),
        1 => ThresholdExpr::And(sub(rng), sub(rng)),
        _ => ThresholdExpr::Or(sub(rng), sub(rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::depth;

    #[test]
    fn words_are_valid_and_reproducible() {
        let p = WordParams::new(&["a", "b"], 8);
        let sample = |seed| {
            let mut r = rng(seed);
            (0..20).map(|_| random_word(&mut r, &p)).collect::<Vec<_>>()
        };
        let (a, b) = (sample(7), sample(7));
        assert_eq!(a, b);
        assert!(a.iter().all(|w| w.require_strict().is_ok() && w.len() <= 8));
    }

    #[test]
    fn formulas_respect_depth() {
        let mut p = FormulaParams::new(&["a", "b"], 2);
        p.compound_thresholds = true;
        let mut r = rng(3);
        for _ in 0..200 {
            let f = random_formula(&mut r, &p);
            assert!(depth(&f) <= 2, "{f}");
        }
    }
}
