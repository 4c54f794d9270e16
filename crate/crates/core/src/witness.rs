//! Witness extensions that justify the compilation, and the round trip that
//! checks it.
//!
//! Simple definitions get their witness proposition and a counter value on
//! every action point. Oversampled definitions additionally need unit-grid
//! points: every integer strictly between the first and last point gets a
//! point if it has none, and those inserted points carry fresh symbols only.
//! All oversampled definitions share the inserted points.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::eval::{eval_word, Evaluator};
use crate::formula::{Alphabet, Name, F};
use crate::gen::rng;
use crate::posset::PosSet;
use crate::transform::{
    compile_with, CompilationResult, CompileOptions, CompiledDefinition, Construction, Layout,
    OversampleLayout, ProjectionKind, TemporalDefinition, TransformError,
};
use crate::word::{oversampled_projection, simple_projection, Monotonicity, Point, TimedWord, WordError};

/// Refuse to insert more grid points than this.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("witness constructions need a strictly monotone word")]
    WeakWord,
    #[error("definition {witness} uses {found:?} projections, not {expected:?}")]
    WrongKind {
        witness: Name,
        expected: ProjectionKind,
        found: ProjectionKind,
    },
    #[error("the word spans more than {MAX_GRID_POINTS} integer points")]
    TooManyGridPoints,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl WitnessError {
    pub fn code(&self) -> &'static str {
        match self {
            WitnessError::WeakWord => "witness.weak",
            WitnessError::WrongKind { .. } => "witness.kind",
            WitnessError::TooManyGridPoints => "witness.grid",
            WitnessError::Word(e) => e.code(),
            WitnessError::Transform(e) => e.code(),
        }
    }
}

/// How to annotate a word for one compiled definition.
#[derive(Debug, Clone)]
pub struct AnnotationPlan {
    pub definition: TemporalDefinition,
    pub kind: ProjectionKind,
    pub layout: Layout,
    /// Points carrying a symbol of `sigma` are action points.
    pub sigma: Alphabet,
}

impl AnnotationPlan {
    pub fn new(d: &CompiledDefinition, sigma: &Alphabet) -> Self {
        Self {
            definition: d.definition.clone(),
            kind: d.kind(),
            layout: d.elimination.layout.clone(),
            sigma: sigma.clone(),
        }
    }

    /// One plan per definition, innermost first.
    pub fn all(r: &CompilationResult) -> Vec<Self> {
        r.definitions
            .iter()
            .map(|d| Self::new(d, &r.base_alphabet))
            .collect()
    }

    fn expect(&self, kind: ProjectionKind) -> Result<(), WitnessError> {
        if self.kind != kind {
            return Err(WitnessError::WrongKind {
                witness: self.definition.witness.clone(),
                expected: kind,
                found: self.kind,
            });
        }
        Ok(())
    }
}

fn require_strict(w: &TimedWord) -> Result<(), WitnessError> {
    match w.monotonicity() {
        Monotonicity::Strict => Ok(()),
        Monotonicity::Weak => Err(WitnessError::WeakWord),
    }
}

/// Working copy of a word whose points may temporarily lack events.
struct Draft {
    points: Vec<Point>,
    actions: Vec<usize>,
}

impl Draft {
    fn new(points: Vec<Point>, sigma: &Alphabet) -> Self {
        let actions = (0..points.len())
            .filter(|&p| points[p].touches(sigma))
            .collect();
        Self { points, actions }
    }

    /// The action points alone, which is what the base formulas talk about.
    fn action_word(&self) -> Result<TimedWord, WordError> {
        TimedWord::new(self.actions.iter().map(|&p| self.points[p].clone()).collect())
    }

    /// Truth of each formula at every point; false off action points.
    fn truth(&self, fs: &[&F]) -> Result<Vec<Vec<bool>>, WordError> {
        let word = self.action_word()?;
        let mut ev = Evaluator::new(&word);
        Ok(fs
            .iter()
            .map(|f| self.spread(&ev.holds(f)))
            .collect())
    }

    fn spread(&self, on_actions: &PosSet) -> Vec<bool> {
        let mut out = vec![false; self.points.len()];
        for (q, &p) in self.actions.iter().enumerate() {
            out[p] = on_actions.contains(q);
        }
        out
    }

    fn mark(&mut self, p: usize, name: &Name) {
        self.points[p].events.insert(name.clone());
    }

    fn add_witness(&mut self, def: &TemporalDefinition) -> Result<(), WordError> {
        let holds = self.truth(&[&def.body])?.remove(0);
        for p in 0..self.points.len() {
            if holds[p] {
                self.mark(p, &def.witness);
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<TimedWord, WordError> {
        TimedWord::new(self.points)
    }
}

/// Add the witness of a simple-projection definition and, for counter
/// routes, the counter chain: the first action point carries `b_0` and each
/// later action point carries the number of earlier-or-equal action points
/// after the first that satisfy the counted formula, modulo the chain length.
pub fn build_counter_annotation(w: &TimedWord, plan: &AnnotationPlan) -> Result<TimedWord, WitnessError> {
    require_strict(w)?;
    plan.expect(ProjectionKind::Simple)?;
    let mut d = Draft::new(w.points().to_vec(), &plan.sigma);
    d.add_witness(&plan.definition)?;
    if let Layout::Counters { counted, names } = &plan.layout {
        let holds = d.truth(&[counted])?.remove(0);
        let mut value = 0;
        for (q, p) in d.actions.clone().into_iter().enumerate() {
            if q > 0 && holds[p] {
                value = (value + 1) % names.len();
            }
            d.mark(p, &names[value]);
        }
    }
    Ok(d.finish()?)
}

fn integer_of(t: &BigRational) -> Option<BigInt> {
    t.is_integer().then(|| t.to_integer())
}

/// Insert a point at every integer strictly between the first and last
/// point that does not have one yet.
fn insert_grid(points: &mut Vec<Point>) -> Result<(), WitnessError> {
    let (first, last) = (points[0].time.clone(), points[points.len() - 1].time.clone());
    let lo: BigInt = first.floor().to_integer() + 1;
    let hi: BigInt = last.ceil().to_integer() - 1;
    if hi >= lo && (&hi - &lo).to_usize().map_or(true, |n| n >= MAX_GRID_POINTS) {
        return Err(WitnessError::TooManyGridPoints);
    }
    let present: BTreeSet<BigInt> = points.iter().filter_map(|p| integer_of(&p.time)).collect();
    let mut g = lo;
    while g <= hi {
        if !present.contains(&g) {
            points.push(Point {
                events: BTreeSet::new(),
                time: BigRational::from_integer(g.clone()),
            });
        }
        g += 1;
    }
    points.sort_by(|a, b| a.time.cmp(&b.time));
    Ok(())
}

fn residue(g: &BigInt, m: usize) -> usize {
    (g % BigInt::from(m)).to_usize().expect("non-negative time")
}

/// Add the witness of an oversampled definition together with its grid
/// markers, counter families and maxima, inserting grid points as needed.
pub fn build_oversampled_annotation(
    w: &TimedWord,
    plan: &AnnotationPlan,
) -> Result<TimedWord, WitnessError> {
    require_strict(w)?;
    plan.expect(ProjectionKind::Oversampled)?;
    let Layout::Oversampled(lay) = &plan.layout else {
        unreachable!("oversampled definitions carry an oversampled layout")
    };
    let mut points = w.points().to_vec();
    insert_grid(&mut points)?;
    let mut d = Draft::new(points, &plan.sigma);
    d.add_witness(&plan.definition)?;
    let truth = d.truth(&[&lay.left, &lay.right, &lay.counted])?;
    let len = d.points.len();
    let m = lay.u + 1;

    let marker: Vec<Option<usize>> = d
        .points
        .iter()
        .map(|p| integer_of(&p.time).map(|g| residue(&g, m)))
        .collect();
    let families: Vec<Vec<Option<usize>>> = (0..m)
        .map(|i| counter_family(lay, &marker, &truth[2], i))
        .collect();
    let maxima: Vec<Option<usize>> = (0..len)
        .map(|j| max_witnessed(lay, &d, &truth, &families, j))
        .collect();

    for p in 0..len {
        if let Some(g) = marker[p] {
            d.mark(p, &lay.markers[g]);
        }
        for (i, family) in families.iter().enumerate() {
            if let Some(v) = family[p] {
                d.mark(p, &lay.counters[i][v]);
            }
        }
        if let Some(h) = maxima[p] {
            d.mark(p, &lay.maxima[h]);
        }
    }
    Ok(d.finish()?)
}

/// Values of `B^i`: zero at `c_i`, absent from `c_{i⊕L}` until the next
/// `c_i` and before the first one, otherwise the previous value advanced by
/// the previous point's `b`, saturating at `n`.
fn counter_family(
    lay: &OversampleLayout,
    marker: &[Option<usize>],
    counted: &[bool],
    i: usize,
) -> Vec<Option<usize>> {
    let stop = (i + lay.u - lay.l) % (lay.u + 1);
    let mut out: Vec<Option<usize>> = Vec::with_capacity(marker.len());
    for p in 0..marker.len() {
        let value = if marker[p] == Some(i) {
            Some(0)
        } else if marker[p] == Some(stop) || p == 0 {
            None
        } else {
            out[p - 1].map(|v| (v + usize::from(counted[p - 1])).min(lay.n))
        };
        out.push(value);
    }
    out
}

/// `h` such that action point `j` carries `a_h`: the largest counter value
/// over until witnesses in the window at or after the grid point `α` in
/// `(t_j + l, t_j + l + 1]`. None when `α` does not exist or no witness
/// lies at or after it. Ties in time cannot occur, so the value is unique.
fn max_witnessed(
    lay: &OversampleLayout,
    d: &Draft,
    truth: &[Vec<bool>],
    families: &[Vec<Option<usize>>],
    j: usize,
) -> Option<usize> {
    let (x, y) = (&truth[0], &truth[1]);
    let pts = &d.points;
    if !d.actions.contains(&j) {
        return None;
    }
    let alpha: BigInt = (&pts[j].time + BigRational::from_integer(lay.l.into()))
        .floor()
        .to_integer()
        + 1;
    let alpha_time = BigRational::from_integer(alpha.clone());
    if alpha_time > pts[pts.len() - 1].time {
        return None;
    }
    let family = &families[residue(&alpha, lay.u + 1)];
    let mut best = None;
    for k in j + 1..pts.len() {
        let action = d.actions.binary_search(&k).is_ok();
        let in_window = lay.interval.contains(&(&pts[k].time - &pts[j].time));
        if action && y[k] && in_window && pts[k].time >= alpha_time {
            best = best.max(family[k]);
        }
        if action && !x[k] {
            break;
        }
    }
    best
}

/// Witnesses of every definition, then every annotation, giving the
/// extension the compiled formula is about.
pub fn extend(r: &CompilationResult, w: &TimedWord) -> Result<TimedWord, WitnessError> {
    require_strict(w)?;
    let mut out = w.clone();
    for plan in AnnotationPlan::all(r) {
        out = match plan.kind {
            ProjectionKind::Simple => build_counter_annotation(&out, &plan)?,
            ProjectionKind::Oversampled => build_oversampled_annotation(&out, &plan)?,
        };
    }
    Ok(out)
}

/// The projection recorded by the compilation.
pub fn project(r: &CompilationResult, w: &TimedWord) -> Result<TimedWord, WordError> {
    let erased = r.erased_alphabet();
    match r.projection_kind() {
        ProjectionKind::Simple => simple_projection(w, &erased),
        ProjectionKind::Oversampled => oversampled_projection(w, &erased),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RoundtripOptions {
    pub construction: Construction,
    /// Random mutations of the extension per instance.
    pub mutations: usize,
    pub seed: u64,
}

impl Default for RoundtripOptions {
    fn default() -> Self {
        Self {
            construction: Construction::Corrected,
            mutations: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub projection: ProjectionKind,
    /// `w ⊨ f`.
    pub satisfied: bool,
    /// The constructed extension satisfies the compiled formula.
    pub extension_satisfies: bool,
    pub extension_len: usize,
    /// The extension is a model exactly when `w` is.
    pub forward: bool,
    /// Projecting the extension gives back `w`.
    pub recovers: bool,
    pub backward: bool,
    pub mutations: usize,
    /// Mutations that still satisfy the compiled formula.
    pub mutated_models: usize,
    /// Mutated models whose projection is undefined or violates `f`.
    pub spurious: usize,
    pub counterexample: Option<String>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.forward && self.backward && self.spurious == 0
    }
}

/// Compile `f` over the symbols of `f` and `w`, then run the round trip.
pub fn roundtrip_check(
    f: &F,
    w: &TimedWord,
    opts: &RoundtripOptions,
) -> Result<RoundtripReport, WitnessError> {
    require_strict(w)?;
    let r = compile_with(
        f,
        &CompileOptions {
            construction: opts.construction,
            alphabet: Some(w.alphabet()),
        },
    )?;
    roundtrip_compiled(&r, w, opts)
}

/// The round trip for an existing compilation whose base alphabet covers `w`.
pub fn roundtrip_compiled(
    r: &CompilationResult,
    w: &TimedWord,
    opts: &RoundtripOptions,
) -> Result<RoundtripReport, WitnessError> {
    let ext = extend(r, w)?;
    let satisfied = eval_word(w, &r.source);
    let extension_satisfies = eval_word(&ext, &r.mtl_formula);
    let back = project(r, &ext)?;
    let recovers = back == *w;
    let backward = recovers && (!extension_satisfies || eval_word(&back, &r.source));

    let symbols: Vec<Name> = r
        .base_alphabet
        .iter()
        .chain(&r.erased_alphabet())
        .cloned()
        .collect();
    let mut rng = rng(opts.seed);
    let (mut mutations, mut mutated_models, mut spurious) = (0, 0, 0);
    let mut counterexample = None;
    for _ in 0..opts.mutations {
        let Some(m) = mutate(&mut rng, &ext, &symbols) else {
            continue;
        };
        mutations += 1;
        if !eval_word(&m, &r.mtl_formula) {
            continue;
        }
        mutated_models += 1;
        let fine = project(r, &m).is_ok_and(|p| eval_word(&p, &r.source));
        if !fine {
            spurious += 1;
            counterexample.get_or_insert_with(|| m.to_trace());
        }
    }
    Ok(RoundtripReport {
        projection: r.projection_kind(),
        satisfied,
        extension_satisfies,
        extension_len: ext.len(),
        forward: extension_satisfies == satisfied,
        recovers,
        backward,
        mutations,
        mutated_models,
        spurious,
        counterexample,
    })
}

/// One or two local edits: toggle a symbol, delete a point, insert a point
/// or move one. None when the edits produce an invalid word.
pub fn mutate(rng: &mut impl Rng, w: &TimedWord, symbols: &[Name]) -> Option<TimedWord> {
    let mut points = w.points().to_vec();
    for _ in 0..rng.gen_range(1..=2) {
        let p = rng.gen_range(0..points.len());
        match rng.gen_range(0..6) {
            0..=2 => {
                let s = symbols.choose(rng)?;
                if !points[p].events.remove(s) {
                    points[p].events.insert(s.clone());
                }
            }
            3 if points.len() > 1 => {
                points.remove(p);
            }
            4 => {
                let at = rng.gen_range(0..=points.len());
                let time = time_between(rng, &points, at)?;
                let events = (0..rng.gen_range(1..=2))
                    .filter_map(|_| symbols.choose(rng).cloned())
                    .collect();
                points.insert(at, Point { events, time });
            }
            _ => {
                let moved = points.remove(p);
                let time = time_between(rng, &points, p)?;
                points.insert(p, Point { time, ..moved });
            }
        }
    }
    let out = TimedWord::new(points).ok()?;
    (out.monotonicity() == Monotonicity::Strict).then_some(out)
}

/// A time strictly between the neighbours of slot `at`, or at most one unit
/// past the end.
fn time_between(rng: &mut impl Rng, points: &[Point], at: usize) -> Option<BigRational> {
    let frac = BigRational::new(rng.gen_range(1..8).into(), 8.into());
    let zero = BigRational::from_integer(0.into());
    match (at.checked_sub(1).map(|k| &points[k].time), points.get(at).map(|p| &p.time)) {
        (Some(lo), Some(hi)) => Some(lo + (hi - lo) * frac),
        (Some(lo), None) => Some(lo + frac),
        (None, Some(hi)) if *hi > zero => Some(hi * frac),
        (None, Some(_)) => None,
        (None, None) => Some(frac),
    }
}
