//! Compilation of CTMTL into plain MTL, equisatisfiable modulo temporal
//! projections over strictly monotone words.
//!
//! Pipeline: desugar, threshold normalization, trivial-bound simplification,
//! elimination of unbounded `C`, flattening into temporal definitions, then
//! one elimination per definition. Bounded `C` and `#b < m` untils use
//! counter chains and simple projections; `#b >= n` untils with a bounded
//! window use oversampling.

mod counting;
mod flatten;
mod onf;
mod oversample;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::formula::build::*;
use crate::formula::{
    alphabet, desugar, normalize_thresholds, simplify_trivial, Alphabet, Cmp, Formula, Name,
    ThresholdAtom, ThresholdExpr, F,
};
use crate::interval::Interval;

pub use counting::{
    eliminate_c_bounded, eliminate_c_unbounded, eliminate_ut_le, expand_untimed_threshold_until,
    MAX_BOUND,
};
pub use flatten::{flatten, NameGen, TemporalDefinition};
pub use onf::{act, onf};
pub use oversample::eliminate_ut_ge;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("expected {expected}, found {found}")]
    Shape { expected: &'static str, found: String },
    #[error("interval {0} is unbounded; use the unbounded elimination")]
    UnboundedInterval(Interval),
    #[error("interval {0} is bounded; use the counter construction")]
    BoundedInterval(Interval),
    #[error("C>=0 is trivially true and has no elimination")]
    ZeroThreshold,
    #[error("punctual interval {0} is not supported for #b>=n untils")]
    PunctualUtGe(Interval),
    #[error("constant {0} exceeds the supported maximum {MAX_BOUND}")]
    BoundTooLarge(BigUint),
}

impl TransformError {
    pub fn code(&self) -> &'static str {
        match self {
            TransformError::Shape { .. } => "transform.shape",
            TransformError::UnboundedInterval(_) => "transform.unbounded",
            TransformError::BoundedInterval(_) => "transform.bounded",
            TransformError::ZeroThreshold => "transform.zero",
            TransformError::PunctualUtGe(_) => "transform.punctual",
            TransformError::BoundTooLarge(_) => "transform.bound",
        }
    }
}

/// Which version of the counter formulas to emit. `AsPrinted` keeps the
/// original `κ` and `λ` shapes, which admit spurious models; `Corrected` is
/// sound and complete for the round trip.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    AsPrinted,
    #[default]
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionKind {
    Simple,
    Oversampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Route {
    #[serde(rename = "C-bounded")]
    CBounded,
    #[serde(rename = "UT-le")]
    UtLe,
    #[serde(rename = "UT-ge")]
    UtGe,
}

/// Where a definition's fresh symbols go; read by the witness builder.
#[derive(Debug, Clone)]
pub enum Layout {
    None,
    /// `names[k]` marks counter value `k`, advanced by `counted`.
    Counters { counted: F, names: Vec<Name> },
    Oversampled(OversampleLayout),
}

#[derive(Debug, Clone)]
pub struct OversampleLayout {
    pub left: F,
    pub right: F,
    pub counted: F,
    pub interval: Interval,
    pub n: usize,
    pub l: usize,
    pub u: usize,
    /// `c_0..c_u` on unit-grid points.
    pub markers: Vec<Name>,
    /// `counters[i][k]`: family `B^i` at value `k`.
    pub counters: Vec<Vec<Name>>,
    /// `a_0..a_n`.
    pub maxima: Vec<Name>,
}

/// Result of eliminating one definition. Simple-projection formulas are
/// over `Σ ∪ W ∪ X` and still need relativization; oversampled ones are
/// already relativized.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub formula: F,
    pub fresh: Vec<Name>,
    pub kind: ProjectionKind,
    pub layout: Layout,
}

impl Elimination {
    fn plain(formula: F) -> Self {
        Self {
            formula,
            fresh: Vec::new(),
            kind: ProjectionKind::Simple,
            layout: Layout::None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledDefinition {
    pub definition: TemporalDefinition,
    pub route: Route,
    pub elimination: Elimination,
}

impl CompiledDefinition {
    pub fn kind(&self) -> ProjectionKind {
        self.elimination.kind
    }
}

#[derive(Debug, Clone)]
pub struct CompilationResult {
    pub source: F,
    /// The input after desugaring, normalization and unbounded-C removal.
    pub prepared: F,
    pub top: F,
    pub definitions: Vec<CompiledDefinition>,
    pub mtl_formula: F,
    pub base_alphabet: Alphabet,
    pub witness_alphabet: Alphabet,
    pub fresh_alphabet: Alphabet,
    pub construction: Construction,
    /// The equisatisfiability guarantee only covers strictly monotone models.
    pub assumes_strict_models: bool,
}

impl CompilationResult {
    /// Oversampled if any definition needs inserted points.
    pub fn projection_kind(&self) -> ProjectionKind {
        if self
            .definitions
            .iter()
            .any(|d| d.kind() == ProjectionKind::Oversampled)
        {
            ProjectionKind::Oversampled
        } else {
            ProjectionKind::Simple
        }
    }

    /// Every symbol the projection erases.
    pub fn erased_alphabet(&self) -> Alphabet {
        self.witness_alphabet
            .union(&self.fresh_alphabet)
            .cloned()
            .collect()
    }

    pub fn routes(&self) -> Vec<Route> {
        self.definitions.iter().map(|d| d.route).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct CompileOptions {
    pub construction: Construction,
    /// Base alphabet; defaults to the formula's propositions.
    pub alphabet: Option<Alphabet>,
}

pub fn compile(f: &F) -> Result<CompilationResult, TransformError> {
    compile_with(f, &CompileOptions::default())
}

pub fn compile_with(f: &F, opts: &CompileOptions) -> Result<CompilationResult, TransformError> {
    let mut sigma = alphabet(f);
    if let Some(extra) = &opts.alphabet {
        sigma.extend(extra.iter().cloned());
    }
    let prepared = prepare(f)?;
    let mut names = NameGen::new(sigma.iter().cloned());
    let (top, defs) = flatten(&prepared, &mut names);

    let mut definitions = Vec::with_capacity(defs.len());
    for def in defs {
        let route = route(&def)?;
        let elimination = match route {
            Route::CBounded => eliminate_c_bounded(&def, opts.construction, &mut names)?,
            Route::UtLe => eliminate_ut_le(&def, opts.construction, &mut names)?,
            Route::UtGe => eliminate_ut_ge(&def, &sigma, &mut names)?,
        };
        definitions.push(CompiledDefinition {
            definition: def,
            route,
            elimination,
        });
    }

    let mut relativize = onf::Onf::new(&sigma);
    let act = relativize.act();
    let mut conjuncts = vec![relativize.run(&top)];
    for d in &definitions {
        conjuncts.push(match d.kind() {
            ProjectionKind::Simple => relativize.run(&d.elimination.formula),
            ProjectionKind::Oversampled => d.elimination.formula.clone(),
        });
    }
    let oversampled = definitions
        .iter()
        .any(|d| d.kind() == ProjectionKind::Oversampled);
    if oversampled {
        conjuncts.push(act.clone());
        conjuncts.push(globally(implies(last(), act)));
    } else if !definitions.is_empty() {
        // Simple projections must keep a base symbol on every point.
        conjuncts.push(globally(act));
    }

    let witness_alphabet: Alphabet = definitions
        .iter()
        .map(|d| d.definition.witness.clone())
        .collect();
    let fresh_alphabet: Alphabet = definitions
        .iter()
        .flat_map(|d| d.elimination.fresh.iter().cloned())
        .collect();
    Ok(CompilationResult {
        source: f.clone(),
        prepared,
        top,
        definitions,
        mtl_formula: and_all(conjuncts),
        base_alphabet: sigma,
        witness_alphabet,
        fresh_alphabet,
        construction: opts.construction,
        assumes_strict_models: true,
    })
}

/// Desugar, normalize thresholds, drop trivial bounds, remove unbounded C.
pub fn prepare(f: &F) -> Result<F, TransformError> {
    let g = simplify_trivial(&normalize_thresholds(&desugar(f)));
    let mut memo = HashMap::new();
    remove_unbounded_counts(&g, &mut memo)
}

fn route(def: &TemporalDefinition) -> Result<Route, TransformError> {
    match &*def.body {
        Formula::Count { .. } => Ok(Route::CBounded),
        Formula::Until {
            threshold: Some(ThresholdExpr::Atom(ThresholdAtom { cmp, .. })),
            ..
        } => Ok(if *cmp == Cmp::Ge { Route::UtGe } else { Route::UtLe }),
        _ => Err(TransformError::Shape {
            expected: "a counting modality",
            found: def.body.to_string(),
        }),
    }
}

fn remove_unbounded_counts(
    f: &F,
    memo: &mut HashMap<*const Formula, (F, F)>,
) -> Result<F, TransformError> {
    let key = Arc::as_ptr(f);
    if let Some((_, done)) = memo.get(&key) {
        return Ok(done.clone());
    }
    let mut go = |g: &F| remove_unbounded_counts(g, memo);
    let out = match &**f {
        Formula::True | Formula::False | Formula::Prop(_) => f.clone(),
        Formula::Not(a) => not(go(a)?),
        Formula::And(a, b) => and(go(a)?, go(b)?),
        Formula::Or(a, b) => or(go(a)?, go(b)?),
        Formula::Implies(a, b) => implies(go(a)?, go(b)?),
        Formula::Until {
            left,
            interval,
            threshold,
            right,
        } => {
            let (l, r) = (go(left)?, go(right)?);
            match threshold {
                None => until(l, interval.clone(), r),
                Some(ThresholdExpr::Atom(a)) => {
                    let counted = go(&a.counted)?;
                    let t = ThresholdExpr::atom(counted, a.cmp, a.bound.clone());
                    until_thr(l, interval.clone(), t, r)
                }
                Some(t) => until_thr(l, interval.clone(), t.clone(), r),
            }
        }
        Formula::Count {
            cmp,
            bound,
            interval,
            body,
        } => {
            let c = count(*cmp, bound.clone(), interval.clone(), go(body)?);
            if interval.is_bounded() || *cmp != Cmp::Ge {
                c
            } else {
                eliminate_c_unbounded(&c)?
            }
        }
        _ => {
            let g = desugar(f);
            go(&g)?
        }
    };
    memo.insert(key, (f.clone(), out.clone()));
    Ok(out)
}

/// Every interval of the compiled formula, for syntactic checks.
pub fn output_intervals(r: &CompilationResult) -> BTreeSet<Interval> {
    crate::formula::intervals(&r.mtl_formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{is_pure_mtl, parse_formula};

    fn compiled(s: &str) -> CompilationResult {
        compile(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn mtl_input_is_only_relativized() {
        let r = compiled("a U[0,2] b");
        assert!(r.definitions.is_empty());
        assert!(r.witness_alphabet.is_empty() && r.fresh_alphabet.is_empty());
        assert_eq!(r.mtl_formula.to_string(), "(a | b -> a & (a | b)) U[0,2] ((a | b) & (b & (a | b)))");
    }

    #[test]
    fn single_count_takes_the_simple_route() {
        let r = compiled("C(0,1)>=1 (a)");
        assert_eq!(r.routes(), [Route::CBounded]);
        assert_eq!(r.projection_kind(), ProjectionKind::Simple);
        assert!(is_pure_mtl(&r.mtl_formula));
    }

    #[test]
    fn worked_formula_routes() {
        let r = compiled("a U[0,3] (c & C(2,3)=1 (d U(0,1){#(d & C(0,1)=1 (e))>=1} C(0,1)>=2 (e)))");
        assert_eq!(
            r.routes(),
            [Route::CBounded, Route::CBounded, Route::UtGe, Route::CBounded, Route::CBounded]
        );
        assert_eq!(r.projection_kind(), ProjectionKind::Oversampled);
        assert!(is_pure_mtl(&r.mtl_formula));
        assert!(r.base_alphabet.is_disjoint(&r.erased_alphabet()));
    }

    #[test]
    fn unbounded_counts_disappear_before_flattening() {
        let r = compiled("C[1,inf)>=2 (a)");
        assert!(r.definitions.is_empty());
        assert!(is_pure_mtl(&r.mtl_formula));
    }

    #[test]
    fn punctual_lower_bound_until_is_rejected() {
        let f = parse_formula("a U[1,1]{#(b)>=1} c").unwrap();
        assert_eq!(compile(&f).unwrap_err().code(), "transform.punctual");
    }

    #[test]
    fn fresh_names_avoid_the_base_alphabet() {
        let r = compiled("C(0,1)>=1 (w1) & w1_b0");
        assert!(r.base_alphabet.is_disjoint(&r.erased_alphabet()));
        let again = compiled("C(0,1)>=1 (w1) & w1_b0");
        assert_eq!(again.erased_alphabet(), r.erased_alphabet());
    }
}
