//! Counter-chain eliminations (simple projections) and the two exact
//! rewrites: unbounded C and untimed threshold until.

use num_bigint::BigUint;
use num_traits::Zero;

use super::flatten::{NameGen, TemporalDefinition};
use super::{Construction, Elimination, Layout, ProjectionKind, TransformError};
use crate::formula::build::*;
use crate::formula::{Cmp, Formula, Name, ThresholdExpr, F};
use crate::interval::Interval;

pub(crate) fn small(n: &BigUint) -> Result<usize, TransformError> {
    usize::try_from(n)
        .ok()
        .filter(|&n| n <= MAX_BOUND)
        .ok_or_else(|| TransformError::BoundTooLarge(n.clone()))
}

/// Counting constants above this are refused; the constructions unroll them.
pub const MAX_BOUND: usize = 1024;

/// `⟦φ1, φ2, ζ, m⟧`: `m` nested untils, `ζ` alone when `m = 0`.
fn nested(phi1: &F, phi2: &F, zeta: &F, m: usize) -> F {
    match m {
        0 => zeta.clone(),
        1 => until(phi1.clone(), Interval::full(), zeta.clone()),
        _ => until(
            phi1.clone(),
            Interval::full(),
            and(phi2.clone(), nested(phi1, phi2, zeta, m - 1)),
        ),
    }
}

/// Equivalent MTL for `C_I>=n b` with an unbounded interval.
pub fn eliminate_c_unbounded(f: &F) -> Result<F, TransformError> {
    let Formula::Count {
        cmp: Cmp::Ge,
        bound,
        interval,
        body,
    } = &**f
    else {
        return Err(TransformError::Shape {
            expected: "C_I>=n b",
            found: f.to_string(),
        });
    };
    if interval.is_bounded() {
        return Err(TransformError::BoundedInterval(interval.clone()));
    }
    if bound.is_zero() {
        return Err(TransformError::ZeroThreshold);
    }
    let n = small(bound)?;
    let b = body.clone();
    let rest = nested(&not(b.clone()), &b, &b, n - 1);
    let first = if n == 1 { b.clone() } else { and(b.clone(), rest) };
    let later = eventually(interval.clone(), first.clone());
    // The current point is in its own window exactly when 0 ∈ I.
    Ok(if interval.contains_zero() {
        or(first, later)
    } else {
        later
    })
}

/// `x U_{#b>=n} y` as nested plain untils, each consuming one intermediate `b`.
pub fn expand_untimed_threshold_until(x: &F, b: &F, n: usize, y: &F) -> F {
    let mut out = until(x.clone(), Interval::full(), y.clone());
    for _ in 0..n {
        out = until(
            x.clone(),
            Interval::full(),
            and(and(x.clone(), b.clone()), out),
        );
    }
    out
}

/// Counter chain `b_0..b_{m-1}` advanced by `counted` at the next point:
/// seeded at the first point, exactly one value per point.
fn counter_chain(counted: &F, names: &[Name]) -> F {
    let m = names.len();
    let b = |k: usize| prop_named(&names[k % m]);
    let full = Interval::full;
    let mut parts = vec![b(0)];
    for k in 0..m {
        let step = implies(
            and(next(full(), counted.clone()), b(k)),
            next(full(), b(k + 1)),
        );
        let stay = implies(
            and(next(full(), not(counted.clone())), b(k)),
            next(full(), b(k)),
        );
        parts.push(globally(step));
        parts.push(globally(stay));
    }
    let all: Vec<F> = (0..m).map(b).collect();
    parts.push(globally(exactly_one(&all)));
    and_all(parts)
}

fn counter_names(witness: &Name, m: usize, names: &mut NameGen) -> Vec<Name> {
    (0..m)
        .map(|k| names.fresh(&format!("{witness}_b{k}")))
        .collect()
}

/// `Gw[a <-> C_I>=n b]` with a bounded interval, by a counter chain modulo
/// `n + 1`. Valid modulo simple projections over strictly monotone words.
pub fn eliminate_c_bounded(
    def: &TemporalDefinition,
    construction: Construction,
    names: &mut NameGen,
) -> Result<Elimination, TransformError> {
    let Formula::Count {
        cmp: Cmp::Ge,
        bound,
        interval,
        body,
    } = &*def.body
    else {
        return Err(TransformError::Shape {
            expected: "C_I>=n b",
            found: def.body.to_string(),
        });
    };
    if !interval.is_bounded() {
        return Err(TransformError::UnboundedInterval(interval.clone()));
    }
    let a = prop_named(&def.witness);
    let n = small(bound)?;
    if n == 0 {
        return Ok(Elimination::plain(globally(iff(a, tt()))));
    }
    let xs = counter_names(&def.witness, n + 1, names);
    let bk = |k: usize| prop_named(&xs[k]);
    let kappa = match construction {
        Construction::AsPrinted => {
            and_all((1..=n).map(|k| eventually(interval.clone(), bk(k))))
        }
        Construction::Corrected => {
            // Consecutive in-window b-points carry consecutive counter
            // values, so at least n of the n+1 values appear iff there are
            // at least n such points.
            let seen = |v: usize| {
                let here = and(body.clone(), bk(v));
                let later = eventually(interval.clone(), here.clone());
                if interval.contains_zero() {
                    or(here, later)
                } else {
                    later
                }
            };
            let seen: Vec<F> = (0..=n).map(seen).collect();
            or_all((0..=n).map(|g| {
                and_all((0..=n).filter(|&v| v != g).map(|v| seen[v].clone()))
            }))
        }
    };
    let zeta = and(counter_chain(body, &xs), globally(iff(a, kappa)));
    Ok(Elimination {
        formula: zeta,
        fresh: xs.clone(),
        kind: ProjectionKind::Simple,
        layout: Layout::Counters {
            counted: body.clone(),
            names: xs,
        },
    })
}

/// `Gw[a <-> x U_{I,#b<m} y]` by a counter chain modulo `m`. Valid modulo
/// simple projections over strictly monotone words.
pub fn eliminate_ut_le(
    def: &TemporalDefinition,
    construction: Construction,
    names: &mut NameGen,
) -> Result<Elimination, TransformError> {
    let (x, interval, atom, y) = threshold_until(def)?;
    if atom.cmp != Cmp::Lt {
        return Err(TransformError::Shape {
            expected: "x U_{I,#b<m} y",
            found: def.body.to_string(),
        });
    }
    let a = prop_named(&def.witness);
    let m = small(&atom.bound)?;
    if m == 0 {
        return Ok(Elimination::plain(globally(iff(a, ff()))));
    }
    let b = atom.counted.clone();
    let xs = counter_names(&def.witness, m, names);
    let bk = |k: usize| prop_named(&xs[k]);
    let lambda = match construction {
        Construction::AsPrinted => {
            // #b <= n with n = m - 1.
            let left = or_all((1..m).map(|k| and(x.clone(), not(bk(k)))));
            until(left, interval.clone(), y.clone())
        }
        Construction::Corrected => {
            // Fewer than m intermediate b-points never bring the counter
            // back to its value at the current point.
            or_all((0..m).map(|v| {
                let left = and(x.clone(), not(and(b.clone(), bk(v))));
                and(bk(v), until(left, interval.clone(), y.clone()))
            }))
        }
    };
    let zeta = and(counter_chain(&b, &xs), globally(iff(a, lambda)));
    Ok(Elimination {
        formula: zeta,
        fresh: xs.clone(),
        kind: ProjectionKind::Simple,
        layout: Layout::Counters {
            counted: b,
            names: xs,
        },
    })
}

pub(crate) fn threshold_until(
    def: &TemporalDefinition,
) -> Result<(F, Interval, crate::formula::ThresholdAtom, F), TransformError> {
    if let Formula::Until {
        left,
        interval,
        threshold: Some(ThresholdExpr::Atom(atom)),
        right,
    } = &*def.body
    {
        return Ok((left.clone(), interval.clone(), atom.clone(), right.clone()));
    }
    Err(TransformError::Shape {
        expected: "x U_{I,#b~n} y",
        found: def.body.to_string(),
    })
}
