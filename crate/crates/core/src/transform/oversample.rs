//! `Gw[a <-> x U_{I,#b>=n} y]` through oversampled behaviours.
//!
//! Bounded windows are split at the unit-grid point `α` in `(t_j+l, t_j+l+1]`.
//! Grid points carry markers `c_0..c_u` cycling modulo `u+1`; marker `c_i`
//! resets a saturating counter family `B^i` that reads `min(n, #b in [α, k))`
//! at every later point `k` before `c_{i⊕L}`, `L = u - l`, and is absent from
//! `c_{i⊕L}` up to the next `c_i`. The markers `a_h` record the largest
//! counter value over witnesses at or after `α`, and the count from `j` to `α`
//! is checked by an untimed threshold until.

use super::counting::{expand_untimed_threshold_until, small, threshold_until};
use super::flatten::{NameGen, TemporalDefinition};
use super::onf::{globally_act, Onf};
use super::{Elimination, Layout, OversampleLayout, ProjectionKind, TransformError};
use crate::formula::build::*;
use crate::formula::{Alphabet, Cmp, Name, F};
use crate::interval::Interval;

pub fn eliminate_ut_ge(
    def: &TemporalDefinition,
    sigma: &Alphabet,
    names: &mut NameGen,
) -> Result<Elimination, TransformError> {
    let (x, interval, atom, y) = threshold_until(def)?;
    if atom.cmp != Cmp::Ge {
        return Err(TransformError::Shape {
            expected: "x U_{I,#b>=n} y",
            found: def.body.to_string(),
        });
    }
    let a = prop_named(&def.witness);
    let b = atom.counted.clone();
    let n = small(&atom.bound)?;
    if n == 0 {
        let body = until(x, interval, y);
        return Ok(Elimination::plain(globally(iff(a, body))));
    }
    if !interval.is_bounded() {
        // The latest in-window witness also has the most intermediate b's.
        let timed = until(x.clone(), interval, y.clone());
        let counted = expand_untimed_threshold_until(&x, &b, n, &y);
        return Ok(Elimination::plain(globally(iff(a, and(timed, counted)))));
    }
    if interval.is_punctual() {
        return Err(TransformError::PunctualUtGe(interval));
    }
    let l = small(interval.lo())?;
    let u = small(interval.hi().expect("bounded"))?;

    let w = &def.witness;
    let markers: Vec<Name> = (0..=u).map(|g| names.fresh(&format!("{w}_c{g}"))).collect();
    let counters: Vec<Vec<Name>> = (0..=u)
        .map(|i| (0..=n).map(|k| names.fresh(&format!("{w}_B{i}_{k}"))).collect())
        .collect();
    let maxima: Vec<Name> = (0..=n).map(|h| names.fresh(&format!("{w}_a{h}"))).collect();

    let mut onf = Onf::new(sigma);
    let act = onf.act();
    let xr = or(not(act.clone()), onf.run(&x));
    let yr = onf.at_act(&y);
    let bb = onf.at_act(&b);

    let parts = Parts {
        n,
        l,
        u,
        c: markers.iter().map(prop_named).collect(),
        bk: counters
            .iter()
            .map(|row| row.iter().map(prop_named).collect())
            .collect(),
    };
    let mut conjuncts = vec![act.clone(), globally(implies(last(), act.clone()))];
    conjuncts.extend(parts.grid());
    for i in 0..=u {
        conjuncts.extend(parts.counter_family(i, &bb));
    }

    // α's marker, when α exists.
    let anchor = Interval::bounded(l as u64, l as u64 + 1, false, true);
    let at_alpha: Vec<F> = (0..=u)
        .map(|i| eventually(anchor.clone(), parts.c[i].clone()))
        .collect();
    let reaches = |i: usize, h: usize| {
        let target = and(yr.clone(), parts.bk[i][h].clone());
        until(xr.clone(), interval.clone(), target)
    };
    let reach: Vec<Vec<F>> = (0..=u)
        .map(|i| (0..=n).map(|h| reaches(i, h)).collect())
        .collect();

    let mut maxima_defs = Vec::new();
    for h in 0..=n {
        let cases = (0..=u).map(|i| {
            let above = (h + 1..=n).map(|g| not(reach[i][g].clone()));
            and_all(
                [at_alpha[i].clone(), reach[i][h].clone()]
                    .into_iter()
                    .chain(above),
            )
        });
        maxima_defs.push(iff(prop_named(&maxima[h]), or_all(cases)));
    }
    conjuncts.push(globally_act(&act, and_all(maxima_defs)));

    // λ1: a witness at or after α; b's in (j, α) make up the rest.
    let before = |i: usize| and(xr.clone(), not(parts.c[i].clone()));
    let lambda1 = or_all((0..=n).map(|h| {
        let per_i = (0..=u).map(|i| {
            let prefix = expand_untimed_threshold_until(&before(i), &bb, n - h, &parts.c[i]);
            and(at_alpha[i].clone(), prefix)
        });
        and(prop_named(&maxima[h]), or_all(per_i))
    }));
    // λ3: every witness lies strictly before α, or α does not exist.
    let early = (0..=u).map(|i| {
        let stop = and(yr.clone(), not(parts.c[i].clone()));
        and_all([
            at_alpha[i].clone(),
            until(before(i), interval.clone(), stop.clone()),
            expand_untimed_threshold_until(&before(i), &bb, n, &stop),
        ])
    });
    let no_alpha = and_all([
        not(eventually(anchor, parts.any_c())),
        until(xr.clone(), interval.clone(), yr.clone()),
        expand_untimed_threshold_until(&xr, &bb, n, &yr),
    ]);
    let lambda3 = or(or_all(early), no_alpha);
    conjuncts.push(globally_act(&act, iff(a, or(lambda1, lambda3))));

    let mut fresh = markers.clone();
    fresh.extend(counters.iter().flatten().cloned());
    fresh.extend(maxima.iter().cloned());
    Ok(Elimination {
        formula: and_all(conjuncts),
        fresh,
        kind: ProjectionKind::Oversampled,
        layout: Layout::Oversampled(OversampleLayout {
            left: x,
            right: y,
            counted: b,
            interval,
            n,
            l,
            u,
            markers,
            counters,
            maxima,
        }),
    })
}

struct Parts {
    n: usize,
    l: usize,
    u: usize,
    c: Vec<F>,
    bk: Vec<Vec<F>>,
}

impl Parts {
    fn any_c(&self) -> F {
        or_all(self.c.iter().cloned())
    }

    /// Markers sit on a unit grid covering the word and cycle modulo `u+1`.
    /// Only non-punctual intervals are used: no marker within (0,1) of a
    /// marker, and one within (0,1] unless the word ends first.
    fn grid(&self) -> Vec<F> {
        let c = self.any_c();
        let full = Interval::full;
        let beyond_one = || eventually(Interval::unbounded(1, true), tt());
        let unit = || Interval::bounded(0, 1, false, true);
        let mut out = vec![
            globally(at_most_one(&self.c)),
            or_all([c.clone(), eventually(unit(), c.clone()), not(beyond_one())]),
            globally(implies(
                c.clone(),
                and(
                    not(eventually(Interval::bounded(0, 1, false, false), c.clone())),
                    or(eventually(unit(), c.clone()), not(beyond_one())),
                ),
            )),
        ];
        let m = self.u + 1;
        for g in 0..m {
            out.push(globally(implies(
                self.c[g].clone(),
                or(
                    until(not(c.clone()), full(), self.c[(g + 1) % m].clone()),
                    not(eventually(full(), c.clone())),
                ),
            )));
        }
        out
    }

    /// `B^i`: reset at `c_i`, exclusive saturating count of `bb`, absent from
    /// `c_{i⊕L}` to the next `c_i` and before the first `c_i`.
    fn counter_family(&self, i: usize, bb: &F) -> Vec<F> {
        let m = self.u + 1;
        let (ci, stop) = (&self.c[i], &self.c[(i + self.u - self.l) % m]);
        let b = &self.bk[i];
        let any = or_all(b.iter().cloned());
        let reset_or = |v: F| weak_next(or_all([ci.clone(), stop.clone(), v]));
        let absent_until_reset = and(
            not(any.clone()),
            or(
                until(not(any.clone()), Interval::full(), ci.clone()),
                always(Interval::full(), not(any.clone())),
            ),
        );
        let mut out = vec![globally(implies(ci.clone(), b[0].clone()))];
        for k in 0..=self.n {
            let up = b[(k + 1).min(self.n)].clone();
            out.push(globally(implies(and(b[k].clone(), bb.clone()), reset_or(up))));
            out.push(globally(implies(
                and(b[k].clone(), not(bb.clone())),
                reset_or(b[k].clone()),
            )));
        }
        out.push(globally(at_most_one(b)));
        out.push(globally(implies(stop.clone(), absent_until_reset.clone())));
        out.push(or(ci.clone(), absent_until_reset));
        out
    }
}
