use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::formula::build::*;
use crate::formula::{Formula, Name, ThresholdAtom, ThresholdExpr, F, KEYWORDS};

/// `Gw[witness <-> body]` where `body` has a single counting modality at its
/// root and mentions only base symbols and earlier witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalDefinition {
    pub witness: Name,
    pub body: F,
}

impl TemporalDefinition {
    pub fn formula(&self) -> F {
        globally(iff(prop_named(&self.witness), self.body.clone()))
    }
}

/// Deterministic fresh names that never collide with reserved ones.
#[derive(Debug, Clone, Default)]
pub struct NameGen {
    taken: BTreeSet<Name>,
}

impl NameGen {
    pub fn new(reserved: impl IntoIterator<Item = Name>) -> Self {
        Self {
            taken: reserved.into_iter().collect(),
        }
    }

    pub fn fresh(&mut self, hint: &str) -> Name {
        let mut name = hint.to_string();
        let mut k = 1;
        while KEYWORDS.contains(&name.as_str()) || self.taken.contains(name.as_str()) {
            name = format!("{hint}_{k}");
            k += 1;
        }
        let name: Name = Arc::from(name);
        self.taken.insert(name.clone());
        name
    }
}

/// Replace every counting modality, innermost first, by a fresh witness
/// proposition. Structurally equal modalities share one witness.
pub fn flatten(f: &F, names: &mut NameGen) -> (F, Vec<TemporalDefinition>) {
    let mut fl = Flatten {
        names,
        defs: Vec::new(),
        memo: HashMap::new(),
    };
    let top = fl.run(f);
    (top, fl.defs)
}

struct Flatten<'n> {
    names: &'n mut NameGen,
    defs: Vec<TemporalDefinition>,
    memo: HashMap<*const Formula, (F, F)>,
}

impl Flatten<'_> {
    fn run(&mut self, f: &F) -> F {
        let key = Arc::as_ptr(f);
        if let Some((_, done)) = self.memo.get(&key) {
            return done.clone();
        }
        let rebuilt = self.children(f);
        let out = if rebuilt.is_counting_modality() {
            self.define(rebuilt)
        } else {
            rebuilt
        };
        self.memo.insert(key, (f.clone(), out.clone()));
        out
    }

    fn define(&mut self, body: F) -> F {
        if let Some(d) = self.defs.iter().find(|d| d.body == body) {
            return prop_named(&d.witness);
        }
        let witness = self.names.fresh(&format!("w{}", self.defs.len() + 1));
        self.defs.push(TemporalDefinition {
            witness: witness.clone(),
            body,
        });
        prop_named(&witness)
    }

    fn children(&mut self, f: &F) -> F {
        match &**f {
            Formula::True | Formula::False | Formula::Prop(_) => f.clone(),
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
                let l = self.run(left);
                let t = threshold.as_ref().map(|t| self.threshold(t));
                let r = self.run(right);
                match t {
                    None => until(l, interval.clone(), r),
                    Some(t) => until_thr(l, interval.clone(), t, r),
                }
            }
            Formula::Count {
                cmp,
                bound,
                interval,
                body,
            } => count(*cmp, bound.clone(), interval.clone(), self.run(body)),
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

    fn threshold(&mut self, t: &ThresholdExpr) -> ThresholdExpr {
        match t {
            ThresholdExpr::Atom(a) => ThresholdExpr::Atom(ThresholdAtom {
                counted: self.run(&a.counted),
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{desugar, parse_formula};

    fn run(s: &str) -> (F, Vec<TemporalDefinition>) {
        flatten(&desugar(&parse_formula(s).unwrap()), &mut NameGen::default())
    }

    #[test]
    fn mtl_is_untouched() {
        let (top, defs) = run("a U[0,3] (b & F c)");
        assert!(defs.is_empty());
        assert_eq!(top.to_string(), "a U[0,3] (b & true U c)");
    }

    #[test]
    fn single_count() {
        let (top, defs) = run("C(0,1)>=1 (a)");
        assert_eq!(top.to_string(), "w1");
        assert_eq!(defs.len(), 1);
        assert_eq!(defs[0].formula().to_string(), "Gw ((w1 -> C(0,1)>=1 (a)) & (C(0,1)>=1 (a) -> w1))");
    }

    #[test]
    fn innermost_first_with_sharing() {
        let (top, defs) = run(
            "a U[0,3] (c & C(2,3)=1 (d U(0,1){#(d & C(0,1)=1 (e))>=1} C(0,1)>=2 (e)))",
        );
        let bodies: Vec<String> = defs
            .iter()
            .map(|d| format!("{} := {}", d.witness, d.body))
            .collect();
        assert_eq!(
            bodies,
            [
                "w1 := C(0,1)>=1 (e)",
                "w2 := C(0,1)>=2 (e)",
                "w3 := d U(0,1){#(d & (w1 & !w2))>=1} w2",
                "w4 := C(2,3)>=1 (w3)",
                "w5 := C(2,3)>=2 (w3)",
            ]
        );
        assert_eq!(top.to_string(), "a U[0,3] (c & (w4 & !w5))");
    }

    #[test]
    fn names_avoid_reserved_symbols() {
        let mut names = NameGen::new([Arc::from("w1"), Arc::from("w1_1")]);
        assert_eq!(&*names.fresh("w1"), "w1_2");
        assert_eq!(&*names.fresh("F"), "F_1");
        assert_eq!(&*names.fresh("w2"), "w2");
        assert_eq!(&*names.fresh("w2"), "w2_1");
    }
}
