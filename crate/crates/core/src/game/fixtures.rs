//! Word pairs that separate neighbouring fragments, at small `n` (rounds)
//! and `k` (pebbles).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::GameError;
use crate::eval::eval_word;
use crate::formula::build::*;
use crate::formula::{Cmp, ThresholdExpr, F};
use crate::interval::Interval;
use crate::word::{Point, TimedWord};

/// Fixtures larger than this are refused.
pub const MAX_FIXTURE_POINTS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureFamily {
    /// `C=2_(0,1) a` is not expressible in MTL.
    MtlVsC01,
    /// `C>=2_(0,2) a` is not expressible with windows `<0,1>`.
    C01VsC0,
    /// `C>=2_(1,2) a` is not expressible in TMTL.
    TmtlVsCmtl,
    /// `F_(0,1),#a>=3 b` is not expressible in CMTL.
    CmtlVsTmtl,
}

impl FixtureFamily {
    pub const ALL: [FixtureFamily; 4] = [
        FixtureFamily::MtlVsC01,
        FixtureFamily::C01VsC0,
        FixtureFamily::TmtlVsCmtl,
        FixtureFamily::CmtlVsTmtl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureFamily::MtlVsC01 => "mtl_vs_c01",
            FixtureFamily::C01VsC0 => "c01_vs_c0",
            FixtureFamily::TmtlVsCmtl => "tmtl_vs_cmtl",
            FixtureFamily::CmtlVsTmtl => "cmtl_vs_tmtl",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixtureParams {
    /// Rounds the words are built to withstand.
    pub n: usize,
    /// Pebbles the words are built to withstand.
    pub k: usize,
}

impl Default for FixtureParams {
    fn default() -> Self {
        Self { n: 1, k: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fixture {
    pub family: FixtureFamily,
    pub params: FixtureParams,
    #[serde(serialize_with = "as_text")]
    pub formula: F,
    #[serde(serialize_with = "as_text")]
    pub rho1: TimedWord,
    #[serde(serialize_with = "as_text")]
    pub rho2: TimedWord,
    /// Whether `rho1` and `rho2` satisfy the formula.
    pub expected: (bool, bool),
}

fn as_text<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn q(x: &str) -> BigRational {
    crate::word::parse_time(x).expect("decimal literal")
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `10^-e`.
fn tenth_power(e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10).pow(e as u32))
}

#[derive(Default)]
struct Builder(Vec<(&'static str, BigRational)>);

impl Builder {
    fn at(&mut self, e: &'static str, t: BigRational) -> &mut Self {
        self.0.push((e, t));
        self
    }

    /// `count` points `step` apart after `from`, exclusive.
    fn run(&mut self, e: &'static str, from: &BigRational, step: &BigRational, count: usize) -> &mut Self {
        for j in 1..=count {
            self.at(e, from + step * int(j));
        }
        self
    }

    fn word(&self) -> Result<TimedWord, GameError> {
        if self.0.len() > MAX_FIXTURE_POINTS {
            return Err(GameError::BadParameters(format!(
                "the words would have {} points, more than {MAX_FIXTURE_POINTS}",
                self.0.len()
            )));
        }
        let mut pts: Vec<(&str, BigRational)> = self.0.clone();
        pts.sort_by(|a, b| a.1.cmp(&b.1));
        let points = pts.into_iter().map(|(e, t)| Point::new([e], t)).collect();
        let w = TimedWord::new(points).map_err(|e| GameError::BadParameters(e.to_string()))?;
        w.require_strict()
            .map_err(|e| GameError::BadParameters(e.to_string()))?;
        Ok(w)
    }
}

/// A family's formula and word pair. The satisfaction pattern is checked
/// before returning.
pub fn separation_fixture(family: FixtureFamily, p: &FixtureParams) -> Result<Fixture, GameError> {
    if p.n == 0 || p.k == 0 {
        return Err(GameError::BadParameters("n and k must be positive".into()));
    }
    if p.n * p.k > 64 {
        return Err(GameError::BadParameters("n * k must be at most 64".into()));
    }
    let (n, k) = (p.n, p.k);
    let a = || prop("a");
    let (formula, rho1, rho2, expected) = match family {
        FixtureFamily::MtlVsC01 => {
            let delta = BigRational::new(1.into(), BigInt::from(10 * (n + 1)));
            let tail = |b: &mut Builder| {
                b.at("a", q("1.1")).run("a", &q("1.1"), &delta, n);
            };
            let mut r1 = Builder::default();
            r1.at("a", q("0")).at("a", q("0.5")).at("a", q("0.6"));
            tail(&mut r1);
            let mut r2 = Builder::default();
            r2.at("a", q("0")).at("a", q("0.5"));
            tail(&mut r2);
            let f = count(Cmp::Eq, 2u32, Interval::bounded(0, 1, false, false), a());
            (f, r1.word()?, r2.word()?, (true, false))
        }
        FixtureFamily::C01VsC0 => {
            let delta = BigRational::new(1.into(), BigInt::from(10 * (n * k + 1)));
            let tail = |b: &mut Builder| {
                b.at("a", q("2.1")).run("a", &q("2.1"), &delta, n * k);
            };
            let mut r1 = Builder::default();
            r1.at("a", q("0")).at("a", q("1.8")).at("a", q("1.9"));
            tail(&mut r1);
            let mut r2 = Builder::default();
            r2.at("a", q("0")).at("a", q("1.9"));
            tail(&mut r2);
            let f = count(Cmp::Ge, 2u32, Interval::bounded(0, 2, false, false), a());
            (f, r1.word()?, r2.word()?, (true, false))
        }
        FixtureFamily::TmtlVsCmtl => {
            let (r1, r2) = tmtl_vs_cmtl(n, k);
            let f = count(Cmp::Ge, 2u32, Interval::bounded(1, 2, false, false), a());
            (f, r1.word()?, r2.word()?, (true, false))
        }
        FixtureFamily::CmtlVsTmtl => {
            let (r1, r2) = cmtl_vs_tmtl(n, k);
            let thr = ThresholdExpr::atom(a(), Cmp::Ge, 3u32);
            let f = until_thr(tt(), Interval::bounded(0, 1, false, false), thr, prop("b"));
            (f, r1.word()?, r2.word()?, (false, true))
        }
    };
    let got = (eval_word(&rho1, &formula), eval_word(&rho2, &formula));
    if got != expected {
        return Err(GameError::BadParameters(format!(
            "{} at n={n}, k={k} has satisfaction pattern {got:?}, expected {expected:?}",
            family.name()
        )));
    }
    Ok(Fixture {
        family,
        params: *p,
        formula,
        rho1,
        rho2,
        expected,
    })
}

/// Largest interval constant of the family's formula.
const TMTL_L: usize = 2;
const CMTL_L: usize = 1;

fn tmtl_vs_cmtl(n: usize, k: usize) -> (Builder, Builder) {
    let units = n * TMTL_L * (k + 1);
    let eps = tenth_power(10 * n * k + 1);
    let delta = &eps / int(2);
    let kappa = (&eps - &delta) / int(4 * n * k);
    let nk2 = 2 * n * k;
    let ne = &eps * int(n);
    let mut pair = (Builder::default(), Builder::default());
    for b in [&mut pair.0, &mut pair.1] {
        // Both words start with the game's initial position at time 0.
        b.at("a", BigRational::zero());
        b.at("a", q("0.5")).at("a", q("0.6")).at("a", q("0.8"));
        b.run("a", &q("0.6"), &kappa, nk2);
        b.at("a", q("1.8") - &eps);
        let e = q("2.4") + &ne;
        b.at("a", e.clone()).at("a", q("2.7") + &ne).run("a", &e, &kappa, nk2);
        for i in 3..units {
            let ie = int(i);
            let x = &ie + q("0.4") + (int(n) - &ie) * &eps;
            let z = &ie + q("0.8") + int(n + i) * &eps + &delta;
            let y = &ie + q("0.8") + int(n + i + 1) * &eps;
            b.at("a", x).at("a", z.clone()).at("a", y).run("a", &z, &kappa, nk2);
        }
    }
    pair.0.at("a", q("1.8") + &eps);
    pair
}

fn cmtl_vs_tmtl(n: usize, k: usize) -> (Builder, Builder) {
    let l = CMTL_L;
    let units = n * l * k + n * l;
    let eps = tenth_power(10 * n * k + 1);
    // One more than the nk multiple so blocks keep positive width at n = k = 1.
    let kappa = &eps * int(n * k + 1);
    // Keeps every shifted block, the fourth included, inside its unit.
    let delta = BigRational::new(1.into(), BigInt::from(200 * units));
    let p = 2 * n * l * k + 1;
    let step = (&kappa - &eps) / int(p + 1);
    let block = |b: &mut Builder, start: BigRational| {
        let x = &start + &eps;
        b.at("b", x.clone()).run("b", &x, &step, p).at("b", &start + &kappa);
    };
    let mut pair = (Builder::default(), Builder::default());
    for i in 0..units {
        let shift = int(i) + &delta * int(i);
        for b in [&mut pair.0, &mut pair.1] {
            for o in ["0.1", "0.3", "0.5"] {
                block(b, &shift + q(o));
            }
            for o in ["0.2", "0.4", "0.9"] {
                b.at("a", &shift + q(o));
            }
        }
        if i + 1 < units {
            block(&mut pair.1, &shift + q("0.99"));
        }
    }
    pair
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::satisfying_positions;
    use crate::game::{verify_game_theorem, Budget, Player, Side, Solver, GameParams};
    use crate::formula::Fragment;
    use crate::word::format_time;

    fn times(w: &TimedWord) -> Vec<String> {
        (0..w.len()).map(|i| format_time(w.time(i))).collect()
    }

    #[test]
    fn exp_words_have_the_stated_prefixes() {
        let f = separation_fixture(FixtureFamily::MtlVsC01, &FixtureParams { n: 2, k: 1 }).unwrap();
        assert_eq!(f.formula.to_string(), "C(0,1)=2 (a)");
        assert_eq!(times(&f.rho1)[..4], ["0", "0.5", "0.6", "1.1"]);
        assert_eq!(times(&f.rho2)[..3], ["0", "0.5", "1.1"]);
        assert_eq!(f.rho1.len(), 6);
        let f = separation_fixture(FixtureFamily::C01VsC0, &FixtureParams::default()).unwrap();
        assert_eq!(times(&f.rho1)[..4], ["0", "1.8", "1.9", "2.1"]);
        assert_eq!(times(&f.rho2)[..3], ["0", "1.9", "2.1"]);
        assert!(f.rho1.time(f.rho1.len() - 1) < &q("2.2"));
    }

    #[test]
    fn words_differ_only_where_intended() {
        let f = separation_fixture(FixtureFamily::TmtlVsCmtl, &FixtureParams::default()).unwrap();
        assert_eq!(f.rho1.len(), f.rho2.len() + 1);
        let in_12 = |w: &TimedWord| (0..w.len()).filter(|&i| w.time(i) > &q("1") && w.time(i) < &q("2")).count();
        assert_eq!((in_12(&f.rho1), in_12(&f.rho2)), (2, 1));
        let f = separation_fixture(FixtureFamily::CmtlVsTmtl, &FixtureParams::default()).unwrap();
        // ρ2 has a fourth block in every unit but the last: 2nlk+3 b's each.
        assert_eq!(f.rho2.len() - f.rho1.len(), 5);
        // The a's at 0.9 see a b within (0,1) only in ρ2.
        assert!(satisfying_positions(&f.rho2, &f.formula).len() > satisfying_positions(&f.rho1, &f.formula).len());
    }

    #[test]
    fn every_family_keeps_its_pattern_as_parameters_grow() {
        for family in FixtureFamily::ALL {
            for (n, k) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                let f = separation_fixture(family, &FixtureParams { n, k }).unwrap();
                assert_eq!(f.family.name(), family.name());
            }
        }
        assert!(separation_fixture(FixtureFamily::MtlVsC01, &FixtureParams { n: 0, k: 1 }).is_err());
        assert!(separation_fixture(FixtureFamily::CmtlVsTmtl, &FixtureParams { n: 8, k: 9 }).is_err());
    }

    #[test]
    fn distinguishing_formulas_give_spoiler_wins() {
        for family in FixtureFamily::ALL {
            let f = separation_fixture(family, &FixtureParams::default()).unwrap();
            let v = verify_game_theorem(&f.formula, &f.rho1, &f.rho2, &Budget::default()).unwrap();
            assert_eq!((v.winner, v.rounds), (Player::Spoiler, 1), "{}", family.name());
        }
    }

    #[test]
    fn tmtl_opening_forces_the_single_reply() {
        let f = separation_fixture(FixtureFamily::TmtlVsCmtl, &FixtureParams { n: 1, k: 2 }).unwrap();
        let iv = Interval::bounded(1, 2, false, false);
        let params = GameParams::new(1, 2, vec![iv.clone()], Fragment::Tmtl);
        let solver = Solver::new(&f.rho1, &f.rho2, &params, &Budget::default());
        let spoiler = solver.targets(Side::First, 0, &iv);
        let replies = solver.targets(Side::Second, 0, &iv);
        let ts = |w: &TimedWord, ps: &[usize]| ps.iter().map(|&p| w.time(p).clone()).collect::<Vec<_>>();
        let eps = tenth_power(21);
        assert_eq!(ts(&f.rho1, &spoiler), [q("1.8") - &eps, q("1.8") + &eps]);
        assert_eq!(ts(&f.rho2, &replies), [q("1.8") - &eps]);
    }
}
