//! Counting Ehrenfeucht–Fraïssé games on pairs of timed words.
//!
//! A configuration is a pair of positions, one per word. Each round Spoiler
//! picks a word and plays an until round (target, then an eventually, until
//! or counting part) or a counting round; Duplicator answers in the other
//! word. Duplicator wins the `r`-round game iff every configuration reached
//! is partially isomorphic (equal event sets) and Spoiler never finds a move
//! Duplicator cannot answer.

mod fixtures;
mod play;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::eval::distinguishes;
use crate::formula::{
    classify_fragment, desugar, intervals, max_constant, modal_depth, normalize_thresholds, Fragment,
    F,
};
use crate::gen::{random_word, Rng8, WordParams};
use crate::interval::Interval;
use crate::word::TimedWord;

pub use fixtures::{separation_fixture, Fixture, FixtureFamily, FixtureParams};
pub use play::{heuristic_target, openings, play_round, AutoDuplicator, Move, Opening, Outcome, Source, UntilPart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Spoiler,
    Duplicator,
}

/// One of the two words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    #[serde(rename = "rho1")]
    First,
    #[serde(rename = "rho2")]
    Second,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::First, Side::Second];

    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::First => 0,
            Side::Second => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("solver budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("start position {position} is outside a word of length {len}")]
    OutOfRange { position: usize, len: usize },
    #[error("the formula does not distinguish the two words")]
    NotDistinguishing,
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("fixture parameters violate a constraint: {0}")]
    BadParameters(String),
}

impl GameError {
    pub fn code(&self) -> &'static str {
        match self {
            GameError::BudgetExceeded { .. } => "game.budget",
            GameError::OutOfRange { .. } => "game.range",
            GameError::NotDistinguishing => "game.precondition",
            GameError::IllegalMove(_) => "game.illegal",
            GameError::BadParameters(_) => "game.params",
        }
    }
}

/// Which rounds a fragment's game allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MoveSet {
    pub until: bool,
    /// Counting part inside until rounds (threshold untils).
    pub counting_part: bool,
    /// `C` rounds.
    pub count_rounds: bool,
    /// `C` rounds only with intervals starting at 0.
    pub count_from_zero: bool,
    /// `C` rounds only with intervals `<0,1>`.
    pub count_within_unit: bool,
}

impl MoveSet {
    pub fn for_fragment(f: Fragment) -> Self {
        let base = MoveSet {
            until: true,
            counting_part: false,
            count_rounds: false,
            count_from_zero: false,
            count_within_unit: false,
        };
        match f {
            Fragment::Mitl | Fragment::Mtl => base,
            Fragment::Tmtl => MoveSet {
                counting_part: true,
                ..base
            },
            Fragment::C01Mtl => MoveSet {
                count_rounds: true,
                count_from_zero: true,
                count_within_unit: true,
                ..base
            },
            Fragment::C0Mtl => MoveSet {
                count_rounds: true,
                count_from_zero: true,
                ..base
            },
            Fragment::Cmtl => MoveSet {
                count_rounds: true,
                ..base
            },
            Fragment::Ctmtl => MoveSet {
                counting_part: true,
                count_rounds: true,
                ..base
            },
        }
    }

    pub fn allows_count_interval(&self, i: &Interval) -> bool {
        if !self.count_rounds {
            return false;
        }
        let from_zero = i.lo_usize() == Some(0);
        if self.count_within_unit {
            return from_zero && i.hi_usize() == Some(1);
        }
        !self.count_from_zero || from_zero
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameParams {
    pub rounds: usize,
    /// Largest number of counting pebbles per round.
    pub pebbles: usize,
    pub intervals: Vec<Interval>,
    pub fragment: Fragment,
    pub start: (usize, usize),
}

impl GameParams {
    pub fn new(rounds: usize, pebbles: usize, intervals: Vec<Interval>, fragment: Fragment) -> Self {
        Self {
            rounds,
            pebbles,
            intervals,
            fragment,
            start: (0, 0),
        }
    }
}

/// Every `<i,j>` with `0 <= i <= j <= ⌈max time⌉ + 1`, all bracket choices,
/// plus `<i,inf)`. Punctual intervals are left out for MITL.
pub fn default_intervals(w1: &TimedWord, w2: &TimedWord, fragment: Fragment) -> Vec<Interval> {
    let last = |w: &TimedWord| w.time(w.len() - 1).ceil().to_integer();
    let top: BigInt = last(w1).max(last(w2)) + 1;
    let top = top.to_u64().unwrap_or(u64::MAX).min(64);
    let mut out = BTreeSet::new();
    for lo in 0..=top {
        for lo_closed in [true, false] {
            out.insert(Interval::unbounded(lo, lo_closed));
            for hi in lo..=top {
                for hi_closed in [true, false] {
                    if lo == hi && !(lo_closed && hi_closed) {
                        continue;
                    }
                    if lo == hi && fragment == Fragment::Mitl {
                        continue;
                    }
                    out.insert(Interval::bounded(lo, hi, lo_closed, hi_closed));
                }
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Solver steps before giving up.
    pub nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { nodes: 5_000_000 }
    }
}

/// Position in the game at the start of a round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameState {
    pub pos1: usize,
    pub pos2: usize,
    pub rounds_left: usize,
    pub pebbles: usize,
    pub intervals: Vec<Interval>,
    pub fragment: Fragment,
}

impl GameState {
    pub fn initial(params: &GameParams) -> Self {
        Self {
            pos1: params.start.0,
            pos2: params.start.1,
            rounds_left: params.rounds,
            pebbles: params.pebbles,
            intervals: params.intervals.clone(),
            fragment: params.fragment,
        }
    }

    pub fn position(&self, side: Side) -> usize {
        match side {
            Side::First => self.pos1,
            Side::Second => self.pos2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub winner: Player,
    pub duplicator_wins: bool,
    /// Memoized configurations.
    pub states: usize,
    pub nodes: u64,
}

/// Exact minimax solver with memoization on `(pos1, pos2, rounds_left)`.
pub struct Solver<'w> {
    words: [&'w TimedWord; 2],
    pebbles: usize,
    intervals: Vec<Interval>,
    moves: MoveSet,
    memo: HashMap<(usize, usize, usize), bool>,
    nodes: u64,
    budget: u64,
}

impl<'w> Solver<'w> {
    pub fn new(w1: &'w TimedWord, w2: &'w TimedWord, params: &GameParams, budget: &Budget) -> Self {
        Self {
            words: [w1, w2],
            pebbles: params.pebbles,
            intervals: params.intervals.clone(),
            moves: MoveSet::for_fragment(params.fragment),
            memo: HashMap::new(),
            nodes: 0,
            budget: budget.nodes,
        }
    }

    pub fn word(&self, side: Side) -> &'w TimedWord {
        self.words[side.index()]
    }

    pub fn moves(&self) -> MoveSet {
        self.moves
    }

    pub fn states(&self) -> usize {
        self.memo.len()
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn tick(&mut self) -> Result<(), GameError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(GameError::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    pub fn isop(&self, i: usize, j: usize) -> bool {
        self.words[0].events(i) == self.words[1].events(j)
    }

    /// `(pos1, pos2)` from a position `a` in `side` and `b` in the other word.
    pub fn config(side: Side, a: usize, b: usize) -> (usize, usize) {
        match side {
            Side::First => (a, b),
            Side::Second => (b, a),
        }
    }

    /// Positions after `p` in `side` whose distance lies in `interval`.
    pub fn targets(&self, side: Side, p: usize, interval: &Interval) -> Vec<usize> {
        let w = self.word(side);
        (p + 1..w.len())
            .filter(|&q| interval.contains(&(w.time(q) - w.time(p))))
            .collect()
    }

    /// Positions of `side` in `t_p + interval`.
    pub fn window(&self, side: Side, p: usize, interval: &Interval) -> Vec<usize> {
        self.word(side)
            .window(p, interval)
            .expect("position in range")
            .iter()
            .collect()
    }

    /// Whether Duplicator wins the `r`-round game from `(i, j)`.
    pub fn duplicator_wins(&mut self, i: usize, j: usize, r: usize) -> Result<bool, GameError> {
        if !self.isop(i, j) {
            return Ok(false);
        }
        if r == 0 {
            return Ok(true);
        }
        if let Some(&v) = self.memo.get(&(i, j, r)) {
            return Ok(v);
        }
        self.tick()?;
        let v = self.round_value(i, j, r)?;
        self.memo.insert((i, j, r), v);
        Ok(v)
    }

    fn round_value(&mut self, i: usize, j: usize, r: usize) -> Result<bool, GameError> {
        let intervals = self.intervals.clone();
        for x in Side::BOTH {
            let (px, py) = match x {
                Side::First => (i, j),
                Side::Second => (j, i),
            };
            if self.moves.until {
                let mut survive: BTreeMap<(usize, usize), bool> = BTreeMap::new();
                for interval in &intervals {
                    let replies = self.targets(x.other(), py, interval);
                    for a in self.targets(x, px, interval) {
                        let mut answered = false;
                        for &b in &replies {
                            let ok = match survive.get(&(a, b)) {
                                Some(&ok) => ok,
                                None => {
                                    let ok = self.survives_target(x, px, py, a, b, r)?;
                                    survive.insert((a, b), ok);
                                    ok
                                }
                            };
                            if ok {
                                answered = true;
                                break;
                            }
                        }
                        if !answered {
                            return Ok(false);
                        }
                    }
                }
            }
            for interval in &intervals {
                if !self.moves.allows_count_interval(interval) {
                    continue;
                }
                let sx = self.window(x, px, interval);
                let sy = self.window(x.other(), py, interval);
                for c in 1..=self.pebbles {
                    if self.spoiler_wins_pebbling(x, &sx, &sy, c, r - 1)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Duplicator answered target `a` (in Spoiler's word `x`) with `b`:
    /// does every continuation of the until round leave him winning?
    pub fn survives_target(
        &mut self,
        x: Side,
        px: usize,
        py: usize,
        a: usize,
        b: usize,
        r: usize,
    ) -> Result<bool, GameError> {
        self.tick()?;
        let (i, j) = Self::config(x, a, b);
        if !self.duplicator_wins(i, j, r - 1)? {
            return Ok(false);
        }
        for b2 in py + 1..b {
            if self.between_reply(x, px, a, b2, r)?.is_none() {
                return Ok(false);
            }
        }
        if self.moves.counting_part {
            let rx: Vec<usize> = (px + 1..a).collect();
            let ry: Vec<usize> = (py + 1..b).collect();
            for c in 1..=self.pebbles {
                if self.spoiler_wins_pebbling(x, &rx, &ry, c, r - 1)?
                    || self.spoiler_wins_pebbling(x.other(), &ry, &rx, c, r - 1)?
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Duplicator's winning answer in `(px, a)` of word `x` to Spoiler's
    /// pick `b2` in the other word, if any.
    pub fn between_reply(
        &mut self,
        x: Side,
        px: usize,
        a: usize,
        b2: usize,
        r: usize,
    ) -> Result<Option<usize>, GameError> {
        for a2 in px + 1..a {
            let (i, j) = Self::config(x, a2, b2);
            if self.duplicator_wins(i, j, r - 1)? {
                return Ok(Some(a2));
            }
        }
        Ok(None)
    }

    /// Positions of `d_range` that some pebble of `s` can answer.
    fn answered(
        &mut self,
        z: Side,
        s: usize,
        d_range: &[usize],
        r: usize,
    ) -> Result<BTreeSet<usize>, GameError> {
        let mut out = BTreeSet::new();
        for &d in d_range {
            let (i, j) = Self::config(z, s, d);
            if self.duplicator_wins(i, j, r)? {
                out.insert(d);
            }
        }
        Ok(out)
    }

    /// Spoiler pebbles `c` positions of `s_range` in word `z`, Duplicator `c`
    /// positions of `d_range` in the other word, Spoiler picks one of
    /// Duplicator's pebbles and Duplicator answers with one of Spoiler's.
    /// Duplicator survives a pebbling `S` iff at least `c` positions of
    /// `d_range` are answered by some member of `S`, so only the distinct
    /// answer sets matter.
    pub fn spoiler_wins_pebbling(
        &mut self,
        z: Side,
        s_range: &[usize],
        d_range: &[usize],
        c: usize,
        r: usize,
    ) -> Result<bool, GameError> {
        if s_range.len() < c {
            return Ok(false);
        }
        if d_range.len() < c {
            return Ok(true);
        }
        self.tick()?;
        let mut classes: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        for &s in s_range {
            *classes.entry(self.answered(z, s, d_range, r)?).or_default() += 1;
        }
        let classes: Vec<(BTreeSet<usize>, usize)> = classes.into_iter().collect();
        Ok(small_union(&classes, 0, c, &BTreeSet::new(), c))
    }

    /// A Spoiler pebbling of `s_range` that Duplicator cannot answer.
    pub fn winning_pebbling(
        &mut self,
        z: Side,
        s_range: &[usize],
        d_range: &[usize],
        c: usize,
        r: usize,
    ) -> Result<Option<Vec<usize>>, GameError> {
        if !self.spoiler_wins_pebbling(z, s_range, d_range, c, r)? {
            return Ok(None);
        }
        let mut sets = Vec::new();
        for &s in s_range {
            sets.push((s, self.answered(z, s, d_range, r)?));
        }
        let mut pick = Vec::new();
        Ok(choose_small(&sets, 0, c, &BTreeSet::new(), &mut pick).then_some(pick))
    }

    /// Duplicator's pebbles against `spoiler`: answered positions first.
    pub fn pebble_reply(
        &mut self,
        z: Side,
        spoiler: &[usize],
        d_range: &[usize],
        r: usize,
    ) -> Result<Option<Vec<usize>>, GameError> {
        let c = spoiler.len();
        if d_range.len() < c {
            return Ok(None);
        }
        let mut good = BTreeSet::new();
        for &s in spoiler {
            good.extend(self.answered(z, s, d_range, r)?);
        }
        let mut out: Vec<usize> = good.into_iter().take(c).collect();
        for &d in d_range {
            if out.len() == c {
                break;
            }
            if !out.contains(&d) {
                out.push(d);
            }
        }
        out.sort_unstable();
        Ok(Some(out))
    }

    /// Duplicator's answer among Spoiler's pebbles to Spoiler's pick `d`.
    pub fn pick_reply(
        &mut self,
        z: Side,
        spoiler: &[usize],
        d: usize,
        r: usize,
    ) -> Result<usize, GameError> {
        for &s in spoiler {
            let (i, j) = Self::config(z, s, d);
            if self.duplicator_wins(i, j, r)? {
                return Ok(s);
            }
        }
        Ok(spoiler[0])
    }

    /// Duplicator's best answer to target `a` under `interval`: a surviving
    /// reply if one exists, else any legal one.
    pub fn target_reply(
        &mut self,
        x: Side,
        px: usize,
        py: usize,
        interval: &Interval,
        a: usize,
        r: usize,
    ) -> Result<Option<usize>, GameError> {
        let replies = self.targets(x.other(), py, interval);
        for &b in &replies {
            if self.survives_target(x, px, py, a, b, r)? {
                return Ok(Some(b));
            }
        }
        Ok(replies.first().copied())
    }
}

/// Is there a choice of `need` items (respecting multiplicities) whose
/// answer sets cover fewer than `c` positions?
fn small_union(
    classes: &[(BTreeSet<usize>, usize)],
    from: usize,
    need: usize,
    acc: &BTreeSet<usize>,
    c: usize,
) -> bool {
    if acc.len() >= c {
        return false;
    }
    if need == 0 {
        return true;
    }
    for k in from..classes.len() {
        let (set, mult) = &classes[k];
        let union: BTreeSet<usize> = acc.union(set).copied().collect();
        // Take as many copies of this class as useful: more never hurts.
        let take = (*mult).min(need);
        if small_union(classes, k + 1, need - take, &union, c) {
            return true;
        }
    }
    false
}

fn choose_small(
    sets: &[(usize, BTreeSet<usize>)],
    from: usize,
    need: usize,
    acc: &BTreeSet<usize>,
    pick: &mut Vec<usize>,
) -> bool {
    let c = pick.len() + need;
    if acc.len() >= c {
        return false;
    }
    if need == 0 {
        return true;
    }
    for k in from..sets.len() {
        let union: BTreeSet<usize> = acc.union(&sets[k].1).copied().collect();
        pick.push(sets[k].0);
        if choose_small(sets, k + 1, need - 1, &union, pick) {
            return true;
        }
        pick.pop();
    }
    false
}

pub fn solve_game(
    w1: &TimedWord,
    w2: &TimedWord,
    params: &GameParams,
    budget: &Budget,
) -> Result<Solution, GameError> {
    let (i, j) = params.start;
    for (p, w) in [(i, w1), (j, w2)] {
        if p >= w.len() {
            return Err(GameError::OutOfRange {
                position: p,
                len: w.len(),
            });
        }
    }
    let mut solver = Solver::new(w1, w2, params, budget);
    let duplicator_wins = solver.duplicator_wins(i, j, params.rounds)?;
    Ok(Solution {
        winner: if duplicator_wins {
            Player::Duplicator
        } else {
            Player::Spoiler
        },
        duplicator_wins,
        states: solver.states(),
        nodes: solver.nodes(),
    })
}

/// The 0-round game: equal event sets at the first positions.
pub fn zero_round_equivalent(w1: &TimedWord, w2: &TimedWord) -> bool {
    w1.events(0) == w2.events(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub rounds: usize,
    pub pebbles: usize,
    pub intervals: Vec<String>,
    pub fragment: Fragment,
    pub winner: Player,
    /// Spoiler wins, as a distinguishing formula requires.
    pub consistent: bool,
    pub states: usize,
}

/// Game parameters read off a formula: rounds = modal depth and pebbles =
/// largest constant of its normalized form, intervals with their unbounded
/// closures, moves of its fragment.
pub fn params_for(f: &F) -> GameParams {
    let g = normalize_thresholds(&desugar(f));
    let mut ivs = intervals(&g);
    let closures: Vec<Interval> = ivs.iter().map(Interval::unbounded_closure).collect();
    ivs.extend(closures);
    GameParams::new(
        modal_depth(&g),
        max_constant(&g).to_usize().unwrap_or(usize::MAX),
        ivs.into_iter().collect(),
        classify_fragment(&g),
    )
}

/// Sound direction of the game theorem: a formula that tells the words apart
/// gives Spoiler a win with its own depth, constants and intervals.
pub fn verify_game_theorem(
    f: &F,
    w1: &TimedWord,
    w2: &TimedWord,
    budget: &Budget,
) -> Result<Verdict, GameError> {
    if !distinguishes(f, w1, w2) {
        return Err(GameError::NotDistinguishing);
    }
    let params = params_for(f);
    let sol = solve_game(w1, w2, &params, budget)?;
    Ok(Verdict {
        rounds: params.rounds,
        pebbles: params.pebbles,
        intervals: params.intervals.iter().map(ToString::to_string).collect(),
        fragment: params.fragment,
        winner: sol.winner,
        consistent: sol.winner == Player::Spoiler,
        states: sol.states,
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GridReport {
    pub games: usize,
    pub violations: usize,
}

/// Spoiler wins at `(r, k)` must persist at `(r+1, k)` and `(r, k+1)`.
/// Checked on `pairs` random word pairs over the default interval family.
pub fn monotonicity_grid(rng: &mut Rng8, r_max: usize, k_max: usize, pairs: usize) -> GridReport {
    let wp = WordParams {
        max_time: 2,
        ..WordParams::new(&["a", "b"], 4)
    };
    let mut report = GridReport::default();
    let mut done = 0;
    while done < pairs {
        let (u, v) = (random_word(rng, &wp), random_word(rng, &wp));
        if rng.gen_bool(0.5) && u.events(0) != v.events(0) {
            continue;
        }
        let ivs = default_intervals(&u, &v, Fragment::Ctmtl);
        let mut spoiler = vec![vec![false; k_max + 2]; r_max + 2];
        for (r, row) in spoiler.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                let params = GameParams::new(r, k, ivs.clone(), Fragment::Ctmtl);
                let sol = solve_game(&u, &v, &params, &Budget::default()).expect("small game");
                *cell = !sol.duplicator_wins;
                report.games += 1;
            }
        }
        for r in 0..=r_max {
            for k in 0..=k_max {
                if spoiler[r][k] && !(spoiler[r + 1][k] && spoiler[r][k + 1]) {
                    report.violations += 1;
                }
            }
        }
        done += 1;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::gen::{random_formula, rng, FormulaParams};

    fn w(points: &[(&[&str], i64, i64)]) -> TimedWord {
        TimedWord::from_triples(points)
    }

    fn params(r: usize, k: usize, ivs: &[&str], fragment: Fragment) -> GameParams {
        let ivs = ivs
            .iter()
            .map(|s| s.parse::<Interval>().expect("interval"))
            .collect();
        GameParams::new(r, k, ivs, fragment)
    }

    #[test]
    fn zero_rounds_is_isop() {
        let (u, v) = (w(&[(&["a"], 0, 1)]), w(&[(&["a"], 3, 1)]));
        let p = params(0, 0, &[], Fragment::Ctmtl);
        assert_eq!(solve_game(&u, &v, &p, &Budget::default()).unwrap().winner, Player::Duplicator);
        let v = w(&[(&["b"], 0, 1)]);
        assert_eq!(solve_game(&u, &v, &p, &Budget::default()).unwrap().winner, Player::Spoiler);
    }

    #[test]
    fn single_points_leave_spoiler_no_moves() {
        let (u, v) = (w(&[(&["a"], 0, 1)]), w(&[(&["a"], 1, 2)]));
        let p = params(3, 2, &["(0,inf)", "[0,1]"], Fragment::Tmtl);
        assert!(solve_game(&u, &v, &p, &Budget::default()).unwrap().duplicator_wins);
    }

    #[test]
    fn identical_words_are_duplicator_wins() {
        let u = w(&[(&["a"], 0, 1), (&["b"], 3, 10), (&["a", "b"], 7, 10), (&["b"], 11, 10)]);
        let ivs = default_intervals(&u, &u, Fragment::Ctmtl);
        let p = GameParams::new(2, 2, ivs, Fragment::Ctmtl);
        assert!(solve_game(&u, &u, &p, &Budget::default()).unwrap().duplicator_wins);
    }

    #[test]
    fn until_round_separates_orders() {
        let u = w(&[(&["a"], 0, 1), (&["b"], 1, 1), (&["c"], 2, 1)]);
        let v = w(&[(&["a"], 0, 1), (&["c"], 1, 1), (&["b"], 2, 1)]);
        let f = parse_formula("!c U b").unwrap();
        let verdict = verify_game_theorem(&f, &u, &v, &Budget::default()).unwrap();
        assert_eq!((verdict.rounds, verdict.winner), (1, Player::Spoiler));
    }

    #[test]
    fn counting_part_needs_pebbles() {
        // Same order type except for how many b's precede c.
        let u = w(&[(&["a"], 0, 1), (&["b"], 1, 1), (&["b"], 2, 1), (&["c"], 3, 1)]);
        let v = w(&[(&["a"], 0, 1), (&["b"], 1, 1), (&["c"], 3, 1)]);
        let f = parse_formula("true U(0,inf){#(b)>=2} c").unwrap();
        assert!(verify_game_theorem(&f, &u, &v, &Budget::default()).unwrap().consistent);
        // Without pebbles Spoiler cannot count past one.
        let p = params(1, 0, &["(0,inf)"], Fragment::Tmtl);
        assert!(solve_game(&u, &v, &p, &Budget::default()).unwrap().duplicator_wins);
    }

    #[test]
    fn count_rounds_respect_the_fragment() {
        let u = w(&[(&["a"], 0, 1), (&["a"], 1, 2), (&["a"], 3, 2)]);
        let v = w(&[(&["a"], 0, 1), (&["a"], 3, 2)]);
        let f = parse_formula("C(0,2)>=2 (a)").unwrap();
        let verdict = verify_game_theorem(&f, &u, &v, &Budget::default()).unwrap();
        assert!(verdict.consistent && verdict.fragment == Fragment::C0Mtl);
        let within_unit = params(1, 2, &["(0,2)"], Fragment::C01Mtl);
        assert!(solve_game(&u, &v, &within_unit, &Budget::default()).unwrap().duplicator_wins);
    }

    #[test]
    fn budget_is_reported_separately() {
        let u = w(&[(&["a"], 0, 1), (&["a"], 1, 2), (&["a"], 1, 1)]);
        let ivs = default_intervals(&u, &u, Fragment::Ctmtl);
        let p = GameParams::new(3, 2, ivs, Fragment::Ctmtl);
        let err = solve_game(&u, &u, &p, &Budget { nodes: 3 }).unwrap_err();
        assert_eq!(err, GameError::BudgetExceeded { budget: 3 });
    }

    #[test]
    fn non_distinguishing_formulas_are_refused() {
        let u = w(&[(&["a"], 0, 1)]);
        let f = parse_formula("a").unwrap();
        assert_eq!(
            verify_game_theorem(&f, &u, &u, &Budget::default()).unwrap_err(),
            GameError::NotDistinguishing
        );
    }

    #[test]
    fn random_distinguishing_formulas_give_spoiler_wins() {
        let mut r = rng(17);
        let mut fp = FormulaParams::new(&["a", "b"], 2);
        fp.max_const = 2;
        fp.max_endpoint = 2;
        let wp = WordParams {
            max_time: 3,
            ..WordParams::new(&["a", "b"], 4)
        };
        let mut checked = 0;
        while checked < 60 {
            let f = random_formula(&mut r, &fp);
            let (u, v) = (random_word(&mut r, &wp), random_word(&mut r, &wp));
            match verify_game_theorem(&f, &u, &v, &Budget::default()) {
                Ok(verdict) => {
                    assert!(verdict.consistent, "{f} on {u} / {v}");
                    checked += 1;
                }
                Err(GameError::NotDistinguishing) => {}
                Err(e) => panic!("{f}: {e}"),
            }
        }
    }

    #[test]
    fn small_monotonicity_grid() {
        let mut r = rng(5);
        assert_eq!(monotonicity_grid(&mut r, 2, 1, 6).violations, 0);
    }

    /// Completeness smoke test: when Duplicator wins, no small formula over
    /// the game's intervals tells the words apart.
    #[test]
    fn duplicator_wins_admit_no_small_separator() {
        let u = w(&[(&["a"], 0, 1), (&["a"], 1, 2), (&["a"], 3, 5)]);
        let v = w(&[(&["a"], 0, 1), (&["a"], 1, 2)]);
        let p = params(1, 1, &["(0,1)", "(0,inf)"], Fragment::Mtl);
        assert!(solve_game(&u, &v, &p, &Budget::default()).unwrap().duplicator_wins);
        let atoms = ["a", "!a", "true"];
        for ivl in ["(0,1)", "(0,inf)"] {
            for x in atoms {
                for y in atoms {
                    let f = parse_formula(&format!("{x} U{ivl} {y}")).unwrap();
                    assert!(!distinguishes(&f, &u, &v), "{f}");
                }
            }
        }
        // One more round lets Spoiler see the missing point.
        let p = params(2, 1, &["(0,1)", "(0,inf)"], Fragment::Mtl);
        assert!(!solve_game(&u, &v, &p, &Budget::default()).unwrap().duplicator_wins);
    }
}
