//! Move-level rules: Spoiler openings, round validation and Duplicator's
//! automatic answers for interactive play.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use super::{GameError, GameState, MoveSet, Player, Side, Solver};
use crate::interval::Interval;
use crate::word::TimedWord;

/// How an until round continues once the target and reply are fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "part", rename_all = "snake_case")]
pub enum UntilPart {
    /// The round ends at the targets.
    Eventually,
    /// Spoiler picks strictly between in Duplicator's word, Duplicator
    /// answers strictly between in Spoiler's word.
    Between {
        spoiler_pick: usize,
        duplicator_pick: Option<usize>,
    },
    /// Counting part: Spoiler pebbles positions strictly between in word
    /// `pebble_side`, Duplicator the same number in the other word.
    Counting {
        pebble_side: Side,
        spoiler_pebbles: Vec<usize>,
        duplicator_pebbles: Option<Vec<usize>>,
        spoiler_pick: usize,
        duplicator_pick: usize,
    },
}

/// A complete round. Duplicator's fields are `None` when he has no legal
/// answer, which loses the game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "round", rename_all = "snake_case")]
pub enum Move {
    Until {
        side: Side,
        interval: Interval,
        target: usize,
        reply: Option<usize>,
        part: UntilPart,
    },
    Count {
        side: Side,
        interval: Interval,
        spoiler_pebbles: Vec<usize>,
        duplicator_pebbles: Option<Vec<usize>>,
        spoiler_pick: usize,
        duplicator_pick: usize,
    },
}

/// Spoiler's first choice in a round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "round", rename_all = "snake_case")]
pub enum Opening {
    Until {
        side: Side,
        interval: Interval,
        target: usize,
    },
    Count {
        side: Side,
        interval: Interval,
        pebbles: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Continue { state: GameState },
    Won { winner: Player },
}

fn illegal(msg: impl Into<String>) -> GameError {
    GameError::IllegalMove(msg.into())
}

fn words<'w>(w1: &'w TimedWord, w2: &'w TimedWord, side: Side) -> (&'w TimedWord, &'w TimedWord) {
    match side {
        Side::First => (w1, w2),
        Side::Second => (w2, w1),
    }
}

fn targets(w: &TimedWord, p: usize, interval: &Interval) -> Vec<usize> {
    (p + 1..w.len())
        .filter(|&q| interval.contains(&(w.time(q) - w.time(p))))
        .collect()
}

fn window(w: &TimedWord, p: usize, interval: &Interval) -> Vec<usize> {
    w.window(p, interval).expect("position in range").iter().collect()
}

/// Every Spoiler opening allowed in `s`. Empty once the configuration is not
/// partially isomorphic or no rounds remain.
pub fn openings(w1: &TimedWord, w2: &TimedWord, s: &GameState) -> Vec<Opening> {
    let moves = MoveSet::for_fragment(s.fragment);
    let mut out = Vec::new();
    if s.rounds_left == 0 || w1.events(s.pos1) != w2.events(s.pos2) {
        return out;
    }
    for side in Side::BOTH {
        let (wx, _) = words(w1, w2, side);
        let px = s.position(side);
        for interval in &s.intervals {
            if moves.until {
                for target in targets(wx, px, interval) {
                    out.push(Opening::Until {
                        side,
                        interval: interval.clone(),
                        target,
                    });
                }
            }
            if moves.allows_count_interval(interval) {
                let available = window(wx, px, interval).len();
                for pebbles in 1..=s.pebbles.min(available) {
                    out.push(Opening::Count {
                        side,
                        interval: interval.clone(),
                        pebbles,
                    });
                }
            }
        }
    }
    out
}

fn distinct_within(ps: &[usize], range: &[usize], what: &str) -> Result<(), GameError> {
    let set: BTreeSet<usize> = ps.iter().copied().collect();
    if set.len() != ps.len() {
        return Err(illegal(format!("{what}: pebbled positions must be distinct")));
    }
    if let Some(p) = ps.iter().find(|p| !range.contains(p)) {
        return Err(illegal(format!("{what}: position {p} is outside the pebbling range")));
    }
    Ok(())
}

/// Plays one validated round. Rejections name the violated rule.
pub fn play_round(
    w1: &TimedWord,
    w2: &TimedWord,
    s: &GameState,
    mv: &Move,
) -> Result<Outcome, GameError> {
    let won = |winner| Ok(Outcome::Won { winner });
    if w1.events(s.pos1) != w2.events(s.pos2) {
        return won(Player::Spoiler);
    }
    if s.rounds_left == 0 {
        return won(Player::Duplicator);
    }
    let moves = MoveSet::for_fragment(s.fragment);
    let next = match mv {
        Move::Until {
            side,
            interval,
            target,
            reply,
            part,
        } => {
            if !moves.until {
                return Err(illegal("until rounds are not part of this game"));
            }
            if !s.intervals.contains(interval) {
                return Err(illegal(format!("interval {interval} is not in the game's interval set")));
            }
            let (wx, wy) = words(w1, w2, *side);
            let (px, py) = (s.position(*side), s.position(side.other()));
            if !targets(wx, px, interval).contains(target) {
                return Err(illegal(format!(
                    "target {target} must lie strictly after {px} with its distance in {interval}"
                )));
            }
            let replies = targets(wy, py, interval);
            let Some(reply) = *reply else {
                return if replies.is_empty() {
                    won(Player::Spoiler)
                } else {
                    Err(illegal("Duplicator has an in-interval reply and must play it"))
                };
            };
            if !replies.contains(&reply) {
                return Err(illegal(format!(
                    "reply {reply} must lie strictly after {py} with its distance in {interval}"
                )));
            }
            let rx: Vec<usize> = (px + 1..*target).collect();
            let ry: Vec<usize> = (py + 1..reply).collect();
            match part {
                UntilPart::Eventually => Solver::config(*side, *target, reply),
                UntilPart::Between {
                    spoiler_pick,
                    duplicator_pick,
                } => {
                    if !ry.contains(spoiler_pick) {
                        return Err(illegal(format!(
                            "Spoiler's pick {spoiler_pick} must lie strictly between {py} and {reply}"
                        )));
                    }
                    let Some(d) = *duplicator_pick else {
                        return if rx.is_empty() {
                            won(Player::Spoiler)
                        } else {
                            Err(illegal("Duplicator must answer between the targets"))
                        };
                    };
                    if !rx.contains(&d) {
                        return Err(illegal(format!(
                            "Duplicator's pick {d} must lie strictly between {px} and {target}"
                        )));
                    }
                    Solver::config(*side, d, *spoiler_pick)
                }
                UntilPart::Counting {
                    pebble_side,
                    spoiler_pebbles,
                    duplicator_pebbles,
                    spoiler_pick,
                    duplicator_pick,
                } => {
                    if !moves.counting_part {
                        return Err(illegal("counting parts are not part of this game"));
                    }
                    let (rs, rd) = if pebble_side == side { (&rx, &ry) } else { (&ry, &rx) };
                    match pebbling(
                        s,
                        *pebble_side,
                        rs,
                        rd,
                        spoiler_pebbles,
                        duplicator_pebbles.as_deref(),
                        *spoiler_pick,
                        *duplicator_pick,
                    )? {
                        Some(cfg) => cfg,
                        None => return won(Player::Spoiler),
                    }
                }
            }
        }
        Move::Count {
            side,
            interval,
            spoiler_pebbles,
            duplicator_pebbles,
            spoiler_pick,
            duplicator_pick,
        } => {
            if !moves.allows_count_interval(interval) {
                return Err(illegal(format!("counting rounds over {interval} are not part of this game")));
            }
            if !s.intervals.contains(interval) {
                return Err(illegal(format!("interval {interval} is not in the game's interval set")));
            }
            let (wx, wy) = words(w1, w2, *side);
            let sx = window(wx, s.position(*side), interval);
            let sy = window(wy, s.position(side.other()), interval);
            match pebbling(
                s,
                *side,
                &sx,
                &sy,
                spoiler_pebbles,
                duplicator_pebbles.as_deref(),
                *spoiler_pick,
                *duplicator_pick,
            )? {
                Some(cfg) => cfg,
                None => return won(Player::Spoiler),
            }
        }
    };
    let (pos1, pos2) = next;
    if w1.events(pos1) != w2.events(pos2) {
        return won(Player::Spoiler);
    }
    if s.rounds_left == 1 {
        return won(Player::Duplicator);
    }
    Ok(Outcome::Continue {
        state: GameState {
            pos1,
            pos2,
            rounds_left: s.rounds_left - 1,
            ..s.clone()
        },
    })
}

/// Validates a pebbling in word `z` and returns the next configuration, or
/// `None` when Duplicator cannot place his pebbles.
#[allow(clippy::too_many_arguments)]
fn pebbling(
    s: &GameState,
    z: Side,
    s_range: &[usize],
    d_range: &[usize],
    spoiler: &[usize],
    duplicator: Option<&[usize]>,
    spoiler_pick: usize,
    duplicator_pick: usize,
) -> Result<Option<(usize, usize)>, GameError> {
    let c = spoiler.len();
    if c == 0 || c > s.pebbles {
        return Err(illegal(format!("between 1 and {} pebbles must be placed", s.pebbles)));
    }
    distinct_within(spoiler, s_range, "Spoiler's pebbles")?;
    let Some(duplicator) = duplicator else {
        return if d_range.len() < c {
            Ok(None)
        } else {
            Err(illegal(format!("Duplicator can place {c} pebbles and must do so")))
        };
    };
    if duplicator.len() != c {
        return Err(illegal(format!("Duplicator must place exactly {c} pebbles")));
    }
    distinct_within(duplicator, d_range, "Duplicator's pebbles")?;
    if !duplicator.contains(&spoiler_pick) {
        return Err(illegal(format!("Spoiler must pick one of Duplicator's pebbles, not {spoiler_pick}")));
    }
    if !spoiler.contains(&duplicator_pick) {
        return Err(illegal(format!(
            "Duplicator must answer with one of Spoiler's pebbles, not {duplicator_pick}"
        )));
    }
    Ok(Some(Solver::config(z, duplicator_pick, spoiler_pick)))
}

/// Copy-cat choice: the candidate whose displacement from `from_y` best
/// matches `to_x - from_x`, preferring equal event sets.
pub fn heuristic_target(
    wx: &TimedWord,
    from_x: usize,
    to_x: usize,
    wy: &TimedWord,
    from_y: usize,
    candidates: &[usize],
) -> Option<usize> {
    let want = wx.time(to_x) - wx.time(from_x);
    candidates.iter().copied().min_by_key(|&b| {
        let lag: BigRational = (wy.time(b) - wy.time(from_y) - &want).abs();
        (wy.events(b) != wx.events(to_x), lag)
    })
}

/// Where Duplicator's automatic answers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Solver,
    Heuristic,
}

/// Duplicator's automatic strategy: the solver's winning answers while the
/// budget lasts, the copy-cat heuristic afterwards.
pub struct AutoDuplicator<'w> {
    solver: Solver<'w>,
    heuristic: bool,
}

impl<'w> AutoDuplicator<'w> {
    pub fn new(solver: Solver<'w>) -> Self {
        Self {
            solver,
            heuristic: false,
        }
    }

    pub fn source(&self) -> Source {
        if self.heuristic {
            Source::Heuristic
        } else {
            Source::Solver
        }
    }

    /// Runs `exact`, switching to the heuristic for good when the budget runs out.
    fn attempt<T>(
        &mut self,
        exact: impl FnOnce(&mut Solver<'w>) -> Result<T, GameError>,
    ) -> Option<T> {
        if self.heuristic {
            return None;
        }
        match exact(&mut self.solver) {
            Ok(v) => Some(v),
            Err(_) => {
                self.heuristic = true;
                None
            }
        }
    }

    pub fn target(&mut self, s: &GameState, side: Side, interval: &Interval, target: usize) -> Option<usize> {
        let (px, py) = (s.position(side), s.position(side.other()));
        let r = s.rounds_left;
        if let Some(b) = self.attempt(|sv| sv.target_reply(side, px, py, interval, target, r)) {
            return b;
        }
        let (wx, wy) = (self.solver.word(side), self.solver.word(side.other()));
        let replies = self.solver.targets(side.other(), py, interval);
        heuristic_target(wx, px, target, wy, py, &replies)
    }

    pub fn between(&mut self, s: &GameState, side: Side, target: usize, pick: usize) -> Option<usize> {
        let (px, py) = (s.position(side), s.position(side.other()));
        let r = s.rounds_left;
        if let Some(Some(a)) = self.attempt(|sv| sv.between_reply(side, px, target, pick, r)) {
            return Some(a);
        }
        let (wx, wy) = (self.solver.word(side), self.solver.word(side.other()));
        let range: Vec<usize> = (px + 1..target).collect();
        heuristic_target(wy, py, pick, wx, px, &range)
    }

    /// Pebbles in the word opposite `z` against Spoiler's pebbles in `z`.
    pub fn pebbles(&mut self, s: &GameState, z: Side, spoiler: &[usize], d_range: &[usize]) -> Option<Vec<usize>> {
        let r = s.rounds_left - 1;
        if let Some(v) = self.attempt(|sv| sv.pebble_reply(z, spoiler, d_range, r)) {
            return v;
        }
        if d_range.len() < spoiler.len() {
            return None;
        }
        let (wz, wd) = (self.solver.word(z), self.solver.word(z.other()));
        let (oz, od) = (s.position(z), s.position(z.other()));
        let mut left: Vec<usize> = d_range.to_vec();
        let mut out = Vec::new();
        for &p in spoiler {
            let b = heuristic_target(wz, oz, p, wd, od, &left).expect("enough positions");
            left.retain(|&q| q != b);
            out.push(b);
        }
        out.sort_unstable();
        Some(out)
    }

    pub fn pick(&mut self, s: &GameState, z: Side, spoiler: &[usize], d: usize) -> usize {
        let r = s.rounds_left - 1;
        if let Some(a) = self.attempt(|sv| sv.pick_reply(z, spoiler, d, r)) {
            return a;
        }
        let (wz, wd) = (self.solver.word(z), self.solver.word(z.other()));
        let (oz, od) = (s.position(z), s.position(z.other()));
        heuristic_target(wd, od, d, wz, oz, spoiler).expect("Spoiler placed pebbles")
    }

    pub fn solver(&mut self) -> &mut Solver<'w> {
        &mut self.solver
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{default_intervals, GameParams};
    use crate::formula::Fragment;

    fn w(points: &[(&[&str], i64, i64)]) -> TimedWord {
        TimedWord::from_triples(points)
    }

    fn state(r: usize, k: usize, ivs: &[&str], fragment: Fragment) -> GameState {
        let ivs = ivs.iter().map(|s| s.parse().unwrap()).collect();
        GameState::initial(&GameParams::new(r, k, ivs, fragment))
    }

    #[test]
    fn single_points_have_no_openings() {
        let u = w(&[(&["a"], 0, 1)]);
        let s = state(2, 2, &["(0,inf)", "[0,1]"], Fragment::Ctmtl);
        let ops = openings(&u, &u, &s);
        // Only counting rounds over windows containing the point itself.
        assert!(ops.iter().all(|o| matches!(o, Opening::Count { .. })));
        let s = state(2, 2, &["(0,inf)"], Fragment::Ctmtl);
        assert!(openings(&u, &u, &s).is_empty());
    }

    #[test]
    fn identical_words_mirror_every_opening() {
        let u = w(&[(&["a"], 0, 1), (&["b"], 1, 2), (&["a", "b"], 3, 2)]);
        let ivs = default_intervals(&u, &u, Fragment::Tmtl);
        let params = GameParams::new(1, 1, ivs, Fragment::Tmtl);
        let s = GameState::initial(&params);
        for op in openings(&u, &u, &s) {
            let Opening::Until { side, interval, target } = op else {
                panic!("no counting rounds in TMTL");
            };
            let mv = Move::Until {
                side,
                interval,
                target,
                reply: Some(target),
                part: UntilPart::Eventually,
            };
            assert_eq!(play_round(&u, &u, &s, &mv).unwrap(), Outcome::Won { winner: Player::Duplicator });
        }
    }

    #[test]
    fn eventually_part_moves_to_the_targets() {
        let u = w(&[(&["a"], 0, 1), (&["b"], 1, 2), (&["b"], 1, 1)]);
        let v = w(&[(&["a"], 0, 1), (&["b"], 3, 4)]);
        let s = state(2, 1, &["(0,1)"], Fragment::Mtl);
        let mv = |target, reply| Move::Until {
            side: Side::First,
            interval: "(0,1)".parse().unwrap(),
            target,
            reply,
            part: UntilPart::Eventually,
        };
        let Outcome::Continue { state } = play_round(&u, &v, &s, &mv(1, Some(1))).unwrap() else {
            panic!("game continues");
        };
        assert_eq!((state.pos1, state.pos2, state.rounds_left), (1, 1, 1));
        // Time 1 is outside (0,1).
        let err = play_round(&u, &v, &s, &mv(2, Some(1))).unwrap_err();
        assert!(err.to_string().contains("target 2"), "{err}");
    }

    #[test]
    fn missing_reply_loses_only_when_forced() {
        let u = w(&[(&["a"], 0, 1), (&["b"], 1, 2)]);
        let v = w(&[(&["a"], 0, 1), (&["b"], 2, 1)]);
        let s = state(1, 1, &["(0,1)"], Fragment::Mtl);
        let mv = Move::Until {
            side: Side::First,
            interval: "(0,1)".parse().unwrap(),
            target: 1,
            reply: None,
            part: UntilPart::Eventually,
        };
        assert_eq!(play_round(&u, &v, &s, &mv).unwrap(), Outcome::Won { winner: Player::Spoiler });
        let mv = Move::Until {
            side: Side::First,
            interval: "(0,1)".parse().unwrap(),
            target: 1,
            reply: None,
            part: UntilPart::Eventually,
        };
        assert!(play_round(&u, &u, &s, &mv).is_err());
    }

    #[test]
    fn non_isop_configurations_end_the_game() {
        let (u, v) = (w(&[(&["a"], 0, 1)]), w(&[(&["b"], 0, 1)]));
        let s = state(1, 1, &[], Fragment::Mtl);
        let mv = Move::Count {
            side: Side::First,
            interval: "[0,1]".parse().unwrap(),
            spoiler_pebbles: vec![0],
            duplicator_pebbles: Some(vec![0]),
            spoiler_pick: 0,
            duplicator_pick: 0,
        };
        assert_eq!(play_round(&u, &v, &s, &mv).unwrap(), Outcome::Won { winner: Player::Spoiler });
    }

    #[test]
    fn pebbling_rules_are_enforced() {
        let u = w(&[(&["a"], 0, 1), (&["a"], 1, 2), (&["a"], 3, 4)]);
        let v = w(&[(&["a"], 0, 1), (&["a"], 1, 2)]);
        let s = state(1, 2, &["(0,1)"], Fragment::Cmtl);
        let count = |sp: Vec<usize>, dp: Option<Vec<usize>>, spick, dpick| Move::Count {
            side: Side::First,
            interval: "(0,1)".parse().unwrap(),
            spoiler_pebbles: sp,
            duplicator_pebbles: dp,
            spoiler_pick: spick,
            duplicator_pick: dpick,
        };
        assert_eq!(
            play_round(&u, &v, &s, &count(vec![1, 2], None, 0, 1)).unwrap(),
            Outcome::Won { winner: Player::Spoiler }
        );
        assert!(play_round(&u, &v, &s, &count(vec![1, 1], None, 0, 1)).is_err());
        assert!(play_round(&u, &v, &s, &count(vec![0], Some(vec![1]), 1, 0)).is_err());
        assert_eq!(
            play_round(&u, &v, &s, &count(vec![2], Some(vec![1]), 1, 2)).unwrap(),
            Outcome::Won { winner: Player::Duplicator }
        );
        let mtl = state(1, 2, &["(0,1)"], Fragment::Mtl);
        assert!(play_round(&u, &v, &mtl, &count(vec![2], Some(vec![1]), 1, 2)).is_err());
    }

    #[test]
    fn auto_duplicator_falls_back_to_copy_cat() {
        let u = w(&[(&["a"], 0, 1), (&["b"], 1, 2), (&["b"], 3, 2)]);
        let v = w(&[(&["a"], 0, 1), (&["b"], 1, 4), (&["b"], 3, 2)]);
        let params = GameParams::new(2, 1, vec!["(0,2)".parse().unwrap()], Fragment::Mtl);
        let s = GameState::initial(&params);
        let iv: Interval = "(0,2)".parse().unwrap();
        let mut auto = AutoDuplicator::new(Solver::new(&u, &v, &params, &super::super::Budget { nodes: 0 }));
        assert_eq!(auto.target(&s, Side::First, &iv, 2), Some(2));
        assert_eq!(auto.source(), Source::Heuristic);
        let mut auto = AutoDuplicator::new(Solver::new(&u, &v, &params, &Default::default()));
        assert!(auto.target(&s, Side::First, &iv, 1).is_some());
        assert_eq!(auto.source(), Source::Solver);
    }
}
