//! `game play`: the user plays Spoiler, the solver plays Duplicator.
//!
//! One Spoiler action per line:
//!
//! ```text
//! until 1 (0,2) 3        until round in rho1 over (0,2), target position 3
//! count 2 [0,1] 1,2      counting round in rho2, pebbles on positions 1 and 2
//! end                    close an until round at the targets
//! between 2              U part: pick position 2 between Duplicator's endpoints
//! pebble 1 1,2           counting part: pebble positions 1 and 2 of rho1
//! pick 4                 pick one of Duplicator's pebbles
//! moves | state | help | quit
//! ```

use std::io::{self, BufRead, IsTerminal, Write};

use ctmtl::game::{
    play_round, AutoDuplicator, GameParams, GameState, Move, MoveSet, Opening, Outcome, Player, Side,
    Solver, UntilPart,
};
use ctmtl::{Interval, TimedWord};
use serde_json::json;

use crate::io::{Failure, Result};

enum Stage {
    Open,
    Part {
        side: Side,
        interval: Interval,
        target: usize,
        reply: usize,
    },
    Pick(Pending),
}

struct Pending {
    round: Round,
    /// Word Spoiler pebbled.
    z: Side,
    spoiler: Vec<usize>,
    duplicator: Vec<usize>,
}

enum Round {
    Until {
        side: Side,
        interval: Interval,
        target: usize,
        reply: usize,
    },
    Count {
        side: Side,
        interval: Interval,
    },
}

pub struct Session<'w> {
    w1: &'w TimedWord,
    w2: &'w TimedWord,
    state: GameState,
    stage: Stage,
    auto: AutoDuplicator<'w>,
    dump: bool,
}

fn side_arg(s: &str) -> std::result::Result<Side, String> {
    match s {
        "1" | "rho1" => Ok(Side::First),
        "2" | "rho2" => Ok(Side::Second),
        _ => Err(format!("`{s}` is not a word: use 1 or 2")),
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::First => "rho1",
        Side::Second => "rho2",
    }
}

fn position(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a position"))
}

fn positions(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',').map(|p| position(p.trim())).collect()
}

fn list(ps: &[usize]) -> String {
    ps.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl<'w> Session<'w> {
    pub fn new(w1: &'w TimedWord, w2: &'w TimedWord, params: &GameParams, budget: &ctmtl::game::Budget, dump: bool) -> Self {
        Self {
            w1,
            w2,
            state: GameState::initial(params),
            stage: Stage::Open,
            auto: AutoDuplicator::new(Solver::new(w1, w2, params, budget)),
            dump,
        }
    }

    fn say(&self, out: &mut impl Write, line: &str) {
        let _ = writeln!(out, "{line}");
    }

    fn dump_state(&self, out: &mut impl Write) {
        if self.dump {
            let record = json!({
                "pos1": self.state.pos1,
                "pos2": self.state.pos2,
                "rounds_left": self.state.rounds_left,
                "pebbles": self.state.pebbles,
                "duplicator": format!("{:?}", self.auto.source()).to_lowercase(),
            });
            self.say(out, &format!("state {record}"));
        }
    }

    fn word(&self, side: Side) -> &'w TimedWord {
        match side {
            Side::First => self.w1,
            Side::Second => self.w2,
        }
    }

    fn describe(&self, side: Side, p: usize) -> String {
        let w = self.word(side);
        let events: Vec<&str> = w.events(p).iter().map(|e| &**e).collect();
        format!("{}[{p}] = {{{}}} @ {}", side_name(side), events.join(","), ctmtl::word::format_time(w.time(p)))
    }

    /// Runs the loop until the game ends or input closes.
    pub fn run(&mut self, input: impl BufRead, out: &mut impl Write) -> Result<Option<Player>> {
        let prompt = io::stdin().is_terminal();
        self.say(out, &format!(
            "game: {} rounds, {} pebbles, {} intervals, {} moves",
            self.state.rounds_left,
            self.state.pebbles,
            self.state.intervals.len(),
            self.state.fragment.name()
        ));
        self.say(out, &format!("start: {} vs {}", self.describe(Side::First, self.state.pos1), self.describe(Side::Second, self.state.pos2)));
        if self.w1.events(self.state.pos1) != self.w2.events(self.state.pos2) {
            self.say(out, "winner: Spoiler (the start positions carry different events)");
            return Ok(Some(Player::Spoiler));
        }
        self.dump_state(out);
        let mut lines = input.lines();
        loop {
            if prompt {
                let _ = write!(out, "> ");
                let _ = out.flush();
            }
            let Some(line) = lines.next() else {
                return Ok(None);
            };
            let line = line.map_err(|e| Failure::usage("io.read", e.to_string()))?;
            let words: Vec<&str> = line.split_whitespace().collect();
            if words.is_empty() || words[0].starts_with('#') {
                continue;
            }
            match self.step(&words, out) {
                Ok(Some(winner)) => {
                    self.say(out, &format!("winner: {winner:?}"));
                    return Ok(Some(winner));
                }
                Ok(None) => {}
                Err(msg) if msg == "quit" => return Ok(None),
                Err(msg) => self.say(out, &format!("illegal: {msg}")),
            }
        }
    }

    fn step(&mut self, words: &[&str], out: &mut impl Write) -> std::result::Result<Option<Player>, String> {
        match words {
            ["quit" | "exit"] => return Err("quit".into()),
            ["help"] => {
                self.say(out, "until S I T | count S I P,.. | end | between P | pebble S P,.. | pick P | moves | state | quit");
                return Ok(None);
            }
            ["state"] => {
                self.say(out, &format!(
                    "at {} vs {}, {} rounds left",
                    self.describe(Side::First, self.state.pos1),
                    self.describe(Side::Second, self.state.pos2),
                    self.state.rounds_left
                ));
                return Ok(None);
            }
            ["moves"] => {
                for op in ctmtl::game::openings(self.w1, self.w2, &self.state) {
                    let line = match op {
                        Opening::Until { side, interval, target } => format!("until {} {interval} {target}", side.index() + 1),
                        Opening::Count { side, interval, pebbles } => format!("count {} {interval} <{pebbles} positions>", side.index() + 1),
                    };
                    self.say(out, &line);
                }
                return Ok(None);
            }
            _ => {}
        }
        // `advance` puts the stage back when it rejects a line.
        let stage = std::mem::replace(&mut self.stage, Stage::Open);
        self.advance(stage, words, out)
    }

    fn advance(&mut self, stage: Stage, words: &[&str], out: &mut impl Write) -> std::result::Result<Option<Player>, String> {
        let moves = MoveSet::for_fragment(self.state.fragment);
        match (stage, words) {
            (Stage::Open, ["until", s, i, t]) => {
                let (side, interval, target) = (side_arg(s)?, parse_interval(i)?, position(t)?);
                if !moves.until {
                    return Err("until rounds are not part of this game".into());
                }
                self.known_interval(&interval)?;
                let px = self.state.position(side);
                let solver = self.auto.solver();
                if !solver.targets(side, px, &interval).contains(&target) {
                    return Err(format!("target {target} must lie strictly after {px} with its distance in {interval}"));
                }
                match self.auto.target(&self.state, side, &interval, target) {
                    None => {
                        self.say(out, &format!("Duplicator has no reply in {} within {interval}", side_name(side.other())));
                        Ok(Some(Player::Spoiler))
                    }
                    Some(reply) => {
                        self.say(out, &format!("Duplicator replies {} [{}]", self.describe(side.other(), reply), self.source()));
                        self.stage = Stage::Part { side, interval, target, reply };
                        Ok(None)
                    }
                }
            }
            (Stage::Open, ["count", s, i, ps]) => {
                let (side, interval, spoiler) = (side_arg(s)?, parse_interval(i)?, positions(ps)?);
                if !moves.allows_count_interval(&interval) {
                    return Err(format!("counting rounds over {interval} are not part of this game"));
                }
                self.known_interval(&interval)?;
                let solver = self.auto.solver();
                let sx = solver.window(side, self.state.position(side), &interval);
                let sy = solver.window(side.other(), self.state.position(side.other()), &interval);
                self.pebble(Round::Count { side, interval }, side, spoiler, &sx, &sy, out)
            }
            (Stage::Part { side, interval, target, reply }, ["end"]) => {
                let mv = Move::Until { side, interval, target, reply: Some(reply), part: UntilPart::Eventually };
                self.finish(&mv, out)
            }
            (Stage::Part { side, interval, target, reply }, ["between", p]) => {
                let pick = position(p)?;
                let py = self.state.position(side.other());
                if !(py < pick && pick < reply) {
                    self.stage = Stage::Part { side, interval, target, reply };
                    return Err(format!("pick {pick} must lie strictly between {py} and {reply}"));
                }
                let answer = self.auto.between(&self.state, side, target, pick);
                match answer {
                    Some(a) => self.say(out, &format!("Duplicator answers {} [{}]", self.describe(side, a), self.source())),
                    None => self.say(out, &format!("Duplicator has no position strictly between in {}", side_name(side))),
                }
                let part = UntilPart::Between { spoiler_pick: pick, duplicator_pick: answer };
                self.finish(&Move::Until { side, interval, target, reply: Some(reply), part }, out)
            }
            (Stage::Part { side, interval, target, reply }, ["pebble", z, ps]) => {
                if !moves.counting_part {
                    self.stage = Stage::Part { side, interval, target, reply };
                    return Err("counting parts are not part of this game".into());
                }
                let (z, spoiler) = match (side_arg(z), positions(ps)) {
                    (Ok(z), Ok(p)) => (z, p),
                    (Err(e), _) | (_, Err(e)) => {
                        self.stage = Stage::Part { side, interval, target, reply };
                        return Err(e);
                    }
                };
                let (px, py) = (self.state.position(side), self.state.position(side.other()));
                let rx: Vec<usize> = (px + 1..target).collect();
                let ry: Vec<usize> = (py + 1..reply).collect();
                let (rs, rd) = if z == side { (rx, ry) } else { (ry, rx) };
                let round = Round::Until { side, interval: interval.clone(), target, reply };
                let result = self.pebble(round, z, spoiler, &rs, &rd, out);
                if result.is_err() {
                    self.stage = Stage::Part { side, interval, target, reply };
                }
                result
            }
            (Stage::Pick(p), ["pick", d]) => {
                let d = match position(d) {
                    Ok(d) if p.duplicator.contains(&d) => d,
                    Ok(d) => {
                        let msg = format!("{d} is not one of Duplicator's pebbles {}", list(&p.duplicator));
                        self.stage = Stage::Pick(p);
                        return Err(msg);
                    }
                    Err(e) => {
                        self.stage = Stage::Pick(p);
                        return Err(e);
                    }
                };
                let a = self.auto.pick(&self.state, p.z, &p.spoiler, d);
                self.say(out, &format!("Duplicator answers {} [{}]", self.describe(p.z, a), self.source()));
                let mv = match p.round {
                    Round::Until { side, interval, target, reply } => Move::Until {
                        side,
                        interval,
                        target,
                        reply: Some(reply),
                        part: UntilPart::Counting {
                            pebble_side: p.z,
                            spoiler_pebbles: p.spoiler,
                            duplicator_pebbles: Some(p.duplicator),
                            spoiler_pick: d,
                            duplicator_pick: a,
                        },
                    },
                    Round::Count { side, interval } => Move::Count {
                        side,
                        interval,
                        spoiler_pebbles: p.spoiler,
                        duplicator_pebbles: Some(p.duplicator),
                        spoiler_pick: d,
                        duplicator_pick: a,
                    },
                };
                self.finish(&mv, out)
            }
            (stage, _) => {
                let expected = match &stage {
                    Stage::Open => "until S I T | count S I P,..",
                    Stage::Part { .. } => "end | between P | pebble S P,..",
                    Stage::Pick(_) => "pick P",
                };
                self.stage = stage;
                Err(format!("expected {expected}"))
            }
        }
    }

    fn known_interval(&self, i: &Interval) -> std::result::Result<(), String> {
        if self.state.intervals.contains(i) {
            Ok(())
        } else {
            Err(format!("interval {i} is not in the game's interval set"))
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn pebble(
        &mut self,
        round: Round,
        z: Side,
        spoiler: Vec<usize>,
        s_range: &[usize],
        d_range: &[usize],
        out: &mut impl Write,
    ) -> std::result::Result<Option<Player>, String> {
        let c = spoiler.len();
        if c == 0 || c > self.state.pebbles {
            return Err(format!("place between 1 and {} pebbles", self.state.pebbles));
        }
        let mut sorted = spoiler.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != c {
            return Err("pebbled positions must be distinct".into());
        }
        if let Some(p) = spoiler.iter().find(|p| !s_range.contains(p)) {
            return Err(format!("position {p} is outside the pebbling range {}", list(s_range)));
        }
        match self.auto.pebbles(&self.state, z, &spoiler, d_range) {
            None => {
                self.say(out, &format!("Duplicator cannot place {c} pebbles in {}", side_name(z.other())));
                Ok(Some(Player::Spoiler))
            }
            Some(duplicator) => {
                self.say(out, &format!("Duplicator pebbles {}: {} [{}]", side_name(z.other()), list(&duplicator), self.source()));
                self.stage = Stage::Pick(Pending { round, z, spoiler, duplicator });
                Ok(None)
            }
        }
    }

    fn source(&self) -> &'static str {
        match self.auto.source() {
            ctmtl::game::Source::Solver => "solver",
            ctmtl::game::Source::Heuristic => "heuristic",
        }
    }

    fn finish(&mut self, mv: &Move, out: &mut impl Write) -> std::result::Result<Option<Player>, String> {
        match play_round(self.w1, self.w2, &self.state, mv).map_err(|e| e.to_string())? {
            Outcome::Won { winner } => Ok(Some(winner)),
            Outcome::Continue { state } => {
                self.state = state;
                self.say(out, &format!(
                    "now {} vs {}, {} rounds left",
                    self.describe(Side::First, self.state.pos1),
                    self.describe(Side::Second, self.state.pos2),
                    self.state.rounds_left
                ));
                self.dump_state(out);
                Ok(None)
            }
        }
    }
}

fn parse_interval(s: &str) -> std::result::Result<Interval, String> {
    s.parse().map_err(|e: ctmtl::interval::IntervalError| e.to_string())
}
