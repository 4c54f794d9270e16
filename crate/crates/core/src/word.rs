//! Finite timed words with exact rational timestamps, counting sets and the
//! two temporal projections.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::formula::{Alphabet, Name};
use crate::interval::Interval;
use crate::posset::PosSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub events: BTreeSet<Name>,
    pub time: BigRational,
}

impl Point {
    pub fn new<'a>(events: impl IntoIterator<Item = &'a str>, time: BigRational) -> Self {
        Self {
            events: events.into_iter().map(Arc::from).collect(),
            time,
        }
    }

    pub fn has(&self, name: &str) -> bool {
        self.events.contains(name)
    }

    /// Whether the point carries some symbol of `sigma`.
    pub fn touches(&self, sigma: &Alphabet) -> bool {
        self.events.iter().any(|e| sigma.contains(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Strict,
    Weak,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("a timed word needs at least one point")]
    Empty,
    #[error("position {0} has an empty event set")]
    EmptyEvents(usize),
    #[error("timestamp decreases at position {0}")]
    Decreasing(usize),
    #[error("negative timestamp at position {0}")]
    NegativeTime(usize),
    #[error("position {position} out of range for a word of length {len}")]
    OutOfRange { position: usize, len: usize },
    #[error("projection undefined: position {0} carries only erased symbols")]
    UndefinedProjection(usize),
    #[error("not an oversampled behaviour: boundary position {0} is not an action point")]
    BoundaryNotAction(usize),
    #[error("trace line {line}: {message}")]
    TraceSyntax { line: usize, message: String },
    #[error("timestamps must be strictly increasing (equal at position {0})")]
    NotStrict(usize),
}

impl WordError {
    pub fn code(&self) -> &'static str {
        match self {
            WordError::Empty => "word.empty",
            WordError::EmptyEvents(_) => "word.empty_events",
            WordError::Decreasing(_) => "word.decreasing",
            WordError::NegativeTime(_) => "word.negative_time",
            WordError::OutOfRange { .. } => "word.position",
            WordError::UndefinedProjection(_) => "word.projection",
            WordError::BoundaryNotAction(_) => "word.boundary",
            WordError::TraceSyntax { .. } => "word.trace_syntax",
            WordError::NotStrict(_) => "word.not_strict",
        }
    }
}

/// Check the timed-word invariants and report strict or weak monotonicity.
pub fn validate(points: &[Point]) -> Result<Monotonicity, WordError> {
    if points.is_empty() {
        return Err(WordError::Empty);
    }
    let mut mono = Monotonicity::Strict;
    for (i, p) in points.iter().enumerate() {
        if p.events.is_empty() {
            return Err(WordError::EmptyEvents(i));
        }
        if p.time.is_negative() {
            return Err(WordError::NegativeTime(i));
        }
        if i > 0 {
            let prev = &points[i - 1].time;
            if p.time < *prev {
                return Err(WordError::Decreasing(i));
            }
            if p.time == *prev {
                mono = Monotonicity::Weak;
            }
        }
    }
    Ok(mono)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedWord {
    points: Vec<Point>,
}

impl TimedWord {
    pub fn new(points: Vec<Point>) -> Result<Self, WordError> {
        validate(&points)?;
        Ok(Self { points })
    }

    /// Build from `(events, numerator, denominator)` triples; panics on
    /// invalid input. Intended for tests and fixtures.
    pub fn from_triples(points: &[(&[&str], i64, i64)]) -> Self {
        Self::new(
            points
                .iter()
                .map(|(ev, n, d)| Point::new(ev.iter().copied(), rat(*n, *d)))
                .collect(),
        )
        .expect("valid timed word")
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn time(&self, i: usize) -> &BigRational {
        &self.points[i].time
    }

    pub fn events(&self, i: usize) -> &BTreeSet<Name> {
        &self.points[i].events
    }

    pub fn monotonicity(&self) -> Monotonicity {
        validate(&self.points).expect("validated at construction")
    }

    pub fn require_strict(&self) -> Result<(), WordError> {
        match self.points.windows(2).position(|w| w[0].time == w[1].time) {
            Some(i) => Err(WordError::NotStrict(i + 1)),
            None => Ok(()),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.points
            .iter()
            .flat_map(|p| p.events.iter().cloned())
            .collect()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    fn check(&self, i: usize) -> Result<(), WordError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(WordError::OutOfRange {
                position: i,
                len: self.len(),
            })
        }
    }

    /// Positions `k` with `t_k ∈ t_i + I`; `k` may equal `i`.
    pub fn window(&self, i: usize, interval: &Interval) -> Result<PosSet, WordError> {
        self.check(i)?;
        let ti = &self.points[i].time;
        Ok(PosSet::from_fn(self.len(), |k| {
            interval.contains(&(&self.points[k].time - ti))
        }))
    }

    /// Parse the line-oriented trace format `TIME: a, b`.
    pub fn parse_trace(text: &str) -> Result<Self, WordError> {
        let mut points = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            last_line = line;
            let syntax = |message: String| WordError::TraceSyntax { line, message };
            let (time_text, events_text) = content
                .split_once(':')
                .ok_or_else(|| syntax("expected `TIME: event, ...`".into()))?;
            let time = parse_time(time_text.trim()).map_err(syntax)?;
            let mut events = BTreeSet::new();
            for ev in events_text.split(',') {
                let ev = ev.trim();
                if !is_identifier(ev) {
                    return Err(syntax(format!("`{ev}` is not a valid event name")));
                }
                events.insert(Arc::from(ev));
            }
            if let Some(prev) = points.last() {
                let prev: &Point = prev;
                if time < prev.time {
                    return Err(syntax("timestamps must be monotone".into()));
                }
            }
            points.push(Point { events, time });
        }
        if points.is_empty() {
            return Err(WordError::TraceSyntax {
                line: last_line,
                message: "trace contains no points".into(),
            });
        }
        Self::new(points)
    }

    /// Render in the trace format, one point per line.
    pub fn to_trace(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let events: Vec<&str> = p.events.iter().map(|e| &**e).collect();
            out.push_str(&format_time(&p.time));
            out.push_str(": ");
            out.push_str(&events.join(", "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for TimedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.points {
            let events: Vec<&str> = p.events.iter().map(|e| &**e).collect();
            write!(f, "({{{}}},{})", events.join(","), format_time(&p.time))?;
        }
        Ok(())
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        && !crate::formula::KEYWORDS.contains(&s)
}

/// Parse `12`, `0.35` or `7/3` exactly.
pub fn parse_time(text: &str) -> Result<BigRational, String> {
    let bad = || format!("`{text}` is not a non-negative decimal or fraction");
    if let Some((p, q)) = text.split_once('/') {
        let p: BigUint = p.trim().parse().map_err(|_| bad())?;
        let q: BigUint = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(format!("`{text}` has a zero denominator"));
        }
        return Ok(BigRational::new(p.into(), q.into()));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if int.is_empty() && frac.is_empty() || !digits_ok(int) || !digits_ok(frac) {
        return Err(bad());
    }
    let numer: BigUint = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let denom = BigUint::from(10u32).pow(frac.len() as u32);
    Ok(BigRational::new(numer.into(), denom.into()))
}

/// Exact rendering: integers and finite decimals as decimals, otherwise `p/q`.
pub fn format_time(t: &BigRational) -> String {
    if t.is_integer() {
        return t.numer().to_string();
    }
    let mut d = t.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0u32, 0u32);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", t.numer(), t.denom());
    }
    let places = twos.max(fives);
    let scaled = t * BigRational::from_integer(BigInt::from(10).pow(places));
    let digits = scaled.to_integer().abs().to_string();
    let padded = format!("{:0>width$}", digits, width = places as usize + 1);
    let (int, frac) = padded.split_at(padded.len() - places as usize);
    let sign = if t.is_negative() { "-" } else { "" };
    format!("{sign}{int}.{frac}")
}

/// `|{k : t_k ∈ t_i + I, k ∈ holds}|`.
pub fn count_in_interval(
    w: &TimedWord,
    i: usize,
    interval: &Interval,
    holds: &PosSet,
) -> Result<usize, WordError> {
    Ok(w.window(i, interval)?.and(holds).count())
}

/// `|{k : i < k < j, k ∈ holds}|`.
pub fn count_between(w: &TimedWord, i: usize, j: usize, holds: &PosSet) -> Result<usize, WordError> {
    w.check(i)?;
    w.check(j)?;
    Ok((i + 1..j).filter(|k| holds.contains(*k)).count())
}

/// Erase the symbols of `x` from every point; every point must keep a symbol.
pub fn simple_projection(w: &TimedWord, x: &Alphabet) -> Result<TimedWord, WordError> {
    let mut points = Vec::with_capacity(w.len());
    for (i, p) in w.points.iter().enumerate() {
        let events: BTreeSet<Name> = p.events.difference(x).cloned().collect();
        if events.is_empty() {
            return Err(WordError::UndefinedProjection(i));
        }
        points.push(Point {
            events,
            time: p.time.clone(),
        });
    }
    TimedWord::new(points)
}

/// Delete the points carrying only symbols of `x`, then erase `x` from the
/// rest. The first and last points must keep a symbol outside `x`.
pub fn oversampled_projection(w: &TimedWord, x: &Alphabet) -> Result<TimedWord, WordError> {
    let is_action = |p: &Point| p.events.iter().any(|e| !x.contains(e));
    let last = w.len() - 1;
    for boundary in [0, last] {
        if !is_action(&w.points[boundary]) {
            return Err(WordError::BoundaryNotAction(boundary));
        }
    }
    let points = w
        .points
        .iter()
        .filter(|p| is_action(p))
        .map(|p| Point {
            events: p.events.difference(x).cloned().collect(),
            time: p.time.clone(),
        })
        .collect();
    TimedWord::new(points)
}

/// Keep only the points carrying a symbol of `sigma`, restricted to `sigma`.
pub fn restrict_to(w: &TimedWord, sigma: &Alphabet) -> Result<TimedWord, WordError> {
    let others: Alphabet = w.alphabet().difference(sigma).cloned().collect();
    oversampled_projection(w, &others)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> TimedWord {
        TimedWord::from_triples(&[(&["a", "b"], 3, 10), (&["b"], 7, 10), (&["a"], 11, 10)])
    }

    fn names(xs: &[&str]) -> Alphabet {
        xs.iter().map(|s| Arc::from(*s)).collect()
    }

    fn holds(w: &TimedWord, name: &str) -> PosSet {
        PosSet::from_fn(w.len(), |k| w.points()[k].has(name))
    }

    #[test]
    fn validation() {
        assert_eq!(example().monotonicity(), Monotonicity::Strict);
        let single = TimedWord::from_triples(&[(&["a"], 0, 1)]);
        assert_eq!(single.monotonicity(), Monotonicity::Strict);
        let weak = TimedWord::from_triples(&[(&["a"], 1, 1), (&["b"], 1, 1)]);
        assert_eq!(weak.monotonicity(), Monotonicity::Weak);
        assert_eq!(TimedWord::new(vec![]), Err(WordError::Empty));
        let dec = vec![Point::new(["a"], rat(2, 1)), Point::new(["a"], rat(1, 1))];
        assert_eq!(TimedWord::new(dec), Err(WordError::Decreasing(1)));
        let empty = vec![Point::new([], rat(0, 1))];
        assert_eq!(TimedWord::new(empty), Err(WordError::EmptyEvents(0)));
    }

    #[test]
    fn counting_sets() {
        let w = example();
        let open01 = Interval::bounded(0, 1, false, false);
        assert_eq!(count_in_interval(&w, 0, &open01, &holds(&w, "b")).unwrap(), 1);
        assert_eq!(count_in_interval(&w, 0, &open01, &PosSet::full(3)).unwrap(), 2);
        let point = Interval::bounded(0, 0, true, true);
        assert_eq!(count_in_interval(&w, 2, &point, &PosSet::full(3)).unwrap(), 1);
        assert_eq!(count_between(&w, 0, 2, &holds(&w, "b")).unwrap(), 1);
        assert_eq!(count_between(&w, 1, 1, &PosSet::full(3)).unwrap(), 0);
        assert_eq!(count_between(&w, 0, 1, &PosSet::full(3)).unwrap(), 0);
        assert!(count_between(&w, 0, 3, &PosSet::full(3)).is_err());
    }

    #[test]
    fn simple_projection_erases_symbols() {
        let w = TimedWord::from_triples(&[(&["a", "b", "c"], 1, 5), (&["b", "c"], 1, 1), (&["c"], 13, 10)]);
        let expected = TimedWord::from_triples(&[(&["a", "c"], 1, 5), (&["c"], 1, 1), (&["c"], 13, 10)]);
        assert_eq!(simple_projection(&w, &names(&["b"])).unwrap(), expected);
        assert_eq!(simple_projection(&w, &names(&["z"])).unwrap(), w);
        let bad = TimedWord::from_triples(&[(&["a"], 1, 5), (&["c", "d"], 3, 10)]);
        assert_eq!(
            simple_projection(&bad, &names(&["c", "d"])),
            Err(WordError::UndefinedProjection(1))
        );
    }

    #[test]
    fn oversampled_projection_deletes_points() {
        let w = TimedWord::from_triples(&[
            (&["a"], 1, 5),
            (&["c", "d"], 3, 10),
            (&["a", "b"], 7, 10),
            (&["b", "d"], 11, 10),
        ]);
        let expected = TimedWord::from_triples(&[(&["a"], 1, 5), (&["a", "b"], 7, 10), (&["b"], 11, 10)]);
        assert_eq!(oversampled_projection(&w, &names(&["c", "d"])).unwrap(), expected);
        let bad = TimedWord::from_triples(&[(&["a"], 1, 5), (&["c", "d"], 3, 10), (&["c"], 11, 10)]);
        assert_eq!(
            oversampled_projection(&bad, &names(&["c", "d"])),
            Err(WordError::BoundaryNotAction(2))
        );
    }

    #[test]
    fn trace_round_trip() {
        let text = "# example\n0.3: a, b\n7/10 : b\n1.1: a\n";
        let w = TimedWord::parse_trace(text).unwrap();
        assert_eq!(w, example());
        assert_eq!(w.to_trace(), "0.3: a, b\n0.7: b\n1.1: a\n");
        let third = TimedWord::parse_trace("1/3: a\n2: b").unwrap();
        assert_eq!(TimedWord::parse_trace(&third.to_trace()).unwrap(), third);
        assert_eq!(format_time(&rat(1, 3)), "1/3");
        assert_eq!(format_time(&rat(1, 40)), "0.025");
    }

    #[test]
    fn trace_errors() {
        assert!(matches!(
            TimedWord::parse_trace("1: a\n0.5: b"),
            Err(WordError::TraceSyntax { line: 2, .. })
        ));
        assert!(TimedWord::parse_trace("x: a").is_err());
        assert!(TimedWord::parse_trace("1: U").is_err());
        assert!(TimedWord::parse_trace("# nothing").is_err());
    }
}
