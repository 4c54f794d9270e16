use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// A time interval with natural endpoints, possibly right-unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: BigUint,
    hi: Option<BigUint>,
    lo_closed: bool,
    hi_closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("malformed interval: lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: BigUint, hi: BigUint },
    #[error("malformed interval: a degenerate interval [{0},{0}] must be closed on both sides")]
    OpenDegenerate(BigUint),
    #[error("malformed interval: an unbounded interval cannot be right-closed")]
    ClosedInfinity,
    #[error("malformed interval: expected `[lo,hi]`, `(lo,hi)`, or `[lo,inf)`, got `{0}`")]
    Syntax(String),
}

impl Interval {
    pub fn new(
        lo: BigUint,
        hi: Option<BigUint>,
        lo_closed: bool,
        hi_closed: bool,
    ) -> Result<Self, IntervalError> {
        match &hi {
            None if hi_closed => return Err(IntervalError::ClosedInfinity),
            Some(h) if *h < lo => {
                return Err(IntervalError::Inverted {
                    lo,
                    hi: h.clone(),
                })
            }
            Some(h) if *h == lo && !(lo_closed && hi_closed) => {
                return Err(IntervalError::OpenDegenerate(lo))
            }
            _ => {}
        }
        Ok(Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// Convenience constructor for small bounded intervals; panics on malformed input.
    pub fn bounded(lo: u64, hi: u64, lo_closed: bool, hi_closed: bool) -> Self {
        Self::new(lo.into(), Some(hi.into()), lo_closed, hi_closed).expect("well-formed interval")
    }

    pub fn unbounded(lo: u64, lo_closed: bool) -> Self {
        Self::new(lo.into(), None, lo_closed, false).expect("well-formed interval")
    }

    /// `[0, inf)`, the interval of untimed operators.
    pub fn full() -> Self {
        Self::unbounded(0, true)
    }

    pub fn lo(&self) -> &BigUint {
        &self.lo
    }

    pub fn hi(&self) -> Option<&BigUint> {
        self.hi.as_ref()
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_some()
    }

    pub fn is_full(&self) -> bool {
        self.hi.is_none() && self.lo.is_zero() && self.lo_closed
    }

    pub fn is_punctual(&self) -> bool {
        self.hi.as_ref() == Some(&self.lo)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.is_zero() && self.lo_closed
    }

    /// `<l, inf)` with the same left bracket.
    pub fn unbounded_closure(&self) -> Self {
        Self {
            lo: self.lo.clone(),
            hi: None,
            lo_closed: self.lo_closed,
            hi_closed: false,
        }
    }

    /// Membership of a time difference `d` in the interval.
    pub fn contains(&self, d: &BigRational) -> bool {
        let lo = BigRational::from_integer(self.lo.clone().into());
        let above = if self.lo_closed { *d >= lo } else { *d > lo };
        if !above {
            return false;
        }
        match &self.hi {
            None => true,
            Some(h) => {
                let hi = BigRational::from_integer(h.clone().into());
                if self.hi_closed {
                    *d <= hi
                } else {
                    *d < hi
                }
            }
        }
    }

    /// Endpoints as machine integers, when they fit.
    pub fn lo_usize(&self) -> Option<usize> {
        self.lo.to_usize()
    }

    pub fn hi_usize(&self) -> Option<usize> {
        self.hi.as_ref().and_then(|h| h.to_usize())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        write!(f, "{open}{},", self.lo)?;
        match &self.hi {
            None => write!(f, "inf)"),
            Some(h) => write!(f, "{h}{}", if self.hi_closed { ']' } else { ')' }),
        }
    }
}

impl FromStr for Interval {
    type Err = IntervalError;

    /// Parses the rendered form, e.g. `[0,1)` or `(2,inf)`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let syntax = || IntervalError::Syntax(text.to_string());
        let t = text.trim();
        let lo_closed = match t.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(syntax()),
        };
        let hi_closed = match t.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(syntax()),
        };
        let (lo, hi) = t[1..t.len() - 1].split_once(',').ok_or_else(syntax)?;
        let lo: BigUint = lo.trim().parse().map_err(|_| syntax())?;
        let hi = match hi.trim() {
            "inf" | "oo" => None,
            h => Some(h.parse::<BigUint>().map_err(|_| syntax())?),
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_its_own_rendering() {
        for text in ["[0,1)", "(2,inf)", "[3,3]", "(0,5]"] {
            assert_eq!(text.parse::<Interval>().unwrap().to_string(), text);
        }
        assert!("[1,1)".parse::<Interval>().is_err());
        assert!("[1,inf]".parse::<Interval>().is_err());
        assert!("1,2".parse::<Interval>().is_err());
    }

    #[test]
    fn brackets_decide_boundary_membership() {
        let i = Interval::bounded(1, 2, false, true);
        assert!(!i.contains(&q(1, 1)));
        assert!(i.contains(&q(3, 2)));
        assert!(i.contains(&q(2, 1)));
        assert!(!i.contains(&q(21, 10)));
    }

    #[test]
    fn unbounded_contains_everything_above() {
        let i = Interval::unbounded(2, true);
        assert!(i.contains(&q(2, 1)));
        assert!(i.contains(&q(1000, 1)));
        assert!(!i.contains(&q(19, 10)));
        assert!(Interval::full().contains(&q(0, 1)));
    }

    #[test]
    fn malformed_intervals_are_rejected() {
        assert!(matches!(
            Interval::new(3u32.into(), Some(2u32.into()), true, true),
            Err(IntervalError::Inverted { .. })
        ));
        assert!(matches!(
            Interval::new(1u32.into(), Some(1u32.into()), true, false),
            Err(IntervalError::OpenDegenerate(_))
        ));
        assert!(matches!(
            Interval::new(1u32.into(), None, true, true),
            Err(IntervalError::ClosedInfinity)
        ));
    }

    #[test]
    fn display_uses_grammar_syntax() {
        assert_eq!(Interval::bounded(0, 1, false, false).to_string(), "(0,1)");
        assert_eq!(Interval::unbounded(2, true).to_string(), "[2,inf)");
        assert_eq!(Interval::bounded(3, 3, true, true).to_string(), "[3,3]");
    }

    #[test]
    fn punctual_and_zero() {
        assert!(Interval::bounded(3, 3, true, true).is_punctual());
        assert!(Interval::bounded(0, 3, true, false).contains_zero());
        assert!(!Interval::bounded(0, 3, false, false).contains_zero());
    }
}
