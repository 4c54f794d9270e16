use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use super::metrics::visit;
use super::Formula;

/// Syntactic fragments of CTMTL, from the most restrictive upwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Fragment {
    Mitl,
    Mtl,
    C01Mtl,
    C0Mtl,
    Cmtl,
    Tmtl,
    Ctmtl,
}

impl Fragment {
    pub const ALL: [Fragment; 7] = [
        Fragment::Mitl,
        Fragment::Mtl,
        Fragment::C01Mtl,
        Fragment::C0Mtl,
        Fragment::Cmtl,
        Fragment::Tmtl,
        Fragment::Ctmtl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fragment::Mitl => "MITL",
            Fragment::Mtl => "MTL",
            Fragment::C01Mtl => "C01MTL",
            Fragment::C0Mtl => "C0MTL",
            Fragment::Cmtl => "CMTL",
            Fragment::Tmtl => "TMTL",
            Fragment::Ctmtl => "CTMTL",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }

    /// Inclusion between fragments. TMTL and the C-fragments are incomparable.
    pub fn is_within(self, other: Fragment) -> bool {
        use Fragment::*;
        let chain = |f: Fragment| match f {
            Mitl => 0,
            Mtl => 1,
            C01Mtl => 2,
            C0Mtl => 3,
            Cmtl => 4,
            Tmtl => 5,
            Ctmtl => 6,
        };
        match (self, other) {
            (_, Ctmtl) => true,
            (Tmtl, Tmtl) => true,
            (Tmtl, _) => false,
            (a, Tmtl) => matches!(a, Mitl | Mtl),
            (a, b) => chain(a) <= chain(b),
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Least fragment containing `f`.
pub fn classify_fragment(f: &Formula) -> Fragment {
    let mut has_count = false;
    let mut counts_from_zero = true;
    let mut counts_within_unit = true;
    let mut has_threshold = false;
    let mut punctual = false;
    visit(f, |g| match g {
        Formula::Count { interval, .. } => {
            has_count = true;
            punctual |= interval.is_punctual();
            if !interval.lo().is_zero() {
                counts_from_zero = false;
            }
            if !interval.lo().is_zero() || interval.hi() != Some(&BigUint::from(1u32)) {
                counts_within_unit = false;
            }
        }
        Formula::Until {
            interval,
            threshold,
            ..
        } => {
            punctual |= interval.is_punctual();
            if matches!(threshold, Some(t) if !t.is_trivial()) {
                has_threshold = true;
            }
        }
        Formula::Eventually { interval, .. }
        | Formula::Always { interval, .. }
        | Formula::Next { interval, .. }
        | Formula::WeakEventually { interval, .. }
        | Formula::WeakAlways { interval, .. }
        | Formula::WeakUntil { interval, .. } => punctual |= interval.is_punctual(),
        _ => {}
    });
    match (has_count, has_threshold) {
        (false, false) if !punctual => Fragment::Mitl,
        (false, false) => Fragment::Mtl,
        (false, true) => Fragment::Tmtl,
        (true, false) if counts_within_unit => Fragment::C01Mtl,
        (true, false) if counts_from_zero => Fragment::C0Mtl,
        (true, false) => Fragment::Cmtl,
        (true, true) => Fragment::Ctmtl,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{desugar, parse_formula};

    fn classify(s: &str) -> Fragment {
        classify_fragment(&desugar(&parse_formula(s).unwrap()))
    }

    #[test]
    fn serialized_names_match_display_names() {
        for f in Fragment::ALL {
            assert_eq!(serde_json::to_value(f).unwrap(), f.name());
        }
    }

    #[test]
    fn labels() {
        assert_eq!(classify("a U(1,2) b"), Fragment::Mitl);
        assert_eq!(classify("a U[1,1] b"), Fragment::Mtl);
        assert_eq!(classify("C(0,2)>=2 (a)"), Fragment::C0Mtl);
        assert_eq!(classify("C(0,1)=2 (a)"), Fragment::C01Mtl);
        assert_eq!(classify("C(1,2)>=2 (a)"), Fragment::Cmtl);
        assert_eq!(classify("true U(0,1){#(a)>=3} b"), Fragment::Tmtl);
        assert_eq!(classify("C(1,2)>=2 (a U{#(b)<1} c)"), Fragment::Ctmtl);
    }

    #[test]
    fn inclusion_order() {
        assert!(Fragment::Mitl.is_within(Fragment::Cmtl));
        assert!(Fragment::C01Mtl.is_within(Fragment::C0Mtl));
        assert!(!Fragment::Tmtl.is_within(Fragment::Cmtl));
        assert!(!Fragment::Cmtl.is_within(Fragment::Tmtl));
        assert!(Fragment::Mtl.is_within(Fragment::Tmtl));
    }
}
