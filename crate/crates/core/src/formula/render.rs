use std::fmt::{self, Write};

use super::{Formula, ThresholdExpr};

// Binding strength, loosest first. Mirrors the parser's grammar levels.
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNTIL: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Until { .. } => UNTIL,
        Formula::Not(_)
        | Formula::Eventually { .. }
        | Formula::Always { .. }
        | Formula::Next { .. }
        | Formula::WeakEventually { .. }
        | Formula::WeakAlways { .. } => UNARY,
        Formula::True
        | Formula::False
        | Formula::Prop(_)
        | Formula::Count { .. }
        | Formula::WeakUntil { .. } => ATOM,
    }
}

fn child(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    if level(f) < min {
        out.write_char('(')?;
        write_formula(out, f)?;
        out.write_char(')')
    } else {
        write_formula(out, f)
    }
}

fn prefix(
    out: &mut fmt::Formatter<'_>,
    op: &str,
    interval: &crate::interval::Interval,
    body: &Formula,
) -> fmt::Result {
    out.write_str(op)?;
    if !interval.is_full() {
        write!(out, "{interval}")?;
    }
    out.write_char(' ')?;
    child(out, body, UNARY)
}

pub(super) fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Prop(p) => out.write_str(p),
        Formula::Not(g) => {
            out.write_char('!')?;
            child(out, g, UNARY)
        }
        Formula::And(a, b) => {
            child(out, a, AND)?;
            out.write_str(" & ")?;
            child(out, b, AND + 1)
        }
        Formula::Or(a, b) => {
            child(out, a, OR)?;
            out.write_str(" | ")?;
            child(out, b, OR + 1)
        }
        Formula::Implies(a, b) => {
            child(out, a, IMPLIES + 1)?;
            out.write_str(" -> ")?;
            child(out, b, IMPLIES)
        }
        Formula::Until {
            left,
            interval,
            threshold,
            right,
        } => {
            child(out, left, UNARY)?;
            out.write_str(" U")?;
            if !interval.is_full() {
                write!(out, "{interval}")?;
            }
            if let Some(t) = threshold {
                out.write_char('{')?;
                write_threshold(out, t)?;
                out.write_char('}')?;
            }
            out.write_char(' ')?;
            child(out, right, UNTIL)
        }
        Formula::Count {
            cmp,
            bound,
            interval,
            body,
        } => {
            write!(out, "C{interval}{cmp}{bound} (")?;
            write_formula(out, body)?;
            out.write_char(')')
        }
        Formula::Eventually { interval, body } => prefix(out, "F", interval, body),
        Formula::Always { interval, body } => prefix(out, "G", interval, body),
        Formula::Next { interval, body } => prefix(out, "X", interval, body),
        Formula::WeakEventually { interval, body } => prefix(out, "Fw", interval, body),
        Formula::WeakAlways { interval, body } => prefix(out, "Gw", interval, body),
        Formula::WeakUntil {
            left,
            interval,
            right,
        } => {
            out.write_str("Uw")?;
            if !interval.is_full() {
                write!(out, "{interval}")?;
            }
            out.write_char('(')?;
            write_formula(out, left)?;
            out.write_str(", ")?;
            write_formula(out, right)?;
            out.write_char(')')
        }
    }
}

const T_OR: u8 = 1;
const T_AND: u8 = 2;
const T_UNARY: u8 = 3;

fn t_level(t: &ThresholdExpr) -> u8 {
    match t {
        ThresholdExpr::Or(..) => T_OR,
        ThresholdExpr::And(..) => T_AND,
        ThresholdExpr::Not(_) | ThresholdExpr::Atom(_) => T_UNARY,
    }
}

fn t_child(out: &mut fmt::Formatter<'_>, t: &ThresholdExpr, min: u8) -> fmt::Result {
    if t_level(t) < min {
        out.write_char('(')?;
        write_threshold(out, t)?;
        out.write_char(')')
    } else {
        write_threshold(out, t)
    }
}

pub(super) fn write_threshold(out: &mut fmt::Formatter<'_>, t: &ThresholdExpr) -> fmt::Result {
    match t {
        ThresholdExpr::Atom(a) => {
            out.write_str("#(")?;
            write_formula(out, &a.counted)?;
            write!(out, "){}{}", a.cmp, a.bound)
        }
        ThresholdExpr::Not(e) => {
            out.write_char('!')?;
            t_child(out, e, T_UNARY)
        }
        ThresholdExpr::And(a, b) => {
            t_child(out, a, T_AND)?;
            out.write_str(" && ")?;
            t_child(out, b, T_AND + 1)
        }
        ThresholdExpr::Or(a, b) => {
            t_child(out, a, T_OR)?;
            out.write_str(" || ")?;
            t_child(out, b, T_OR + 1)
        }
    }
}
