use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use super::build;
use super::{Cmp, Formula, ThresholdExpr, F};
use crate::interval::{Interval, IntervalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown comparison operator `{0}`")]
    UnknownComparison(String),
    #[error(transparent)]
    MalformedInterval(#[from] IntervalError),
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax(_) => "formula.syntax",
            ParseErrorKind::UnknownComparison(_) => "formula.comparison",
            ParseErrorKind::MalformedInterval(_) => "formula.interval",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    AndAnd,
    OrOr,
    Hash,
    Cmp(Cmp),
    Nat(BigUint),
    Ident(String),
    True,
    False,
    Until,
    Eventually,
    Always,
    Next,
    WeakEventually,
    WeakAlways,
    WeakUntil,
    Count,
    Inf,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Hash => "#",
            Tok::Cmp(c) => c.symbol(),
            Tok::True => "true",
            Tok::False => "false",
            Tok::Until => "U",
            Tok::Eventually => "F",
            Tok::Always => "G",
            Tok::Next => "X",
            Tok::WeakEventually => "Fw",
            Tok::WeakAlways => "Gw",
            Tok::WeakUntil => "Uw",
            Tok::Count => "C",
            Tok::Inf => "inf",
            Tok::Nat(_) | Tok::Ident(_) | Tok::Eof => "",
        }
    }
}

/// Words that cannot be used as proposition names.
pub const KEYWORDS: [&str; 11] = [
    "true", "false", "U", "F", "G", "X", "Fw", "Gw", "Uw", "C", "inf",
];

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "true" => Tok::True,
        "false" => Tok::False,
        "U" => Tok::Until,
        "F" => Tok::Eventually,
        "G" => Tok::Always,
        "X" => Tok::Next,
        "Fw" => Tok::WeakEventually,
        "Gw" => Tok::WeakAlways,
        "Uw" => Tok::WeakUntil,
        "C" => Tok::Count,
        "inf" => Tok::Inf,
        _ => return None,
    })
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    let err = |line, column, kind| ParseError { line, column, kind };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let peek = chars.get(i + 1).copied();
        let (tok, width) = match (c, peek) {
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('>', Some('=')) => (Tok::Cmp(Cmp::Ge), 2),
            ('<', Some('=')) => (Tok::Cmp(Cmp::Le), 2),
            ('=', Some('=')) | ('!', Some('=')) | ('=', Some('>')) | ('=', Some('<'))
            | ('<', Some('>')) => {
                let op: String = [c, peek.unwrap()].iter().collect();
                return Err(err(l0, c0, ParseErrorKind::UnknownComparison(op)));
            }
            ('>', _) => (Tok::Cmp(Cmp::Gt), 1),
            ('<', _) => (Tok::Cmp(Cmp::Lt), 1),
            ('=', _) => (Tok::Cmp(Cmp::Eq), 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            ('!', _) => (Tok::Bang, 1),
            ('&', _) => (Tok::Amp, 1),
            ('|', _) => (Tok::Pipe, 1),
            ('#', _) => (Tok::Hash, 1),
            (d, _) if d.is_ascii_digit() => {
                let start = i;
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[start..j].iter().collect();
                let n: BigUint = digits.parse().expect("ascii digits");
                (Tok::Nat(n), j - start)
            }
            (a, _) if a.is_alphabetic() || a == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                (keyword(&word).unwrap_or(Tok::Ident(word)), j - start)
            }
            (other, _) => {
                return Err(err(
                    l0,
                    c0,
                    ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                ))
            }
        };
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
        i += width;
        column += width;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            kind,
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error_here(ParseErrorKind::Syntax(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        )))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", tok.text())))
        }
    }

    fn formula(&mut self) -> PResult<F> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(build::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<F> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = build::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<F> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.until()?;
            lhs = build::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> PResult<F> {
        let lhs = self.unary()?;
        if *self.peek() != Tok::Until {
            return Ok(lhs);
        }
        self.bump();
        let interval = self.optional_interval()?;
        let threshold = if *self.peek() == Tok::LBrace {
            self.bump();
            let t = self.texpr_or()?;
            self.expect(Tok::RBrace)?;
            Some(t)
        } else {
            None
        };
        let rhs = self.until()?;
        Ok(Arc::new(Formula::Until {
            left: lhs,
            interval,
            threshold,
            right: rhs,
        }))
    }

    fn unary(&mut self) -> PResult<F> {
        let tok = self.peek().clone();
        let ctor: fn(Interval, F) -> F = match tok {
            Tok::Bang => {
                self.bump();
                return Ok(build::not(self.unary()?));
            }
            Tok::Eventually => build::eventually,
            Tok::Always => build::always,
            Tok::Next => build::next,
            Tok::WeakEventually => build::weak_eventually,
            Tok::WeakAlways => build::weak_always,
            _ => return self.primary(),
        };
        self.bump();
        let interval = self.optional_interval()?;
        let body = self.unary()?;
        Ok(ctor(interval, body))
    }

    fn primary(&mut self) -> PResult<F> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(build::tt())
            }
            Tok::False => {
                self.bump();
                Ok(build::ff())
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(build::prop(&name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Count => {
                self.bump();
                let interval = self.interval()?;
                let cmp = self.cmp()?;
                let bound = self.nat()?;
                self.expect(Tok::LParen)?;
                let body = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(build::count(cmp, bound, interval, body))
            }
            Tok::WeakUntil => {
                self.bump();
                let interval = self.optional_interval()?;
                self.expect(Tok::LParen)?;
                let left = self.formula()?;
                self.expect(Tok::Comma)?;
                let right = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(build::weak_until(left, interval, right))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn cmp(&mut self) -> PResult<Cmp> {
        match self.peek().clone() {
            Tok::Cmp(c) => {
                self.bump();
                Ok(c)
            }
            _ => Err(self.unexpected("a comparison operator")),
        }
    }

    fn nat(&mut self) -> PResult<BigUint> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("a natural number")),
        }
    }

    // An interval starts with a bracket followed by a number; a parenthesised
    // formula can never start with a number.
    fn optional_interval(&mut self) -> PResult<Interval> {
        let opens = matches!(self.peek(), Tok::LParen | Tok::LBrack);
        if (opens && matches!(self.peek_at(1), Tok::Nat(_))) || *self.peek() == Tok::LBrack {
            self.interval()
        } else {
            Ok(Interval::full())
        }
    }

    fn interval(&mut self) -> PResult<Interval> {
        let start = self.pos;
        let lo_closed = match self.bump() {
            Tok::LParen => false,
            Tok::LBrack => true,
            _ => {
                self.pos = start;
                return Err(self.unexpected("`(` or `[` opening an interval"));
            }
        };
        let lo = self.nat()?;
        self.expect(Tok::Comma)?;
        let hi = match self.peek().clone() {
            Tok::Inf => {
                self.bump();
                None
            }
            Tok::Nat(n) => {
                self.bump();
                Some(n)
            }
            _ => return Err(self.unexpected("a natural number or `inf`")),
        };
        let hi_closed = match self.peek() {
            Tok::RParen => false,
            Tok::RBrack => true,
            _ => return Err(self.unexpected("`)` or `]` closing an interval")),
        };
        self.bump();
        Interval::new(lo, hi, lo_closed, hi_closed).map_err(|e| {
            let s = &self.toks[start];
            ParseError {
                line: s.line,
                column: s.column,
                kind: ParseErrorKind::MalformedInterval(e),
            }
        })
    }

    fn texpr_or(&mut self) -> PResult<ThresholdExpr> {
        let mut lhs = self.texpr_and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.texpr_and()?;
            lhs = ThresholdExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn texpr_and(&mut self) -> PResult<ThresholdExpr> {
        let mut lhs = self.texpr_unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.texpr_unary()?;
            lhs = ThresholdExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn texpr_unary(&mut self) -> PResult<ThresholdExpr> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(ThresholdExpr::Not(Box::new(self.texpr_unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.texpr_or()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Hash => {
                self.bump();
                self.expect(Tok::LParen)?;
                let counted = self.formula()?;
                self.expect(Tok::RParen)?;
                let cmp = self.cmp()?;
                let bound = self.nat()?;
                Ok(ThresholdExpr::atom(counted, cmp, bound))
            }
            _ => Err(self.unexpected("a threshold `#(...)`")),
        }
    }
}

/// Parse a formula in the toolkit's text syntax.
pub fn parse_formula(text: &str) -> Result<F, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::build::*;

    fn p(s: &str) -> F {
        parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn literal_true() {
        assert_eq!(*p("true"), Formula::True);
    }

    #[test]
    fn heartbeat_property() {
        let f = p("G(st -> (C[120,180]>=90 (pulse) & C[120,180]<120 (pulse)))");
        let win = Interval::bounded(120, 180, true, true);
        let expected = always(
            Interval::full(),
            implies(
                prop("st"),
                and(
                    count(Cmp::Ge, 90u32, win.clone(), prop("pulse")),
                    count(Cmp::Lt, 120u32, win, prop("pulse")),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn threshold_until() {
        let f = p("a U(1,2){#(d)>=3} c");
        let expected = until_thr(
            prop("a"),
            Interval::bounded(1, 2, false, false),
            ThresholdExpr::atom(prop("d"), Cmp::Ge, 3u32),
            prop("c"),
        );
        assert_eq!(f, expected);
        assert_eq!(p(&f.to_string()), f);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("!a & b | c -> d"), p("(((!a) & b) | c) -> d"));
        assert_eq!(p("a U b U c"), p("a U (b U c)"));
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("a & b U c"), p("a & (b U c)"));
        assert_eq!(p("F a U b"), p("(F a) U b"));
    }

    #[test]
    fn parenthesised_operand_is_not_an_interval() {
        assert_eq!(p("F (a & b)"), eventually(Interval::full(), and(prop("a"), prop("b"))));
        assert_eq!(p("a U (b)"), until(prop("a"), Interval::full(), prop("b")));
    }

    #[test]
    fn weak_until_takes_two_arguments() {
        assert_eq!(
            p("Uw[0,2](a, b)"),
            weak_until(prop("a"), Interval::bounded(0, 2, true, true), prop("b"))
        );
    }

    #[test]
    fn compound_threshold() {
        let f = p("a U[0,1]{#(d)>=3 && !#(e)<2 || #(true)>=0} c");
        let Formula::Until { threshold: Some(t), .. } = &*f else { panic!() };
        assert!(matches!(t, ThresholdExpr::Or(..)));
        assert_eq!(p(&f.to_string()), f);
    }

    #[test]
    fn malformed_interval_reports_position() {
        let e = parse_formula("F[3,2] a").unwrap_err();
        assert_eq!(e.code(), "formula.interval");
        assert_eq!((e.line, e.column), (1, 2));
        let e = parse_formula("F(1,1) a").unwrap_err();
        assert_eq!(e.code(), "formula.interval");
    }

    #[test]
    fn unknown_comparison() {
        let e = parse_formula("C[0,1]==2 (a)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownComparison("==".into()));
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let e = parse_formula("a &\n  & b").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert_eq!(e.code(), "formula.syntax");
        assert!(parse_formula("a b").is_err());
        assert!(parse_formula("").is_err());
        assert!(parse_formula("U").is_err());
    }
}
