//! Text syntax for scalars and linear forms.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | name | h<i><j> | D<k>(a|b|c) | trig '(' [integer ['*']] angle ')' | '(' expr ')'
//! ```
//!
//! `trig` is one of `cos sin tan cot sec csc`; the angle multiple may be 1 or
//! 2. Products and quotients must keep the result affine in the unknowns.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::linform::{CoefFn, LinForm, Unknown};
use crate::scalar::{Field, Rational, Scalar, ScalarError};

const MAX_DEPTH: usize = 64;
const MAX_EXPONENT: u32 = 32;
const MAX_INPUT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character {0:?} at offset {1}")]
    BadChar(char, usize),
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected token at offset {0}")]
    Unexpected(usize),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("expression is not affine in the unknowns")]
    NonLinear,
    #[error("expected a constant")]
    NotConstant,
    #[error("nesting too deep")]
    TooDeep,
    #[error("input too long")]
    TooLong,
    #[error("exponent too large")]
    Exponent,
    #[error("scalar error: {0}")]
    Scalar(String),
}

impl From<ScalarError> for ParseError {
    fn from(e: ScalarError) -> Self {
        ParseError::Scalar(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    if src.len() > MAX_INPUT {
        return Err(ParseError::TooLong);
    }
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|c| c.1).collect();
            out.push((Tok::Int(text.parse().expect("digits")), pos));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().map(|c| c.1).collect()), pos));
        } else if "+-*/^()".contains(ch) {
            out.push((Tok::Op(ch), pos));
            i += 1;
        } else {
            return Err(ParseError::BadChar(ch, pos));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    field: &'a Arc<Field>,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(usize::MAX)
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone()).ok_or(ParseError::Eof)?;
        self.pos += 1;
        Ok(t)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else if self.peek().is_none() {
            Err(ParseError::Eof)
        } else {
            Err(ParseError::Unexpected(self.offset()))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseError::TooDeep)
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<LinForm, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<LinForm, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = acc.mul(&rhs).ok_or(ParseError::NonLinear)?;
            } else if self.eat('/') {
                let rhs = self.unary()?;
                if !rhs.is_constant() {
                    return Err(ParseError::NonLinear);
                }
                acc = acc.div(rhs.constant_term())?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<LinForm, ParseError> {
        if self.eat('-') {
            self.enter()?;
            let v = self.unary()?.neg();
            self.depth -= 1;
            return Ok(v);
        }
        self.power()
    }

    fn power(&mut self) -> Result<LinForm, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = match self.next()? {
            Tok::Int(n) => u32::try_from(n).map_err(|_| ParseError::Exponent)?,
            _ => return Err(ParseError::Unexpected(self.toks[self.pos - 1].1)),
        };
        if e > MAX_EXPONENT {
            return Err(ParseError::Exponent);
        }
        if e == 1 {
            return Ok(base);
        }
        if !base.is_constant() {
            return Err(ParseError::NonLinear);
        }
        Ok(LinForm::constant(base.constant_term().pow(e)))
    }

    fn constant(&self, s: Scalar) -> LinForm {
        LinForm::constant(s)
    }

    fn atom(&mut self) -> Result<LinForm, ParseError> {
        let at = self.offset();
        match self.next()? {
            Tok::Int(n) => Ok(self.constant(Scalar::rational(self.field, Rational::from_integer(n)))),
            Tok::Op('(') => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Op(_) => Err(ParseError::Unexpected(at)),
            Tok::Ident(name) => self.ident(name),
        }
    }

    fn ident(&mut self, name: String) -> Result<LinForm, ParseError> {
        if let Some(u) = h_unknown(&name) {
            return Ok(LinForm::unknown(self.field, u));
        }
        if let Some(dir) = deriv_dir(&name) {
            if self.peek() == Some(&Tok::Op('(')) {
                self.pos += 1;
                let f = match self.next()? {
                    Tok::Ident(f) => CoefFn::from_name(&f).ok_or(ParseError::UnknownSymbol(f))?,
                    _ => return Err(ParseError::Unexpected(self.toks[self.pos - 1].1)),
                };
                self.expect(')')?;
                return Ok(LinForm::unknown(self.field, Unknown::deriv(dir, f)));
            }
        }
        if matches!(name.as_str(), "cos" | "sin" | "tan" | "cot" | "sec" | "csc") {
            return self.trig(&name);
        }
        let s = self
            .field
            .lookup(&name)
            .ok_or_else(|| ParseError::UnknownSymbol(name.clone()))?;
        Ok(self.constant(Scalar::sym(self.field, s)))
    }

    fn trig(&mut self, func: &str) -> Result<LinForm, ParseError> {
        self.expect('(')?;
        let mut mult = 1u32;
        if let Some(Tok::Int(n)) = self.peek().cloned() {
            self.pos += 1;
            mult = u32::try_from(n).map_err(|_| ParseError::Unexpected(self.offset()))?;
            self.eat('*');
        }
        let angle = match self.next()? {
            Tok::Ident(a) => a,
            _ => return Err(ParseError::Unexpected(self.toks[self.pos - 1].1)),
        };
        self.expect(')')?;
        let lookup = |n: String| {
            self.field
                .lookup(&n)
                .map(|s| Scalar::sym(self.field, s))
                .ok_or(ParseError::UnknownSymbol(n))
        };
        let c1 = lookup(format!("cos({angle})"))?;
        let s1 = lookup(format!("sin({angle})"))?;
        let (c, s) = match mult {
            1 => (c1, s1),
            2 => (
                &(&c1 * &c1) - &(&s1 * &s1),
                (&c1 * &s1).scale(&Rational::from_integer(2.into())),
            ),
            _ => return Err(ParseError::Unexpected(self.offset())),
        };
        let one = Scalar::one(self.field);
        let v = match func {
            "cos" => c,
            "sin" => s,
            "tan" => s.checked_div(&c)?,
            "cot" => c.checked_div(&s)?,
            "sec" => one.checked_div(&c)?,
            "csc" => one.checked_div(&s)?,
            _ => unreachable!(),
        };
        Ok(self.constant(v))
    }
}

fn h_unknown(name: &str) -> Option<Unknown> {
    let b = name.as_bytes();
    if b.len() == 3 && b[0] == b'h' {
        let i = (b[1] as char).to_digit(10)? as usize;
        let j = (b[2] as char).to_digit(10)? as usize;
        if (1..=5).contains(&i) && (1..=5).contains(&j) {
            return Some(Unknown::h(i, j));
        }
    }
    None
}

fn deriv_dir(name: &str) -> Option<usize> {
    let b = name.as_bytes();
    if b.len() == 2 && b[0] == b'D' {
        let k = (b[1] as char).to_digit(10)? as usize;
        if (1..=5).contains(&k) {
            return Some(k);
        }
    }
    None
}

/// Parses an affine-linear expression over `field`.
pub fn parse_linform(field: &Arc<Field>, src: &str) -> Result<LinForm, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        field,
        toks,
        pos: 0,
        depth: 0,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::Unexpected(p.offset()));
    }
    Ok(v)
}

/// Parses an expression that must not mention any unknown.
pub fn parse_scalar(field: &Arc<Field>, src: &str) -> Result<Scalar, ParseError> {
    let v = parse_linform(field, src)?;
    if !v.is_constant() {
        return Err(ParseError::NotConstant);
    }
    Ok(v.constant_term().clone())
}

/// Parses `lhs = rhs` (or a bare expression, read as `expr = 0`) into the
/// single form `lhs - rhs`. Chains `a = b = 0` yield one form per link.
pub fn parse_relations(field: &Arc<Field>, src: &str) -> Result<Vec<LinForm>, ParseError> {
    let parts: Vec<&str> = src.split('=').collect();
    if parts.len() == 1 {
        return Ok(vec![parse_linform(field, parts[0])?]);
    }
    let forms = parts
        .iter()
        .map(|p| parse_linform(field, p))
        .collect::<Result<Vec<_>, _>>()?;
    let last = forms.last().expect("nonempty").clone();
    if last.is_zero() {
        Ok(forms[..forms.len() - 1].to_vec())
    } else {
        Ok(forms.windows(2).map(|w| w[0].sub(&w[1])).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldBuilder;
    use proptest::prelude::*;

    fn field() -> Arc<Field> {
        let mut b = FieldBuilder::new();
        b.rho_atom("t1", "t2", "rho");
        b.angle("t", true, true);
        b.unit_triple("a", "b", "c");
        b.build()
    }

    #[test]
    fn table_one_entry() {
        let f = field();
        let v = parse_linform(&f, "h22 - h11*(1 - t1^2 - t2^2)").unwrap();
        let rho = Scalar::sym(&f, f.lookup("rho").unwrap());
        let expected = LinForm::unknown(&f, Unknown::h(2, 2)).sub(&LinForm::term(Unknown::h(1, 1), rho));
        assert_eq!(v, expected);
    }

    #[test]
    fn symmetric_h() {
        let f = field();
        assert_eq!(parse_linform(&f, "h21").unwrap(), parse_linform(&f, "h12").unwrap());
    }

    #[test]
    fn double_angle() {
        let f = field();
        let v = parse_scalar(&f, "csc(2*t) * 2*sin(t)*cos(t)").unwrap();
        assert!(v.is_one());
        let w = parse_scalar(&f, "cos(2t) - 2*cos(t)^2 + 1").unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn derivative_unknowns() {
        let f = field();
        let v = parse_linform(&f, "D5(b) - c*(h55 - h11)").unwrap();
        assert_eq!(v.unknowns().len(), 3);
    }

    #[test]
    fn chained_relations() {
        let f = field();
        assert_eq!(parse_relations(&f, "h23=h45=0").unwrap().len(), 2);
        assert_eq!(parse_relations(&f, "h11 = h22").unwrap().len(), 1);
    }

    #[test]
    fn rejects_nonlinear_and_garbage() {
        let f = field();
        assert_eq!(parse_linform(&f, "h11*h22"), Err(ParseError::NonLinear));
        assert_eq!(parse_linform(&f, "1/h11"), Err(ParseError::NonLinear));
        assert!(matches!(parse_linform(&f, "zz"), Err(ParseError::UnknownSymbol(_))));
        assert!(matches!(parse_linform(&f, "1 +"), Err(ParseError::Eof)));
        assert!(matches!(parse_linform(&f, "1 $"), Err(ParseError::BadChar('$', 2))));
        assert!(parse_linform(&f, "1/t1").is_err());
        assert_eq!(parse_linform(&f, &"(".repeat(200)), Err(ParseError::TooDeep));
        assert_eq!(parse_linform(&f, "t1^99"), Err(ParseError::Exponent));
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            (1i64..20).prop_map(|n| n.to_string()),
            Just("t1".to_string()),
            Just("t2".to_string()),
            Just("rho".to_string()),
            Just("cos(t)".to_string()),
            Just("sin(t)".to_string()),
            Just("sec(t)".to_string()),
            Just("a".to_string()),
            Just("c".to_string()),
        ];
        let scalar = leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
                inner.prop_map(|a| format!("({a})^2")),
            ]
        });
        let unknown = prop_oneof![
            Just("h11"),
            Just("h23"),
            Just("h55"),
            Just("D5(b)"),
            Just("D1(a)")
        ];
        prop::collection::vec((scalar, unknown), 0..4).prop_map(|terms| {
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms
                    .into_iter()
                    .map(|(s, u)| format!("({s})*{u}"))
                    .collect::<Vec<_>>()
                    .join(" + ")
            }
        })
    }

    proptest! {
        #[test]
        fn canonical_text_round_trips(src in arb_expr()) {
            let f = field();
            let v = parse_linform(&f, &src).unwrap();
            let text = v.to_string();
            let again = parse_linform(&f, &text).unwrap();
            prop_assert_eq!(&again, &v);
            prop_assert_eq!(again.to_string(), text);
        }
    }
}
