//! Recursive-descent parser for the expression grammar.
//!
//! Infix `+ - * /` with the usual precedence, integer exponent `^`, function
//! calls `sin(...)`, jet coordinates `u_xx` / `u1_ty` (fiber name before the
//! underscore), base coordinates and declared constants by name. Whitespace
//! is insignificant. Decimal literals are read exactly.

use num::{BigInt, BigRational};

use crate::error::ExprError;
use crate::expr::atom::Func;
use crate::expr::JetExpr;
use crate::sig::Signature;

/// Parse `text` under the signature and return the normalized expression.
pub fn parse(text: &str, sig: &Signature) -> Result<JetExpr, ExprError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        sig,
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(ExprError::Syntax {
            pos: t.pos,
            msg: format!("unexpected `{}`", t.kind.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num(q) => q.to_string(),
            TokKind::Ident(s) => s.clone(),
            TokKind::Plus => "+".into(),
            TokKind::Minus => "-".into(),
            TokKind::Star => "*".into(),
            TokKind::Slash => "/".into(),
            TokKind::Caret => "^".into(),
            TokKind::LParen => "(".into(),
            TokKind::RParen => ")".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Tok>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push(Tok { kind: TokKind::Plus, pos });
                i += 1;
            }
            '-' => {
                out.push(Tok { kind: TokKind::Minus, pos });
                i += 1;
            }
            '*' => {
                out.push(Tok { kind: TokKind::Star, pos });
                i += 1;
            }
            '/' => {
                out.push(Tok { kind: TokKind::Slash, pos });
                i += 1;
            }
            '^' => {
                out.push(Tok { kind: TokKind::Caret, pos });
                i += 1;
            }
            '(' => {
                out.push(Tok { kind: TokKind::LParen, pos });
                i += 1;
            }
            ')' => {
                out.push(Tok { kind: TokKind::RParen, pos });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut value = BigRational::from_integer(
                    text[start..i].parse::<BigInt>().expect("digits"),
                );
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if fstart == i {
                        return Err(ExprError::Syntax {
                            pos: i,
                            msg: "expected digits after decimal point".into(),
                        });
                    }
                    let frac: BigInt = text[fstart..i].parse().expect("digits");
                    let scale = BigInt::from(10u32).pow((i - fstart) as u32);
                    value += BigRational::new(frac, scale);
                }
                out.push(Tok {
                    kind: TokKind::Num(value),
                    pos,
                });
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Tok {
                    kind: TokKind::Ident(text[start..i].to_string()),
                    pos,
                });
            }
            other => {
                return Err(ExprError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: TokKind) -> Result<(), ExprError> {
        match self.next() {
            Some(t) if t.kind == kind => Ok(()),
            Some(t) => Err(ExprError::Syntax {
                pos: t.pos,
                msg: format!("expected `{}`, found `{}`", kind.describe(), t.kind.describe()),
            }),
            None => Err(ExprError::Syntax {
                pos: self.end_pos(),
                msg: format!("expected `{}` at end of input", kind.describe()),
            }),
        }
    }

    fn end_pos(&self) -> usize {
        self.tokens.last().map(|t| t.pos + 1).unwrap_or(0)
    }

    fn expr(&mut self) -> Result<JetExpr, ExprError> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokKind::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                TokKind::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<JetExpr, ExprError> {
        let mut acc = self.unary()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokKind::Star => {
                    self.next();
                    acc = acc.mul(&self.unary()?);
                }
                TokKind::Slash => {
                    let pos = t.pos;
                    self.next();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs).map_err(|e| match e {
                        ExprError::DivisionByZero => ExprError::Syntax {
                            pos,
                            msg: "division by zero".into(),
                        },
                        other => other,
                    })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<JetExpr, ExprError> {
        if let Some(t) = self.peek() {
            if t.kind == TokKind::Minus {
                self.next();
                return Ok(self.unary()?.neg());
            }
        }
        self.power()
    }

    fn power(&mut self) -> Result<JetExpr, ExprError> {
        let base = self.primary()?;
        if let Some(t) = self.peek() {
            if t.kind == TokKind::Caret {
                self.next();
                let (exp, pos) = match self.next() {
                    Some(Tok {
                        kind: TokKind::Num(q),
                        pos,
                    }) => (q, pos),
                    Some(t) => {
                        return Err(ExprError::Syntax {
                            pos: t.pos,
                            msg: "expected an integer exponent".into(),
                        })
                    }
                    None => {
                        return Err(ExprError::Syntax {
                            pos: self.end_pos(),
                            msg: "expected an integer exponent at end of input".into(),
                        })
                    }
                };
                use num::ToPrimitive;
                let k = exp
                    .to_integer()
                    .to_i64()
                    .filter(|_| exp.is_integer())
                    .ok_or(ExprError::Syntax {
                        pos,
                        msg: "expected an integer exponent".into(),
                    })?;
                return base.pow(k).map_err(|_| ExprError::Syntax {
                    pos,
                    msg: "negative power of zero".into(),
                });
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<JetExpr, ExprError> {
        match self.next() {
            Some(Tok {
                kind: TokKind::Num(q),
                ..
            }) => Ok(JetExpr::rational(q)),
            Some(Tok {
                kind: TokKind::LParen,
                ..
            }) => {
                let e = self.expr()?;
                self.expect(TokKind::RParen)?;
                Ok(e)
            }
            Some(Tok {
                kind: TokKind::Ident(name),
                pos,
            }) => self.ident(&name, pos),
            Some(t) => Err(ExprError::Syntax {
                pos: t.pos,
                msg: format!("unexpected `{}`", t.kind.describe()),
            }),
            None => Err(ExprError::Syntax {
                pos: self.end_pos(),
                msg: "unexpected end of input".into(),
            }),
        }
    }

    fn ident(&mut self, name: &str, pos: usize) -> Result<JetExpr, ExprError> {
        if let Some(func) = Func::from_name(name) {
            self.expect(TokKind::LParen)?;
            let arg = self.expr()?;
            self.expect(TokKind::RParen)?;
            return Ok(JetExpr::apply(func, arg));
        }
        if let Some(mu) = self.sig.base_index(name) {
            return Ok(JetExpr::base(mu));
        }
        if let Some(a) = self.sig.fiber_index(name) {
            return Ok(JetExpr::fiber(a));
        }
        if let Some(k) = self.sig.const_index(name) {
            return Ok(JetExpr::named_const(k));
        }
        if let Some((head, suffix)) = name.split_once('_') {
            if let Some(a) = self.sig.fiber_index(head) {
                if let Some(index) = self.sig.parse_index_suffix(suffix) {
                    if index.order() > self.sig.order_cap() {
                        return Err(ExprError::OrderCap {
                            order: index.order(),
                            cap: self.sig.order_cap(),
                        });
                    }
                    return Ok(JetExpr::jet(a, index));
                }
            }
        }
        let _ = pos;
        Err(ExprError::UnknownIdent(name.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::MultiIndex;

    fn sig_t() -> Signature {
        Signature::new(vec!["t".into()], vec!["u".into()], 4).unwrap()
    }

    #[test]
    fn zero_literal() {
        let sig = sig_t();
        assert!(parse("0", &sig).unwrap().is_zero());
    }

    #[test]
    fn kinetic_density() {
        let sig = sig_t();
        let e = parse("1/2 * u_t^2", &sig).unwrap();
        let ut = JetExpr::jet(0, MultiIndex::new(vec![0]));
        assert_eq!(e, ut.mul(&ut).scale(&num::BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn print_parse_roundtrip() {
        let sig = Signature::new(vec!["x".into()], vec!["u".into()], 4).unwrap();
        let e = parse("u_xx * sin(x) - 3*x^2/(u + 1)", &sig).unwrap();
        let text = e.text(&sig);
        let back = parse(&text, &sig).unwrap();
        assert_eq!(e, back);
        assert_eq!(text, back.text(&sig));
    }

    #[test]
    fn multi_fiber_jets() {
        let sig = Signature::new(
            vec!["t".into(), "y".into()],
            vec!["u1".into(), "u2".into()],
            4,
        )
        .unwrap();
        let e = parse("u1_ty", &sig).unwrap();
        assert_eq!(e, JetExpr::jet(0, MultiIndex::new(vec![0, 1])));
        assert_eq!(e.text(&sig), "u1_ty");
    }

    #[test]
    fn errors_carry_position() {
        let sig = sig_t();
        match parse("u_t +* 2", &sig) {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert_eq!(
            parse("w + 1", &sig),
            Err(ExprError::UnknownIdent("w".into()))
        );
        assert!(matches!(
            parse("u_ttttt", &sig),
            Err(ExprError::OrderCap { .. })
        ));
    }

    #[test]
    fn unary_minus_and_decimals() {
        let sig = sig_t();
        assert_eq!(parse("-u + 0.5", &sig).unwrap(), parse("1/2 - u", &sig).unwrap());
        assert_eq!(parse("3*-2", &sig).unwrap(), JetExpr::integer(-6));
    }
}
