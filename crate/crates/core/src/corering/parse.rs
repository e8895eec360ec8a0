//! Text syntax for polynomials: `3*x^2*y + u - 1`, with parentheses and
//! unary minus. Identifiers must be variables of the target ring.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;

use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    ring: &'a Arc<PolyRing>,
}

fn err(offset: usize, message: String) -> Error {
    Error::Parse { offset, message }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(start, "expected a number".into()));
        }
        self.src[start..self.pos].parse::<u64>().map_err(|_| err(start, "number too large".into()))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = if self.eat('-') {
            -&self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let at = self.pos;
            let rhs = self.factor()?;
            acc = acc.checked_mul(&rhs).map_err(|e| err(at, format!("{e}")))?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.primary()?;
        if self.eat('^') {
            let at = self.pos;
            let k = self.number()?;
            return base.checked_pow(k).map_err(|e| err(at, format!("{e}")));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(err(self.pos, "expected `)`".into()));
                }
                Ok(inner)
            }
            Some('-') => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let p = self.ring.field().characteristic() as u64;
                let n = self.number()?;
                Ok(Poly::constant(self.ring, (n % p) as i64))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        self.pos += c.len_utf8();
                    } else {
                        break;
                    }
                }
                let name = &self.src[start..self.pos];
                Poly::var_named(self.ring, name).map_err(|_| err(start, format!("unknown variable `{name}`")))
            }
            Some(c) => Err(err(self.pos, format!("unexpected `{c}`, expected a number, variable or `(`"))),
            None => Err(err(self.pos, "unexpected end of input, expected a number, variable or `(`".into())),
        }
    }
}

pub fn parse_poly(ring: &Arc<PolyRing>, src: &str) -> Result<Poly> {
    let mut p = Parser { src, pos: 0, ring };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(err(p.pos, format!("unexpected trailing input `{}`", &src[p.pos..])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corering::{MonomialOrder, PrimeField};
    use alloc::string::ToString;
    use alloc::vec;

    fn ring() -> Arc<PolyRing> {
        PolyRing::new(
            PrimeField::new(5).unwrap(),
            vec!["x".to_string(), "y".to_string(), "u".to_string()],
            MonomialOrder::grevlex(),
        )
        .unwrap()
    }

    #[test]
    fn parses_reference_syntax() {
        let r = ring();
        let f = parse_poly(&r, "3*x^2*y + u - 1").unwrap();
        assert_eq!(f.terms().len(), 3);
        let g = parse_poly(&r, "t".replace('t', "(x - y)*(x + y)").as_str()).unwrap();
        assert_eq!(g, parse_poly(&r, "x^2 - y^2").unwrap());
        assert_eq!(parse_poly(&r, "-(x)^2 + 7").unwrap(), parse_poly(&r, "2 - x^2").unwrap());
    }

    #[test]
    fn reports_offsets() {
        let r = ring();
        match parse_poly(&r, "x + z") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_poly(&r, "x +"), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(parse_poly(&r, "(x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly(&r, "x y"), Err(Error::Parse { offset: 2, .. })));
    }
}
