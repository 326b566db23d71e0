//! Recursive-descent parser for the canonical polynomial text form.
//!
//! Grammar:
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*
//! power  := atom ['^' integer]
//! atom   := integer | 'i' | identifier | '(' expr ')' | '-' atom
//! ```
//! Division is only allowed by nonzero constants.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Space};
use crate::scalar::Scalar;

pub(crate) fn parse_polynomial(space: &Space, src: &str) -> Result<Polynomial> {
    let mut p = Parser { space, src: src.as_bytes(), pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    space: &'a Space,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let neg = self.eat(b'-');
        let mut acc = self.term()?;
        if neg {
            acc = -&acc;
        }
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                acc = &acc + &t;
            } else if self.eat(b'-') {
                let t = self.term()?;
                acc = &acc - &t;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                let f = self.power()?;
                acc = &acc * &f;
            } else if self.eat(b'/') {
                let f = self.power()?;
                if !f.is_constant() {
                    return Err(self.err("division by a non-constant"));
                }
                let inv = f.constant_term().inv()?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let digits = self.digits();
            let e: u32 = digits.parse().map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.atom()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits();
                let n: BigInt = d.parse().map_err(|_| self.err("bad integer"))?;
                Ok(Polynomial::constant(self.space, Scalar::from(BigRational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if let Some(i) = self.space.index_of(name) {
                    Ok(Polynomial::var(self.space, i))
                } else if name == "i" {
                    Ok(Polynomial::constant(self.space, Scalar::i()))
                } else {
                    Err(Error::UnknownVariable(name.to_string()))
                }
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_canonical_text() {
        let s = Space::coordinates("x", 3);
        for src in ["0", "1", "-1/2", "x1^2*x3 - 1/3*x2 + i", "(1-2*i)*x1*x2 - i*x3", "x2^3 + 5/7*i"] {
            let p = Polynomial::parse(&s, src).unwrap();
            let again = Polynomial::parse(&s, &p.to_string()).unwrap();
            assert_eq!(p, again, "{src}");
        }
    }

    #[test]
    fn parse_errors() {
        let s = Space::coordinates("x", 2);
        assert!(matches!(Polynomial::parse(&s, "x3"), Err(Error::UnknownVariable(_))));
        assert!(Polynomial::parse(&s, "x1 / x2").is_err());
        assert!(Polynomial::parse(&s, "x1 +").is_err());
        assert!(Polynomial::parse(&s, "(x1").is_err());
        assert!(Polynomial::parse(&s, "1/0").is_err());
    }

    #[test]
    fn precedence() {
        let s = Space::coordinates("x", 2);
        let p = Polynomial::parse(&s, "2*x1^2 - (x1 - x2)*x2").unwrap();
        assert_eq!(p.to_string(), "2*x1^2 - x1*x2 + x2^2");
    }
}
