//! Reader for the polynomial expression language.
//!
//! ```text
//! integer  ::= [0-9]+
//! rational ::= integer ('/' integer)?
//! var      ::= 'x' integer
//! atom     ::= rational | var | '(' expr ')'
//! factor   ::= atom ('^' integer)?
//! term     ::= factor ('*' factor | '/' integer)*
//! expr     ::= ('+'|'-')? term (('+'|'-') term)*
//! ```
//!
//! Whitespace between tokens is ignored. The optional leading sign and the
//! trailing `/ integer` divisor make the canonical [`Display`](core::fmt::Display)
//! output of [`Polynomial`] readable again.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Error;
use crate::poly::{Chart, Polynomial};
use crate::rational::Rational;

pub fn parse_polynomial(text: &str, chart: Chart) -> Result<Polynomial, Error> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim: chart.dim(),
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
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

    fn expr(&mut self) -> Result<Polynomial, Error> {
        let negate = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat(b'+') {
                acc += self.term()?;
            } else if self.eat(b'-') {
                acc -= self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, Error> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                let f = self.factor()?;
                acc = &acc * &f;
            } else if self.eat(b'/') {
                self.skip_ws();
                let at = self.pos;
                let d = self.integer()?;
                if d.is_zero() {
                    self.pos = at;
                    return Err(self.error("division by zero"));
                }
                acc = acc.scale(&Rational::new(BigInt::from(1), d));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, Error> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| {
                self.pos = at;
                self.error("exponent too large")
            })?;
            if e > u16::MAX as u32 {
                self.pos = at;
                return Err(self.error("exponent too large"));
            }
            let mut out = Polynomial::one(self.dim);
            for _ in 0..e {
                out = &out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, Error> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut value = Rational::from_integer(n);
                // `a/b` binds as a single rational literal only when a digit follows.
                let save = self.pos;
                if self.eat(b'/') {
                    self.skip_ws();
                    if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                        let at = self.pos;
                        let d = self.integer()?;
                        if d.is_zero() {
                            self.pos = at;
                            return Err(self.error("division by zero"));
                        }
                        value /= Rational::from_integer(d);
                    } else {
                        self.pos = save;
                    }
                }
                Ok(Polynomial::constant(self.dim, value))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.variable(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn variable(&mut self) -> Result<Polynomial, Error> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("?");
        let index = name
            .strip_prefix('x')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&i| i >= 1 && i <= self.dim);
        match index {
            Some(i) => Ok(Polynomial::var(self.dim, i - 1)),
            None => Err(Error::UnknownVariable {
                name: String::from(name),
                offset: start,
            }),
        }
    }

    fn integer(&mut self) -> Result<BigInt, Error> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits
            .parse::<BigInt>()
            .map_err(|e| self.error(&format!("bad integer: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn chart(n: usize) -> Chart {
        Chart::new(n).unwrap()
    }

    #[test]
    fn zero_literal() {
        assert!(parse_polynomial("0", chart(3)).unwrap().is_zero());
    }

    #[test]
    fn half_coefficients() {
        let p = parse_polynomial("x1^2*x3/2 + x1*x2^2/2", chart(3)).unwrap();
        assert_eq!(p.len(), 2);
        for (_, c) in p.terms() {
            assert_eq!(*c, rat(1, 2));
        }
        let again = parse_polynomial(&alloc::format!("{p}"), chart(3)).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn out_of_range_variable() {
        match parse_polynomial("x1 + x9", chart(3)) {
            Err(Error::UnknownVariable { name, offset }) => {
                assert_eq!(name, "x9");
                assert_eq!(offset, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_polynomial("y + 1", chart(3)),
            Err(Error::UnknownVariable { .. })
        ));
        assert!(matches!(
            parse_polynomial("x0", chart(3)),
            Err(Error::UnknownVariable { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_polynomial("x1 + * x2", chart(2)) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_polynomial("(x1 + x2", chart(2)),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(parse_polynomial("1/0", chart(2)), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("", chart(2)), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("x1 x2", chart(2)), Err(Error::Syntax { .. })));
    }

    #[test]
    fn precedence_and_whitespace() {
        let p = parse_polynomial(" 3/4 * ( x1 - 2 )^2 ", chart(1)).unwrap();
        let x = Polynomial::var(1, 0);
        let expected = &(&(&x * &x) - &x.scale(&int(4))) + &Polynomial::constant(1, int(4));
        assert_eq!(p, expected.scale(&rat(3, 4)));
        let q = parse_polynomial("-x1 + 2/3", chart(1)).unwrap();
        assert_eq!(q, &Polynomial::constant(1, rat(2, 3)) - &x);
    }
}
