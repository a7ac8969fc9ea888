//! Recursive-descent parser for algebra elements.
//!
//! ```text
//! expr    := ['+'|'-'] product (('+'|'-') product)*
//! product := factor ('*' factor)*
//! factor  := '-' factor | number | 'sqrt' '(' int ')' | symbol | '(' expr ')'
//! number  := int ['/' int]
//! symbol  := ('L'|'I') '(' coords ')' | 'D' '(' coords ';' nat ')' | 'C_L' | 'C_I' | 'C_LI'
//! ```
//!
//! Coordinates are comma-separated integers on lattices and a single rational
//! on `Q`. A bare scalar `k` stands for `k·t⁰`: `k*I(0)` in `D1` and `HV`,
//! `k*D(0;0)` in `D`; only `0` is a scalar in `W`. Error columns are 1-based; the end of input is reported
//! one past the last character.

use hv_core::algebra::{Element, Symbol, Tag};
use hv_core::foundations::{GroupInstance, Scalar};
use hv_core::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone, Debug)]
enum Value {
    Scalar(Scalar),
    Element(Element),
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    group: &'a GroupInstance,
    tag: Tag,
}

/// Parses `text` as an element of the algebra `tag` over `group`.
pub fn parse_element(text: &str, group: &GroupInstance, tag: Tag) -> Result<Element> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        group,
        tag,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected {:?}", p.chars[p.pos])));
    }
    p.to_element(v)
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(f) => format!("{f:?}"),
                None => "end of input".into(),
            };
            Err(self.error(format!("expected {c:?}, found {found}")))
        }
    }

    fn to_element(&self, v: Value) -> Result<Element> {
        match v {
            Value::Element(e) => Ok(e),
            Value::Scalar(s) if s.is_zero() => Ok(Element::zero(self.tag)),
            Value::Scalar(s) => {
                let unit = match self.tag {
                    Tag::D => Symbol::D(self.group.zero(), 0),
                    Tag::D1 | Tag::HV => Symbol::I(self.group.zero()),
                    Tag::W => {
                        return Err(Error::Inadmissible {
                            symbol: format!("scalar {s}"),
                            tag: Tag::W,
                        })
                    }
                };
                Element::monomial(self.tag, unit, s)
            }
        }
    }

    fn combine(&self, a: Value, b: Value, negate: bool) -> Result<Value> {
        let b = if negate { neg(b) } else { b };
        Ok(match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x + &y),
            (a, b) => Value::Element(&self.to_element(a)? + &self.to_element(b)?),
        })
    }

    fn expr(&mut self) -> Result<Value> {
        let negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let first = self.product()?;
        let mut acc = if negate { neg(first) } else { first };
        loop {
            let negate = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Ok(acc);
            };
            let rhs = self.product()?;
            acc = self.combine(acc, rhs, negate)?;
        }
    }

    fn product(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.factor()?;
            acc = match (acc, rhs) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x * &y),
                (Value::Scalar(k), Value::Element(e)) | (Value::Element(e), Value::Scalar(k)) => {
                    Value::Element(e.scale(&k))
                }
                (Value::Element(_), Value::Element(_)) => {
                    self.pos = at;
                    return Err(self.error("product of two algebra elements; use a bracket or product command"));
                }
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Value> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(neg(self.factor()?))
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => self.number().map(Value::Scalar),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn number(&mut self) -> Result<Scalar> {
        let num = self.integer()?;
        let save = self.pos;
        if self.eat('/') {
            if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos = save;
                return Err(self.error("expected a denominator after '/'"));
            }
            let at = self.pos;
            let den = self.integer()?;
            if den == BigInt::from(0) {
                self.pos = at;
                return Err(self.error("zero denominator"));
            }
            return Ok(Scalar::from_rational(BigRational::new(num, den)));
        }
        Ok(Scalar::from_rational(BigRational::from_integer(num)))
    }

    fn word(&mut self) -> Result<Value> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        let word: String = self.chars[start..self.pos].iter().collect();
        let symbol = match word.as_str() {
            "sqrt" => {
                self.expect('(')?;
                let at = self.pos;
                let d = self.integer()?;
                self.expect(')')?;
                let d: u64 = d.try_into().map_err(|_| self.error("radicand out of range"))?;
                let root = Scalar::sqrt_of(d).map_err(|e| Error::Parse {
                    column: at + 1,
                    message: e.to_string(),
                })?;
                return Ok(Value::Scalar(self.group.field().admit(&root)?));
            }
            "C_L" => Symbol::CL,
            "C_I" => Symbol::CI,
            "C_LI" => Symbol::CLI,
            "L" | "I" => {
                self.expect('(')?;
                let x = self.coords(&[')'])?;
                self.expect(')')?;
                if word == "L" {
                    Symbol::L(x)
                } else {
                    Symbol::I(x)
                }
            }
            "D" => {
                self.expect('(')?;
                let x = self.coords(&[';'])?;
                self.expect(';')?;
                let at = self.pos;
                let m = self.integer()?;
                let m: u32 = m.try_into().map_err(|_| Error::Parse {
                    column: at + 1,
                    message: "order out of range".into(),
                })?;
                self.expect(')')?;
                Symbol::D(x, m)
            }
            _ => {
                self.pos = start;
                return Err(self.error(format!("unknown symbol {word:?}")));
            }
        };
        Ok(Value::Element(Element::basis(self.tag, symbol)?))
    }

    fn coords(&mut self, stop: &[char]) -> Result<hv_core::foundations::GroupElement> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| !stop.contains(c) && *c != ')') {
            self.pos += 1;
        }
        let raw: String = self.chars[start..self.pos].iter().collect();
        match self.group.parse_element(&raw) {
            Ok(x) => Ok(x),
            Err(e @ (Error::Arity { .. } | Error::GroupMismatch)) => Err(e),
            Err(e) => Err(Error::Parse {
                column: start + 1,
                message: format!("invalid group element {raw:?}: {e}"),
            }),
        }
    }
}

fn neg(v: Value) -> Value {
    match v {
        Value::Scalar(s) => Value::Scalar(-s),
        Value::Element(e) => Value::Element(-e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hv_core::foundations::GroupElement;

    #[test]
    fn examples() {
        let z = GroupInstance::integers();
        let e = parse_element("L(2) + 3*I(-1) - 1/2*C_L", &z, Tag::HV).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.coeff(&Symbol::CL), Scalar::from_ratio(-1, 2));
        assert_eq!(e.coeff(&Symbol::I(GroupElement::int(-1))), Scalar::from_int(3));

        let z2 = GroupInstance::lattice_sqrt(2).unwrap();
        let e = parse_element("L(1,0) + L(0,1)", &z2, Tag::HV).unwrap();
        assert_eq!(e.len(), 2);

        match parse_element("L(2) +", &z, Tag::HV) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors() {
        let z = GroupInstance::integers();
        assert!(matches!(parse_element("L(1,2)", &z, Tag::HV), Err(Error::Arity { .. })));
        assert!(matches!(parse_element("I(1)", &z, Tag::W), Err(Error::Inadmissible { .. })));
        assert!(matches!(parse_element("L(1)*L(2)", &z, Tag::HV), Err(Error::Parse { column: 5, .. })));
        assert!(matches!(parse_element("X(1)", &z, Tag::HV), Err(Error::Parse { column: 1, .. })));
        assert!(parse_element("sqrt(2)*L(1)", &z, Tag::HV).is_err());
        assert!(matches!(parse_element("2", &z, Tag::W), Err(Error::Inadmissible { .. })));
        assert!(parse_element("0", &z, Tag::W).unwrap().is_zero());
    }

    #[test]
    fn canonical_forms_round_trip() {
        let z2 = GroupInstance::lattice_sqrt(2).unwrap();
        for text in [
            "-4*L(0,1) + 1/2*C_L",
            "(-1+1*sqrt(2))*L(1,1) - I(0,0)",
            "(1/2*sqrt(2))*I(2,-1) + C_LI",
        ] {
            let e = parse_element(text, &z2, Tag::HV).unwrap();
            assert_eq!(e.to_string(), text);
        }
        let q = GroupInstance::rationals();
        let e = parse_element("2*L(-3/2) + D(1;0)", &q, Tag::D);
        assert!(e.is_err());
        let e = parse_element("2*D(-3/2;1) + D(1;0)", &q, Tag::D).unwrap();
        assert_eq!(parse_element(&e.to_string(), &q, Tag::D).unwrap(), e);
        assert_eq!(parse_element("3", &q, Tag::D).unwrap().to_string(), "3*D(0;0)");
    }
}
