use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::foundations::{GroupElement, GroupInstance, Scalar};

/// Basis symbols of the algebras.
///
/// `L(x)` is `tˣ∂`, `I(x)` is `tˣ`, `D(x, m)` is `tˣ∂ᵐ`. Under the embedding of
/// `D1` into `D`, `L(x) ≡ D(x, 1)` and `I(x) ≡ D(x, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    CL,
    CI,
    CLI,
    L(GroupElement),
    I(GroupElement),
    D(GroupElement, u32),
}

impl Symbol {
    /// Group degree; central symbols sit in degree zero and report `None`.
    pub fn degree(&self) -> Option<&GroupElement> {
        match self {
            Symbol::L(x) | Symbol::I(x) | Symbol::D(x, _) => Some(x),
            _ => None,
        }
    }

    /// Power of `∂`.
    pub fn order(&self) -> Option<u32> {
        match self {
            Symbol::I(_) => Some(0),
            Symbol::L(_) => Some(1),
            Symbol::D(_, m) => Some(*m),
            _ => None,
        }
    }

    pub fn is_central(&self) -> bool {
        matches!(self, Symbol::CL | Symbol::CI | Symbol::CLI)
    }

    // Central symbols first, then by (power of ∂, group coordinates).
    fn sort_key(&self) -> (u8, u32, Option<&GroupElement>, u8) {
        match self {
            Symbol::CL => (0, 0, None, 0),
            Symbol::CI => (1, 0, None, 0),
            Symbol::CLI => (2, 0, None, 0),
            Symbol::I(x) => (3, 0, Some(x), 0),
            Symbol::L(x) => (3, 1, Some(x), 1),
            Symbol::D(x, m) => (3, *m, Some(x), 2),
        }
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::CL => f.write_str("C_L"),
            Symbol::CI => f.write_str("C_I"),
            Symbol::CLI => f.write_str("C_LI"),
            Symbol::L(x) => write!(f, "L({x})"),
            Symbol::I(x) => write!(f, "I({x})"),
            Symbol::D(x, m) => write!(f, "D({x};{m})"),
        }
    }
}

/// Which algebra an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    /// Generalized Witt algebra, spanned by `L(x)`.
    W,
    /// Associative algebra of generalized differential operators, spanned by `D(x, m)`.
    D,
    /// Operators of order at most one, spanned by `L(x)` and `I(x)`.
    D1,
    /// Generalized Heisenberg-Virasoro algebra: `D1` plus `C_L`, `C_I`, `C_LI`.
    HV,
}

impl Tag {
    pub fn admits(self, s: &Symbol) -> bool {
        match self {
            Tag::W => matches!(s, Symbol::L(_)),
            Tag::D => matches!(s, Symbol::D(..)),
            Tag::D1 => matches!(s, Symbol::L(_) | Symbol::I(_)),
            Tag::HV => !matches!(s, Symbol::D(..)),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::W => "W",
            Tag::D => "D",
            Tag::D1 => "D1",
            Tag::HV => "HV",
        })
    }
}

impl std::str::FromStr for Tag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "w" | "witt" => Ok(Tag::W),
            "d" => Ok(Tag::D),
            "d1" => Ok(Tag::D1),
            "hv" | "l" => Ok(Tag::HV),
            other => Err(Error::Config(format!("unknown algebra {other:?}"))),
        }
    }
}

/// A finite linear combination of basis symbols with nonzero coefficients,
/// kept in canonical symbol order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    tag: Tag,
    terms: BTreeMap<Symbol, Scalar>,
}

impl Element {
    pub fn zero(tag: Tag) -> Self {
        Element {
            tag,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(tag: Tag, symbol: Symbol, coeff: Scalar) -> Result<Self> {
        let mut e = Element::zero(tag);
        e.push(symbol, coeff)?;
        Ok(e)
    }

    /// The basis vector of `symbol`.
    pub fn basis(tag: Tag, symbol: Symbol) -> Result<Self> {
        Self::monomial(tag, symbol, Scalar::one())
    }

    pub fn from_terms(tag: Tag, terms: impl IntoIterator<Item = (Symbol, Scalar)>) -> Result<Self> {
        let mut e = Element::zero(tag);
        for (s, c) in terms {
            e.push(s, c)?;
        }
        Ok(e)
    }

    /// Adds `coeff · symbol`, checking admissibility.
    pub fn push(&mut self, symbol: Symbol, coeff: Scalar) -> Result<()> {
        if !self.tag.admits(&symbol) {
            return Err(Error::Inadmissible {
                symbol: symbol.to_string(),
                tag: self.tag,
            });
        }
        self.add_term(symbol, coeff);
        Ok(())
    }

    /// Adds `coeff · symbol` for a symbol the caller knows is admissible.
    pub(crate) fn add_term(&mut self, symbol: Symbol, coeff: Scalar) {
        debug_assert!(self.tag.admits(&symbol), "{symbol} in {}", self.tag);
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(symbol) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Symbol, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &Symbol) -> Scalar {
        self.terms.get(s).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, k: &Scalar) -> Element {
        if k.is_zero() {
            return Element::zero(self.tag);
        }
        Element {
            tag: self.tag,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        expect_tag(other, self.tag)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.checked_add(&-other)
    }

    /// Rejects group elements that do not belong to `g`.
    pub fn check_group(&self, g: &GroupInstance) -> Result<()> {
        self.terms
            .keys()
            .filter_map(Symbol::degree)
            .try_for_each(|x| g.check(x))
    }

    /// `L(x) ↦ D(x,1)`, `I(x) ↦ D(x,0)`; `W` and `D1` into `D`.
    pub fn to_d(&self) -> Result<Element> {
        let terms = self.terms.iter().map(|(s, c)| {
            let sym = match s {
                Symbol::L(x) => Symbol::D(x.clone(), 1),
                Symbol::I(x) => Symbol::D(x.clone(), 0),
                other => other.clone(),
            };
            (sym, c.clone())
        });
        Element::from_terms(Tag::D, terms)
    }

    /// Into `D1`: from `W` verbatim, from `D` when every term has order at most
    /// one, and from `HV` by dropping the center.
    pub fn to_d1(&self) -> Result<Element> {
        let mut out = Element::zero(Tag::D1);
        for (s, c) in &self.terms {
            let sym = match s {
                Symbol::D(x, 0) => Symbol::I(x.clone()),
                Symbol::D(x, 1) => Symbol::L(x.clone()),
                Symbol::D(_, m) => return Err(Error::OrderTooHigh(*m)),
                s if s.is_central() => continue,
                other => other.clone(),
            };
            out.add_term(sym, c.clone());
        }
        Ok(out)
    }

    /// `W` or `D1` into `HV`.
    pub fn to_hv(&self) -> Result<Element> {
        match self.tag {
            Tag::W | Tag::D1 | Tag::HV => Element::from_terms(Tag::HV, self.terms.clone()),
            Tag::D => self.to_d1()?.to_hv(),
        }
    }

    /// `D1` into `W`, when no `I` terms are present.
    pub fn to_w(&self) -> Result<Element> {
        Element::from_terms(Tag::W, self.terms.clone())
    }

    /// The central part `c_L C_L + c_I C_I + c_LI C_LI` of an `HV` element.
    pub fn central_part(&self) -> [Scalar; 3] {
        [
            self.coeff(&Symbol::CL),
            self.coeff(&Symbol::CI),
            self.coeff(&Symbol::CLI),
        ]
    }
}

pub(crate) fn expect_tag(u: &Element, tag: Tag) -> Result<()> {
    if u.tag != tag {
        return Err(Error::TagMismatch {
            expected: tag,
            found: u.tag,
        });
    }
    Ok(())
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            tag: self.tag,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), -c)).collect(),
        }
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

/// Panics if the tags differ; see [`Element::checked_add`].
impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("adding elements of different algebras")
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

/// Panics if the tags differ; see [`Element::checked_sub`].
impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.checked_sub(rhs).expect("subtracting elements of different algebras")
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

fn write_coeff_term(f: &mut fmt::Formatter<'_>, first: bool, c: &Scalar, s: &Symbol) -> fmt::Result {
    let quadratic = c.as_rational().is_none();
    let negative = !quadratic && c.rational_part().is_negative();
    let magnitude = if negative { -c } else { c.clone() };
    match (first, negative) {
        (true, true) => f.write_str("-")?,
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
        (true, false) => {}
    }
    if quadratic {
        write!(f, "({magnitude})*{s}")
    } else if magnitude.is_one() {
        write!(f, "{s}")
    } else {
        write!(f, "{magnitude}*{s}")
    }
}

/// Canonical text form, highest power of `∂` first and the center last, e.g.
/// `-4*L(0) + 1/2*C_L` or `D(3;2) + 2*D(3;1)`.
impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.terms.iter().rev().enumerate() {
            write_coeff_term(f, i == 0, c, s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: i64) -> Symbol {
        Symbol::L(GroupElement::int(n))
    }
    fn i(n: i64) -> Symbol {
        Symbol::I(GroupElement::int(n))
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut e = Element::zero(Tag::D1);
        e.push(l(1), Scalar::from_int(2)).unwrap();
        e.push(l(1), Scalar::from_int(-2)).unwrap();
        assert!(e.is_zero());
        e.push(i(3), Scalar::zero()).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn admissibility() {
        assert!(Element::basis(Tag::W, i(1)).is_err());
        assert!(Element::basis(Tag::D1, Symbol::CL).is_err());
        assert!(Element::basis(Tag::D, l(1)).is_err());
        assert!(Element::basis(Tag::HV, Symbol::CLI).is_ok());
    }

    #[test]
    fn canonical_order_and_text() {
        let e = Element::from_terms(
            Tag::HV,
            [
                (Symbol::CL, Scalar::from_ratio(-1, 2)),
                (l(2), Scalar::one()),
                (i(-1), Scalar::from_int(3)),
            ],
        )
        .unwrap();
        let order: Vec<_> = e.terms().map(|(s, _)| s.clone()).collect();
        assert_eq!(order, vec![Symbol::CL, i(-1), l(2)]);
        assert_eq!(e.to_string(), "L(2) + 3*I(-1) - 1/2*C_L");
        let d = Element::from_terms(
            Tag::D,
            [
                (Symbol::D(GroupElement::int(3), 1), Scalar::from_int(2)),
                (Symbol::D(GroupElement::int(3), 2), Scalar::one()),
            ],
        )
        .unwrap();
        assert_eq!(d.to_string(), "D(3;2) + 2*D(3;1)");
        let q = Element::monomial(Tag::W, l(1), "-1+sqrt(2)".parse().unwrap()).unwrap();
        assert_eq!(q.to_string(), "(-1+1*sqrt(2))*L(1)");
        assert_eq!(Element::zero(Tag::W).to_string(), "0");
    }

    #[test]
    fn embeddings_round_trip() {
        let e = Element::from_terms(Tag::D1, [(l(1), Scalar::one()), (i(2), Scalar::from_int(5))]).unwrap();
        assert_eq!(e.to_d().unwrap().to_d1().unwrap(), e);
        let high = Element::basis(Tag::D, Symbol::D(GroupElement::int(0), 2)).unwrap();
        assert_eq!(high.to_d1(), Err(Error::OrderTooHigh(2)));
    }
}
