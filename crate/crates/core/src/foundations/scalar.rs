//! Exact scalars: rationals and elements of a real quadratic field `Q(sqrt(d))`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact field element.
///
/// `Rational` values mix freely with `Quadratic` ones; the result of a mixed
/// operation lives in the quadratic field. Two quadratic operands must share
/// the same `d`, which is fixed by the group configuration.
///
/// Equality is by value: `Rational(2)` equals `Quadratic { 2, 0, d }`.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(BigRational),
    /// `rational + surd * sqrt(d)` with `d` squarefree and at least 2.
    Quadratic {
        rational: BigRational,
        surd: BigRational,
        d: u64,
    },
}

pub fn is_squarefree(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Rational(r)
    }

    /// `rational + surd * sqrt(d)`.
    pub fn quadratic(rational: BigRational, surd: BigRational, d: u64) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(Error::FieldMismatch(format!(
                "sqrt({d}) does not define a quadratic extension (d must be squarefree and >= 2)"
            )));
        }
        Ok(Scalar::Quadratic { rational, surd, d })
    }

    pub fn sqrt_of(d: u64) -> Result<Self> {
        Self::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        match self {
            Scalar::Rational(r) => r,
            Scalar::Quadratic { rational, .. } => rational,
        }
    }

    /// Coefficient of `sqrt(d)`; zero for rational scalars.
    pub fn surd_part(&self) -> BigRational {
        match self {
            Scalar::Rational(_) => BigRational::zero(),
            Scalar::Quadratic { surd, .. } => surd.clone(),
        }
    }

    /// The `d` of the quadratic field this value was built in, if any.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Quadratic { d, .. } => Some(*d),
        }
    }

    /// The value as a rational, when its surd part vanishes.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Quadratic { rational, surd, .. } if surd.is_zero() => Some(rational.clone()),
            Scalar::Quadratic { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Quadratic { rational, surd, .. } => rational.is_zero() && surd.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Quadratic { rational, surd, .. } => rational.is_one() && surd.is_zero(),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Quadratic { rational, surd, d } => {
                // (p + q√d)^-1 = (p - q√d) / (p² - d q²); the norm is nonzero since √d is irrational.
                let norm = rational * rational
                    - surd * surd * BigRational::from_integer(BigInt::from(*d));
                Scalar::Quadratic {
                    rational: rational / &norm,
                    surd: -(surd / &norm),
                    d: *d,
                }
            }
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        other.inv().map(|inv| self * &inv)
    }

    /// Integer power; negative exponents invert, and `0^-n` returns `None`.
    pub fn pow(&self, exp: i64) -> Option<Scalar> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Scalar::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Some(acc)
    }

    fn shared_modulus(&self, other: &Scalar) -> Option<u64> {
        match (self.modulus(), other.modulus()) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => Some(d),
            (Some(d1), Some(d2)) => {
                assert_eq!(
                    d1, d2,
                    "arithmetic between Q(sqrt({d1})) and Q(sqrt({d2})) is undefined"
                );
                Some(d1)
            }
        }
    }

    fn build(rational: BigRational, surd: BigRational, d: Option<u64>) -> Scalar {
        match d {
            None => Scalar::Rational(rational),
            Some(d) => Scalar::Quadratic { rational, surd, d },
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.rational_part() != other.rational_part() {
            return false;
        }
        let (s1, s2) = (self.surd_part(), other.surd_part());
        if s1.is_zero() && s2.is_zero() {
            return true;
        }
        s1 == s2 && self.modulus() == other.modulus()
    }
}

impl Eq for Scalar {}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        let d = self.shared_modulus(rhs);
        Scalar::build(
            self.rational_part() + rhs.rational_part(),
            self.surd_part() + rhs.surd_part(),
            d,
        )
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        let d = self.shared_modulus(rhs);
        Scalar::build(
            self.rational_part() - rhs.rational_part(),
            self.surd_part() - rhs.surd_part(),
            d,
        )
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => {
                let d = self.shared_modulus(rhs);
                let dd = BigRational::from_integer(BigInt::from(d.unwrap_or(0)));
                let (p, q) = (self.rational_part(), self.surd_part());
                let (r, s) = (rhs.rational_part(), rhs.surd_part());
                Scalar::build(p * r + &q * &s * dd, p * &s + q * r, d)
            }
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::checked_div`] otherwise.
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Quadratic { rational, surd, d } => Scalar::Quadratic {
                rational: -rational,
                surd: -surd,
                d: *d,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Quadratic { rational, surd, d } => {
                if surd.is_zero() {
                    write!(f, "{rational}")
                } else if rational.is_zero() {
                    write!(f, "{surd}*sqrt({d})")
                } else if surd.is_negative() {
                    write!(f, "{rational}-{}*sqrt({d})", -surd)
                } else {
                    write!(f, "{rational}+{surd}*sqrt({d})")
                }
            }
        }
    }
}

pub(crate) fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.strip_prefix('+').unwrap_or(num).parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p`, `p/q`, `p/q+r/s*sqrt(d)`, `p/q-r/s*sqrt(d)`, `r/s*sqrt(d)`
    /// and `sqrt(d)`, ignoring whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse {
            column: 1,
            message: format!("invalid scalar literal {s:?}"),
        };
        let Some(pos) = compact.find("sqrt(") else {
            return parse_rational(&compact).map(Scalar::Rational).ok_or_else(bad);
        };
        let inner = compact[pos + 5..].strip_suffix(')').ok_or_else(bad)?;
        let d: u64 = inner.parse().map_err(|_| bad())?;
        let prefix = &compact[..pos];
        let prefix = prefix.strip_suffix('*').unwrap_or(prefix);
        let split = prefix
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last();
        let (rational, coeff) = match split {
            Some(i) => (parse_rational(&prefix[..i]).ok_or_else(bad)?, &prefix[i..]),
            None => (BigRational::zero(), prefix),
        };
        let surd = match coeff {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            c => parse_rational(c).ok_or_else(bad)?,
        };
        Scalar::quadratic(rational, surd, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_prints_canonically() {
        assert_eq!(q("6/4").to_string(), "3/2");
        assert_eq!(q("-2/-4").to_string(), "1/2");
        assert_eq!(q("1+sqrt(2)").to_string(), "1+1*sqrt(2)");
        assert_eq!(q("1/2-3/4*sqrt(3)").to_string(), "1/2-3/4*sqrt(3)");
        assert_eq!(q("-sqrt(5)").to_string(), "-1*sqrt(5)");
        assert_eq!(q("2*sqrt(2)"), Scalar::sqrt_of(2).unwrap() * Scalar::from_int(2));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("sqrt(4)".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn quadratic_inverse() {
        let x = q("1+sqrt(2)");
        assert_eq!(x.inv().unwrap(), q("-1+sqrt(2)"));
        assert_eq!(&x * &x.inv().unwrap(), Scalar::one());
        assert!(Scalar::zero().inv().is_none());
    }

    #[test]
    fn value_equality_across_representations() {
        let two = Scalar::quadratic(BigRational::from_integer(2.into()), BigRational::zero(), 3)
            .unwrap();
        assert_eq!(two, Scalar::from_int(2));
        assert_eq!(q("sqrt(2)") * q("sqrt(2)"), Scalar::from_int(2));
    }

    #[test]
    fn powers() {
        assert_eq!(Scalar::from_int(2).pow(3).unwrap(), Scalar::from_int(8));
        assert_eq!(Scalar::from_int(2).pow(-2).unwrap(), Scalar::from_ratio(1, 4));
        assert_eq!(q("sqrt(3)").pow(4).unwrap(), Scalar::from_int(9));
        assert!(Scalar::zero().pow(-1).is_none());
        assert!(Scalar::zero().pow(0).unwrap().is_one());
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(2) && is_squarefree(6) && is_squarefree(30));
        assert!(!is_squarefree(1) && !is_squarefree(4) && !is_squarefree(18));
    }
}
