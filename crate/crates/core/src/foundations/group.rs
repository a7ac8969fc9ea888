//! Grading groups `A`, the pairing `∂: A → F`, characters and additive maps.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::linalg;
use super::scalar::{parse_rational, Scalar};
use crate::error::{Error, Result};

/// The closed set of supported grading groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Z,
    /// `Z^n` for `2 <= n <= 4`.
    Zn(usize),
    Q,
}

impl GroupKind {
    pub fn rank(self) -> usize {
        match self {
            GroupKind::Z | GroupKind::Q => 1,
            GroupKind::Zn(n) => n,
        }
    }

    pub fn is_lattice(self) -> bool {
        !matches!(self, GroupKind::Q)
    }

    pub fn name(self) -> String {
        match self {
            GroupKind::Z => "Z".into(),
            GroupKind::Zn(n) => format!("Z{n}"),
            GroupKind::Q => "Q".into(),
        }
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" => Ok(GroupKind::Z),
            "Q" => Ok(GroupKind::Q),
            "Z2" | "Z^2" => Ok(GroupKind::Zn(2)),
            "Z3" | "Z^3" => Ok(GroupKind::Zn(3)),
            "Z4" | "Z^4" => Ok(GroupKind::Zn(4)),
            other => Err(Error::Config(format!("unknown group kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldMode {
    Rational,
    /// `Q(sqrt(d))`, `d` squarefree and at least 2.
    Quadratic(u64),
}

impl FieldMode {
    /// Checks that `s` belongs to this field and returns it in canonical form.
    pub fn admit(self, s: &Scalar) -> Result<Scalar> {
        match self {
            FieldMode::Rational => s
                .as_rational()
                .map(Scalar::Rational)
                .ok_or_else(|| Error::FieldMismatch(format!("{s} is not rational"))),
            FieldMode::Quadratic(d) => match s.modulus() {
                Some(m) if m != d => Err(Error::FieldMismatch(format!(
                    "{s} does not lie in Q(sqrt({d}))"
                ))),
                _ => Scalar::quadratic(s.rational_part().clone(), s.surd_part(), d),
            },
        }
    }
}

/// An element of the grading group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElement {
    Lattice(Vec<i64>),
    Rational(BigRational),
}

impl GroupElement {
    pub fn int(n: i64) -> Self {
        GroupElement::Lattice(vec![n])
    }

    pub fn lattice(coords: &[i64]) -> Self {
        GroupElement::Lattice(coords.to_vec())
    }

    pub fn rational(num: i64, den: i64) -> Self {
        GroupElement::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GroupElement::Lattice(c) => c.iter().all(|&x| x == 0),
            GroupElement::Rational(r) => r.is_zero(),
        }
    }

    pub fn zero_like(&self) -> Self {
        match self {
            GroupElement::Lattice(c) => GroupElement::Lattice(vec![0; c.len()]),
            GroupElement::Rational(_) => GroupElement::Rational(BigRational::zero()),
        }
    }

    /// Panics when the two elements belong to different groups.
    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (GroupElement::Lattice(a), GroupElement::Lattice(b)) => {
                assert_eq!(a.len(), b.len(), "lattice ranks differ");
                GroupElement::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupElement::Rational(a), GroupElement::Rational(b)) => {
                GroupElement::Rational(a + b)
            }
            _ => panic!("adding elements of different grading groups"),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            GroupElement::Lattice(c) => GroupElement::Lattice(c.iter().map(|x| -x).collect()),
            GroupElement::Rational(r) => GroupElement::Rational(-r),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale_int(&self, k: i64) -> Self {
        match self {
            GroupElement::Lattice(c) => GroupElement::Lattice(c.iter().map(|x| k * x).collect()),
            GroupElement::Rational(r) => GroupElement::Rational(r * BigRational::from_integer(k.into())),
        }
    }

    /// `eps · x`, or `None` when the result leaves the group (a non-integer
    /// multiple of a lattice point).
    pub fn scale(&self, eps: &BigRational) -> Option<Self> {
        match self {
            GroupElement::Rational(r) => Some(GroupElement::Rational(r * eps)),
            GroupElement::Lattice(c) => {
                if eps.is_integer() {
                    let k = eps.to_integer().to_i64()?;
                    Some(GroupElement::Lattice(c.iter().map(|x| k * x).collect()))
                } else {
                    let scaled: Option<Vec<i64>> = c
                        .iter()
                        .map(|&x| {
                            let v = eps * BigRational::from_integer(x.into());
                            if v.is_integer() {
                                v.to_integer().to_i64()
                            } else {
                                None
                            }
                        })
                        .collect();
                    scaled.map(GroupElement::Lattice)
                }
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Lattice(c) => {
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            GroupElement::Rational(r) => write!(f, "{r}"),
        }
    }
}

/// A grading group together with the pairing `∂` and the scalar field.
///
/// The pairing is given by its values on the generators: the unit vectors for
/// `Z` and `Z^n`, and `1` for `Q` (where additivity forces `∂(x) = x·∂(1)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupInstance {
    kind: GroupKind,
    pairing: Vec<Scalar>,
    field: FieldMode,
}

impl GroupInstance {
    /// Builds an instance and rejects degenerate pairings.
    pub fn new(kind: GroupKind, pairing: Vec<Scalar>, field: FieldMode) -> Result<Self> {
        let g = Self::unvalidated(kind, pairing, field)?;
        if let Some(w) = g.degeneracy_witness() {
            return Err(Error::Degenerate(w.to_string()));
        }
        Ok(g)
    }

    /// Builds an instance without the nondegeneracy check; arity and field
    /// membership are still validated.
    pub fn unvalidated(kind: GroupKind, pairing: Vec<Scalar>, field: FieldMode) -> Result<Self> {
        if let GroupKind::Zn(n) = kind {
            if !(2..=4).contains(&n) {
                return Err(Error::Config(format!("Z^{n} is outside the supported range 2..=4")));
            }
        }
        if pairing.len() != kind.rank() {
            return Err(Error::Arity {
                expected: kind.rank(),
                found: pairing.len(),
            });
        }
        if let FieldMode::Quadratic(d) = field {
            Scalar::sqrt_of(d)?;
        }
        let pairing = pairing
            .iter()
            .map(|s| field.admit(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupInstance {
            kind,
            pairing,
            field,
        })
    }

    /// `Z` with `∂(m) = m`.
    pub fn integers() -> Self {
        Self::new(GroupKind::Z, vec![Scalar::one()], FieldMode::Rational).expect("nondegenerate")
    }

    /// `Q` with `∂(x) = x`.
    pub fn rationals() -> Self {
        Self::new(GroupKind::Q, vec![Scalar::one()], FieldMode::Rational).expect("nondegenerate")
    }

    /// `Z²` with `∂(m, n) = m + n·sqrt(d)` over `Q(sqrt(d))`.
    pub fn lattice_sqrt(d: u64) -> Result<Self> {
        Self::new(
            GroupKind::Zn(2),
            vec![Scalar::one(), Scalar::sqrt_of(d)?],
            FieldMode::Quadratic(d),
        )
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn field(&self) -> FieldMode {
        self.field
    }

    pub fn pairing_values(&self) -> &[Scalar] {
        &self.pairing
    }

    pub fn rank(&self) -> usize {
        self.kind.rank()
    }

    pub fn zero(&self) -> GroupElement {
        match self.kind {
            GroupKind::Q => GroupElement::Rational(BigRational::zero()),
            k => GroupElement::Lattice(vec![0; k.rank()]),
        }
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        match self.kind {
            GroupKind::Q => vec![GroupElement::Rational(BigRational::one())],
            k => (0..k.rank())
                .map(|i| {
                    let mut c = vec![0; k.rank()];
                    c[i] = 1;
                    GroupElement::Lattice(c)
                })
                .collect(),
        }
    }

    /// The first generator with nonzero pairing value.
    pub fn base_point(&self) -> GroupElement {
        self.generators()
            .into_iter()
            .zip(&self.pairing)
            .find(|(_, v)| !v.is_zero())
            .map(|(g, _)| g)
            .expect("a nondegenerate pairing is nonzero on some generator")
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        match (self.kind, x) {
            (GroupKind::Q, GroupElement::Rational(_)) => Ok(()),
            (GroupKind::Q, GroupElement::Lattice(_)) => Err(Error::GroupMismatch),
            (_, GroupElement::Rational(_)) => Err(Error::GroupMismatch),
            (k, GroupElement::Lattice(c)) if c.len() != k.rank() => Err(Error::Arity {
                expected: k.rank(),
                found: c.len(),
            }),
            _ => Ok(()),
        }
    }

    pub fn pairing_eval(&self, x: &GroupElement) -> Result<Scalar> {
        self.check(x)?;
        Ok(self.pair(x))
    }

    /// `∂(x)` for an element already known to belong to this group.
    pub fn pair(&self, x: &GroupElement) -> Scalar {
        match x {
            GroupElement::Rational(r) => &Scalar::Rational(r.clone()) * &self.pairing[0],
            GroupElement::Lattice(c) => c
                .iter()
                .zip(&self.pairing)
                .filter(|(&k, _)| k != 0)
                .map(|(&k, v)| &Scalar::from_int(k) * v)
                .sum(),
        }
    }

    pub fn verify_nondegenerate(&self) -> bool {
        self.degeneracy_witness().is_none()
    }

    /// A nonzero `x` with `∂(x) = 0`, if one exists.
    ///
    /// For `Z^n` the rational and surd parts of the generator values form a
    /// `2 × n` rational matrix; `∂(x) = 0` for integral `x` exactly when `x`
    /// lies in its null space, and any rational null vector clears to an
    /// integral one.
    pub fn degeneracy_witness(&self) -> Option<GroupElement> {
        match self.kind {
            GroupKind::Q => self.pairing[0]
                .is_zero()
                .then(|| GroupElement::Rational(BigRational::one())),
            k => {
                let n = k.rank();
                let rows = vec![
                    self.pairing
                        .iter()
                        .map(|v| Scalar::Rational(v.rational_part().clone()))
                        .collect::<Vec<_>>(),
                    self.pairing
                        .iter()
                        .map(|v| Scalar::Rational(v.surd_part()))
                        .collect(),
                ];
                let ns = linalg::null_space(&rows, n);
                let v = ns.first()?;
                let rats: Vec<BigRational> = v
                    .iter()
                    .map(|s| s.as_rational().expect("rational matrix"))
                    .collect();
                let lcm = rats
                    .iter()
                    .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
                let ints: Vec<BigInt> = rats
                    .iter()
                    .map(|r| (r * BigRational::from_integer(lcm.clone())).to_integer())
                    .collect();
                let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                let coords = ints
                    .iter()
                    .map(|x| (x / &gcd).to_i64().expect("small witness"))
                    .collect();
                Some(GroupElement::Lattice(coords))
            }
        }
    }

    /// Membership of `e` in the scaling set: `e·A = A`.
    pub fn epsilon_in_e(&self, e: &Scalar) -> Result<bool> {
        if e.is_zero() {
            return Err(Error::ZeroScalar("scaling factor"));
        }
        let r = e
            .as_rational()
            .ok_or_else(|| Error::NotRational(e.to_string()))?;
        Ok(match self.kind {
            GroupKind::Q => true,
            _ => r.abs().is_one(),
        })
    }

    /// Parses a group element: comma-separated integers for lattices, one
    /// rational for `Q`.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let bad = |m: String| Error::Parse {
            column: 1,
            message: m,
        };
        match self.kind {
            GroupKind::Q => parse_rational(text)
                .map(GroupElement::Rational)
                .ok_or_else(|| bad(format!("invalid rational group element {text:?}"))),
            k => {
                let coords = text
                    .split(',')
                    .map(|c| c.trim().parse::<i64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad(format!("invalid lattice element {text:?}")))?;
                if coords.len() != k.rank() {
                    return Err(Error::Arity {
                        expected: k.rank(),
                        found: coords.len(),
                    });
                }
                Ok(GroupElement::Lattice(coords))
            }
        }
    }
}

/// A homomorphism `A → F*`, stored by its generator images.
///
/// On `Q` only the trivial character is representable: a homomorphism
/// `Q → Q*` needs every root of `χ(1)`, which forces `χ ≡ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    images: Vec<Scalar>,
}

impl Character {
    pub fn new(g: &GroupInstance, images: Vec<Scalar>) -> Result<Self> {
        if images.len() != g.rank() {
            return Err(Error::Arity {
                expected: g.rank(),
                found: images.len(),
            });
        }
        let images = images
            .iter()
            .map(|s| g.field().admit(s))
            .collect::<Result<Vec<_>>>()?;
        if images.iter().any(Scalar::is_zero) {
            return Err(Error::ZeroScalar("character image"));
        }
        if g.kind() == GroupKind::Q && !images[0].is_one() {
            return Err(Error::Config(
                "only the trivial character is representable on Q".into(),
            ));
        }
        Ok(Character { images })
    }

    pub fn trivial(g: &GroupInstance) -> Self {
        Character {
            images: vec![Scalar::one(); g.rank()],
        }
    }

    pub fn images(&self) -> &[Scalar] {
        &self.images
    }

    pub(crate) fn unit(rank: usize) -> Self {
        Character {
            images: vec![Scalar::one(); rank],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(Scalar::is_one)
    }

    pub fn eval(&self, x: &GroupElement) -> Scalar {
        match x {
            GroupElement::Rational(_) => Scalar::one(),
            GroupElement::Lattice(c) => c
                .iter()
                .zip(&self.images)
                .filter(|(&k, _)| k != 0)
                .fold(Scalar::one(), |acc, (&k, v)| {
                    &acc * &v.pow(k).expect("character images are nonzero")
                }),
        }
    }

    /// Pointwise product `(χ₁χ₂)(x) = χ₁(x)χ₂(x)`.
    pub fn mul(&self, other: &Character) -> Character {
        Character {
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn inverse(&self) -> Character {
        Character {
            images: self
                .images
                .iter()
                .map(|v| v.inv().expect("character images are nonzero"))
                .collect(),
        }
    }

    /// `χ ∘ ε`, i.e. `x ↦ χ(εx)`, for `ε` in the scaling set.
    pub fn precompose_scaling(&self, eps: &BigRational) -> Character {
        if self.is_trivial() {
            return self.clone();
        }
        let k = eps
            .to_integer()
            .to_i64()
            .filter(|_| eps.is_integer())
            .expect("nontrivial characters only live on lattices, where the scaling set is {1, -1}");
        Character {
            images: self
                .images
                .iter()
                .map(|v| v.pow(k).expect("character images are nonzero"))
                .collect(),
        }
    }
}

/// An additive map `A → F`, stored by its generator images (`μ(x) = x·μ(1)` on `Q`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveMap {
    images: Vec<Scalar>,
}

impl AdditiveMap {
    pub fn new(g: &GroupInstance, images: Vec<Scalar>) -> Result<Self> {
        if images.len() != g.rank() {
            return Err(Error::Arity {
                expected: g.rank(),
                found: images.len(),
            });
        }
        let images = images
            .iter()
            .map(|s| g.field().admit(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(AdditiveMap { images })
    }

    pub fn zero(g: &GroupInstance) -> Self {
        AdditiveMap {
            images: vec![Scalar::zero(); g.rank()],
        }
    }

    /// The pairing itself, `μ = ∂`.
    pub fn pairing(g: &GroupInstance) -> Self {
        AdditiveMap {
            images: g.pairing_values().to_vec(),
        }
    }

    pub fn images(&self) -> &[Scalar] {
        &self.images
    }

    pub fn eval(&self, x: &GroupElement) -> Scalar {
        match x {
            GroupElement::Rational(r) => &Scalar::Rational(r.clone()) * &self.images[0],
            GroupElement::Lattice(c) => c
                .iter()
                .zip(&self.images)
                .filter(|(&k, _)| k != 0)
                .map(|(&k, v)| &Scalar::from_int(k) * v)
                .sum(),
        }
    }

    pub fn add(&self, other: &AdditiveMap) -> AdditiveMap {
        AdditiveMap {
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> AdditiveMap {
        AdditiveMap {
            images: self.images.iter().map(|v| v * k).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn pairing_examples() {
        let z = GroupInstance::integers();
        assert_eq!(z.pairing_eval(&GroupElement::int(5)).unwrap(), Scalar::from_int(5));
        assert!(z.pairing_eval(&GroupElement::int(0)).unwrap().is_zero());
        let z2 = GroupInstance::lattice_sqrt(2).unwrap();
        assert_eq!(
            z2.pairing_eval(&GroupElement::lattice(&[1, 1])).unwrap(),
            s("1+sqrt(2)")
        );
        assert!(z2.pairing_eval(&GroupElement::int(1)).is_err());
        assert!(z2.pairing_eval(&GroupElement::rational(1, 2)).is_err());
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(GroupInstance::integers().verify_nondegenerate());
        let flat = GroupInstance::unvalidated(
            GroupKind::Zn(2),
            vec![Scalar::one(), Scalar::one()],
            FieldMode::Rational,
        )
        .unwrap();
        assert!(!flat.verify_nondegenerate());
        let w = flat.degeneracy_witness().unwrap();
        assert!(!w.is_zero());
        assert!(flat.pair(&w).is_zero());
        assert!(GroupInstance::lattice_sqrt(2).unwrap().verify_nondegenerate());
        assert!(GroupInstance::new(GroupKind::Zn(2), vec![s("1"), s("1")], FieldMode::Rational).is_err());
    }

    #[test]
    fn higher_rank_lattices_are_degenerate_over_a_quadratic_field() {
        let z3 = GroupInstance::unvalidated(
            GroupKind::Zn(3),
            vec![s("1"), s("sqrt(2)"), s("1/3+sqrt(2)")],
            FieldMode::Quadratic(2),
        )
        .unwrap();
        let w = z3.degeneracy_witness().unwrap();
        assert!(z3.pair(&w).is_zero() && !w.is_zero());
    }

    #[test]
    fn scaling_set_examples() {
        let z = GroupInstance::integers();
        let q = GroupInstance::rationals();
        assert!(z.epsilon_in_e(&Scalar::from_int(-1)).unwrap());
        assert!(q.epsilon_in_e(&Scalar::from_ratio(2, 3)).unwrap());
        assert!(!z.epsilon_in_e(&Scalar::from_int(2)).unwrap());
        assert!(z.epsilon_in_e(&Scalar::zero()).is_err());
        assert!(z.epsilon_in_e(&s("sqrt(2)")).is_err());
    }

    #[test]
    fn character_and_additive_examples() {
        let z = GroupInstance::integers();
        let chi = Character::new(&z, vec![Scalar::from_int(2)]).unwrap();
        assert_eq!(chi.eval(&GroupElement::int(3)), Scalar::from_int(8));
        assert!(chi.eval(&GroupElement::int(0)).is_one());
        assert_eq!(chi.eval(&GroupElement::int(-2)), Scalar::from_ratio(1, 4));
        let z2 = GroupInstance::lattice_sqrt(2).unwrap();
        let mu = AdditiveMap::new(&z2, vec![Scalar::one(), Scalar::from_int(-1)]).unwrap();
        assert_eq!(mu.eval(&GroupElement::lattice(&[2, 3])), Scalar::from_int(-1));
        assert!(mu.eval(&z2.zero()).is_zero());
        assert!(Character::new(&GroupInstance::rationals(), vec![Scalar::from_int(2)]).is_err());
        assert!(Character::new(&z, vec![Scalar::zero()]).is_err());
    }

    #[test]
    fn rational_group_scaling() {
        let x = GroupElement::rational(3, 4);
        assert_eq!(
            x.scale(&BigRational::new(2.into(), 3.into())).unwrap(),
            GroupElement::rational(1, 2)
        );
        assert!(GroupElement::int(3).scale(&BigRational::new(1.into(), 2.into())).is_none());
        assert_eq!(
            GroupElement::int(4).scale(&BigRational::new(1.into(), 2.into())).unwrap(),
            GroupElement::int(2)
        );
    }
}
