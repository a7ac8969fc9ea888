//! Derivations of `D1`: inner derivations, the outer families `σ₁, σ₂, σ₃,
//! ξ_μ`, probe-based degree decomposition, the constructive decomposition of
//! degree-0 derivations, and lifts to `HV`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{commutator, grade_components, Element, Symbol, Tag};
use crate::error::{Error, Result};
use crate::foundations::{AdditiveMap, GroupElement, GroupInstance, Scalar};
use crate::lift::{extend_linear, CentralLift, LiftKind};

pub type Coefficient = Arc<dyn Fn(&GroupElement) -> Scalar + Send + Sync>;

#[derive(Clone)]
pub enum Derivation {
    /// `v ↦ [w, v]`.
    Inner(Element),
    /// `L(x) ↦ ∂(x)I(x)`, `I(x) ↦ 0`.
    Sigma1,
    /// `L(x) ↦ I(x)`, `I(x) ↦ 0`.
    Sigma2,
    /// `L(x) ↦ 0`, `I(x) ↦ I(x)`.
    Sigma3,
    /// `L(x) ↦ μ(x)L(x)`, `I(x) ↦ μ(x)I(x)`.
    Xi(AdditiveMap),
    /// A degree-0 map given by coefficient functions:
    /// `I(x) ↦ β(x)I(x)`, `L(x) ↦ γ(x)L(x) + λ(x)I(x)`.
    Generic0 {
        beta: Coefficient,
        gamma: Coefficient,
        lambda: Coefficient,
    },
    Combination(Vec<(Scalar, Derivation)>),
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Derivation::Inner(w) => write!(f, "Inner({w})"),
            Derivation::Sigma1 => write!(f, "Sigma1"),
            Derivation::Sigma2 => write!(f, "Sigma2"),
            Derivation::Sigma3 => write!(f, "Sigma3"),
            Derivation::Xi(mu) => write!(f, "Xi({:?})", mu.images()),
            Derivation::Generic0 { .. } => write!(f, "Generic0"),
            Derivation::Combination(parts) => f.debug_list().entries(parts).finish(),
        }
    }
}

fn d1(s: Symbol) -> Element {
    Element::basis(Tag::D1, s).expect("D1 symbol")
}

fn mono(s: Symbol, c: Scalar) -> Element {
    Element::monomial(Tag::D1, s, c).expect("D1 symbol")
}

impl Derivation {
    pub fn inner(w: Element) -> Result<Self> {
        if w.tag() != Tag::D1 {
            return Err(Error::TagMismatch {
                expected: Tag::D1,
                found: w.tag(),
            });
        }
        Ok(Derivation::Inner(w))
    }

    pub fn generic0(
        beta: impl Fn(&GroupElement) -> Scalar + Send + Sync + 'static,
        gamma: impl Fn(&GroupElement) -> Scalar + Send + Sync + 'static,
        lambda: impl Fn(&GroupElement) -> Scalar + Send + Sync + 'static,
    ) -> Self {
        Derivation::Generic0 {
            beta: Arc::new(beta),
            gamma: Arc::new(gamma),
            lambda: Arc::new(lambda),
        }
    }

    pub fn plus(self, other: Derivation) -> Self {
        self.combine(Scalar::one(), other)
    }

    /// `self + k·other`.
    pub fn combine(self, k: Scalar, other: Derivation) -> Self {
        let mut parts = match self {
            Derivation::Combination(parts) => parts,
            d => vec![(Scalar::one(), d)],
        };
        parts.push((k, other));
        Derivation::Combination(parts)
    }

    /// The image of a basis symbol; `g` must match the symbol's group.
    pub fn on_symbol(&self, g: &GroupInstance, s: &Symbol) -> Element {
        match (self, s) {
            (Derivation::Inner(w), _) => commutator(g, w, &d1(s.clone())).expect("checked D1 operands"),
            (Derivation::Sigma1, Symbol::L(x)) => mono(Symbol::I(x.clone()), g.pair(x)),
            (Derivation::Sigma2, Symbol::L(x)) => d1(Symbol::I(x.clone())),
            (Derivation::Sigma3, Symbol::I(x)) => d1(Symbol::I(x.clone())),
            (Derivation::Xi(mu), Symbol::L(x) | Symbol::I(x)) => mono(s.clone(), mu.eval(x)),
            (Derivation::Generic0 { beta, .. }, Symbol::I(x)) => mono(s.clone(), beta(x)),
            (Derivation::Generic0 { gamma, lambda, .. }, Symbol::L(x)) => {
                &mono(s.clone(), gamma(x)) + &mono(Symbol::I(x.clone()), lambda(x))
            }
            (Derivation::Combination(parts), _) => parts
                .iter()
                .fold(Element::zero(Tag::D1), |acc, (k, d)| &acc + &d.on_symbol(g, s).scale(k)),
            _ => Element::zero(Tag::D1),
        }
    }

    fn apply_unchecked(&self, g: &GroupInstance, u: &Element) -> Element {
        extend_linear(Tag::D1, u, |s| self.on_symbol(g, s))
    }
}

/// Applies `D` to an element of `D1`.
pub fn derive(g: &GroupInstance, d: &Derivation, u: &Element) -> Result<Element> {
    if u.tag() != Tag::D1 {
        return Err(Error::TagMismatch {
            expected: Tag::D1,
            found: u.tag(),
        });
    }
    u.check_group(g)?;
    Ok(d.apply_unchecked(g, u))
}

/// `D[u, v] − [Du, v] − [u, Dv]`.
pub fn leibniz_defect(g: &GroupInstance, d: &Derivation, u: &Element, v: &Element) -> Result<Element> {
    let lhs = derive(g, d, &commutator(g, u, v)?)?;
    let a = commutator(g, &derive(g, d, u)?, v)?;
    let b = commutator(g, u, &derive(g, d, v)?)?;
    Ok(&(&lhs - &a) - &b)
}

/// The default probe set: `0`, `±e_i` and `±2e_i`.
pub fn default_probes(g: &GroupInstance) -> Vec<GroupElement> {
    let mut out = vec![g.zero()];
    for e in g.generators() {
        for k in [1, -1, 2, -2] {
            out.push(e.scale_int(k));
        }
    }
    out
}

/// The probe generators `L(p)` and `I(p)` for each probe point.
pub fn probe_symbols(probes: &[GroupElement]) -> Vec<Symbol> {
    probes
        .iter()
        .flat_map(|p| [Symbol::L(p.clone()), Symbol::I(p.clone())])
        .collect()
}

/// Homogeneous components of a derivation restricted to probe generators:
/// `components[x][s]` is the degree-`deg(s) + x` part of `D(s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeComponents {
    pub components: BTreeMap<GroupElement, BTreeMap<Symbol, Element>>,
}

impl DegreeComponents {
    pub fn degrees(&self) -> Vec<GroupElement> {
        self.components.keys().cloned().collect()
    }

    /// Sum of all components on `s`.
    pub fn recombine(&self, s: &Symbol) -> Element {
        self.components
            .values()
            .filter_map(|m| m.get(s))
            .fold(Element::zero(Tag::D1), |acc, e| &acc + e)
    }
}

/// Splits `D` into homogeneous pieces on the probe generators. More than
/// `bound` distinct degrees is reported as unbounded support.
pub fn degree_components(
    g: &GroupInstance,
    d: &Derivation,
    probes: &[GroupElement],
    bound: usize,
) -> Result<DegreeComponents> {
    let mut components: BTreeMap<GroupElement, BTreeMap<Symbol, Element>> = BTreeMap::new();
    for p in probes {
        g.check(p)?;
    }
    for s in probe_symbols(probes) {
        let y = s.degree().expect("probe symbols are graded").clone();
        for (deg, part) in grade_components(g, &d.on_symbol(g, &s)) {
            components.entry(deg.sub(&y)).or_default().insert(s.clone(), part);
        }
        if components.len() > bound {
            return Err(Error::UnboundedSupport {
                probe: s.to_string(),
                degrees: components.len(),
                bound,
            });
        }
    }
    Ok(DegreeComponents { components })
}

/// `D = ξ_μ + a·σ₁ + b·σ₂ + c0·σ₃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degree0Decomposition {
    pub mu: AdditiveMap,
    pub a: Scalar,
    pub b: Scalar,
    pub c0: Scalar,
}

impl Degree0Decomposition {
    pub fn to_derivation(&self) -> Derivation {
        Derivation::Combination(vec![
            (Scalar::one(), Derivation::Xi(self.mu.clone())),
            (self.a.clone(), Derivation::Sigma1),
            (self.b.clone(), Derivation::Sigma2),
            (self.c0.clone(), Derivation::Sigma3),
        ])
    }
}

/// Reads `(μ, a, b, c0)` off a degree-0 derivation and checks the
/// reconstruction against `D` on every probe generator.
pub fn decompose_degree0(g: &GroupInstance, d: &Derivation, probes: &[GroupElement]) -> Result<Degree0Decomposition> {
    let image = |s: Symbol| d.on_symbol(g, &s);
    let gamma = |x: &GroupElement| image(Symbol::L(x.clone())).coeff(&Symbol::L(x.clone()));
    let lambda = |x: &GroupElement| image(Symbol::L(x.clone())).coeff(&Symbol::I(x.clone()));

    let mu = AdditiveMap::new(g, g.generators().iter().map(gamma).collect())?;
    let zero = g.zero();
    let c0 = image(Symbol::I(zero.clone())).coeff(&Symbol::I(zero));
    let x0 = g.base_point();
    let (l1, l2) = (lambda(&x0), lambda(&x0.scale_int(2)));
    let a = (&l2 - &l1)
        .checked_div(&g.pair(&x0))
        .ok_or(Error::SingularProbe)?;
    let b = &(&l1 * &Scalar::from_int(2)) - &l2;
    let out = Degree0Decomposition { mu, a, b, c0 };

    let rebuilt = out.to_derivation();
    for p in probes {
        g.check(p)?;
    }
    for s in probe_symbols(probes) {
        let (got, want) = (d.on_symbol(g, &s), rebuilt.on_symbol(g, &s));
        if got != want {
            return Err(Error::NotADerivation(format!(
                "D({s}) = {got} but the degree-0 normal form predicts {want}"
            )));
        }
    }
    Ok(out)
}

/// Lifts `D` to a derivation of `HV`. `check_seed` enables the cocycle check
/// on the pulled-back forms.
pub fn lift_derivation_to_hv(g: &GroupInstance, d: &Derivation, check_seed: Option<u64>) -> Result<CentralLift> {
    let (g2, d2) = (g.clone(), d.clone());
    CentralLift::new(
        g,
        LiftKind::Derivation,
        Arc::new(move |u: &Element| d2.apply_unchecked(&g2, u)),
        check_seed,
    )
}

/// `D̂[u, v] − [D̂u, v] − [u, D̂v]` on `HV`.
pub fn lifted_leibniz_defect(g: &GroupInstance, lift: &CentralLift, u: &Element, v: &Element) -> Result<Element> {
    use crate::algebra::hv_bracket;
    let lhs = lift.apply(&hv_bracket(g, u, v)?)?;
    let a = hv_bracket(g, &lift.apply(u)?, v)?;
    let b = hv_bracket(g, u, &lift.apply(v)?)?;
    Ok(&(&lhs - &a) - &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;

    fn z() -> GroupInstance {
        GroupInstance::integers()
    }
    fn l(n: i64) -> Element {
        d1(Symbol::L(GroupElement::int(n)))
    }
    fn i(n: i64) -> Element {
        d1(Symbol::I(GroupElement::int(n)))
    }

    #[test]
    fn derive_examples() {
        let g = z();
        assert_eq!(derive(&g, &Derivation::Sigma1, &l(3)).unwrap(), i(3).scale(&Scalar::from_int(3)));
        assert!(derive(&g, &Derivation::Sigma3, &l(5)).unwrap().is_zero());
        assert_eq!(derive(&g, &Derivation::Sigma3, &i(5)).unwrap(), i(5));

        let g2 = GroupInstance::lattice_sqrt(2).unwrap();
        let mu = AdditiveMap::new(&g2, vec![Scalar::one(), Scalar::zero()]).unwrap();
        let x = d1(Symbol::L(GroupElement::lattice(&[2, 3])));
        assert_eq!(derive(&g2, &Derivation::Xi(mu), &x).unwrap(), x.scale(&Scalar::from_int(2)));

        let inner = Derivation::inner(l(0)).unwrap();
        assert_eq!(derive(&g, &inner, &l(4)).unwrap(), l(4).scale(&Scalar::from_int(4)));
        let w = Element::basis(Tag::W, Symbol::L(GroupElement::int(1))).unwrap();
        assert!(derive(&g, &inner, &w).is_err());
    }

    #[test]
    fn leibniz_examples() {
        let g = z();
        assert!(leibniz_defect(&g, &Derivation::Sigma1, &l(1), &l(2)).unwrap().is_zero());
        let bad = Derivation::generic0(
            |x: &GroupElement| Scalar::from_int(if x.is_zero() { 1 } else { 0 }),
            |_: &GroupElement| Scalar::zero(),
            |_: &GroupElement| Scalar::zero(),
        );
        assert!(!leibniz_defect(&g, &bad, &l(1), &i(-1)).unwrap().is_zero());
    }

    #[test]
    fn degree_component_examples() {
        let g = z();
        let probes = default_probes(&g);
        let d = Derivation::Sigma1.plus(Derivation::inner(l(1)).unwrap());
        let comps = degree_components(&g, &d, &probes, 8).unwrap();
        assert_eq!(comps.degrees(), vec![GroupElement::int(0), GroupElement::int(1)]);
        for s in probe_symbols(&probes) {
            assert_eq!(comps.recombine(&s), d.on_symbol(&g, &s));
        }
        let two = Derivation::inner(&l(1) + &l(-1)).unwrap();
        let comps = degree_components(&g, &two, &probes, 8).unwrap();
        assert_eq!(comps.degrees(), vec![GroupElement::int(-1), GroupElement::int(1)]);
        assert!(matches!(
            degree_components(&g, &two, &probes, 1),
            Err(Error::UnboundedSupport { .. })
        ));
    }

    #[test]
    fn decomposition_examples() {
        let g = GroupInstance::lattice_sqrt(2).unwrap();
        let probes = default_probes(&g);
        let mu = AdditiveMap::new(&g, vec![Scalar::one(), -Scalar::one()]).unwrap();
        let want = Degree0Decomposition {
            mu,
            a: Scalar::from_int(2),
            b: Scalar::from_int(3),
            c0: Scalar::from_int(5),
        };
        assert_eq!(decompose_degree0(&g, &want.to_derivation(), &probes).unwrap(), want);

        let inner = Derivation::inner(d1(Symbol::L(g.zero()))).unwrap();
        let got = decompose_degree0(&g, &inner, &probes).unwrap();
        assert_eq!(got.mu, AdditiveMap::pairing(&g));
        assert!(got.a.is_zero() && got.b.is_zero() && got.c0.is_zero());

        let zero = Derivation::Combination(vec![]);
        let got = decompose_degree0(&g, &zero, &probes).unwrap();
        assert_eq!(got.mu, AdditiveMap::zero(&g));

        let shifted = Derivation::inner(d1(Symbol::L(GroupElement::lattice(&[1, 0])))).unwrap();
        assert!(matches!(
            decompose_degree0(&g, &shifted, &probes),
            Err(Error::NotADerivation(_))
        ));
    }

    #[test]
    fn lift_examples() {
        let g = z();
        let inner = Derivation::inner(&l(2) + &i(-1)).unwrap();
        let lift = lift_derivation_to_hv(&g, &inner, Some(1)).unwrap();
        for s in crate::lift::CENTRAL {
            assert!(lift.apply_symbol(&s).is_zero());
        }
        let mut s = Sampler::new(9);
        for d in [Derivation::Sigma1, Derivation::Sigma2, Derivation::Sigma3, inner] {
            let lift = lift_derivation_to_hv(&g, &d, Some(2)).unwrap();
            for _ in 0..60 {
                let (u, v) = (s.element(&g, Tag::HV), s.element(&g, Tag::HV));
                assert!(lifted_leibniz_defect(&g, &lift, &u, &v).unwrap().is_zero(), "{d:?}");
            }
        }
    }

    #[test]
    fn xi_of_pairing_lifts_to_ad_l0() {
        use crate::algebra::hv_bracket;
        let g = z();
        let lift = lift_derivation_to_hv(&g, &Derivation::Xi(AdditiveMap::pairing(&g)), Some(3)).unwrap();
        let l0 = Element::basis(Tag::HV, Symbol::L(GroupElement::int(0))).unwrap();
        let mut s = Sampler::new(4);
        for _ in 0..100 {
            let u = s.element(&g, Tag::HV);
            assert_eq!(lift.apply(&u).unwrap(), hv_bracket(&g, &l0, &u).unwrap());
        }
    }
}
