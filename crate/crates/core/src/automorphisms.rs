//! Automorphisms of `D1`: the `θ(χ, ε, a, b, c)` family, inner automorphisms
//! `exp(k ad tᶻ)`, their composition laws, factorization of an opaque
//! automorphism as `η∘θ`, and lifts to `HV`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;

use crate::algebra::{bracket, commutator, Element, Symbol, Tag};
use crate::error::{Error, Result};
use crate::foundations::{Character, GroupElement, GroupInstance, Scalar};
use crate::lift::{extend_linear, CentralLift, LiftKind};
use crate::sample::Sampler;

fn d1(s: Symbol) -> Element {
    Element::basis(Tag::D1, s).expect("D1 symbol")
}

fn mono(s: Symbol, c: Scalar) -> Element {
    Element::monomial(Tag::D1, s, c).expect("D1 symbol")
}

fn check_d1(g: &GroupInstance, u: &Element) -> Result<()> {
    if u.tag() != Tag::D1 {
        return Err(Error::TagMismatch {
            expected: Tag::D1,
            found: u.tag(),
        });
    }
    u.check_group(g)
}

/// `θ(L(x)) = ε⁻¹χ(x)L(εx) + (b∂(x) + a)χ(x)I(εx)`, `θ(I(y)) = cχ(y)I(εy)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaAut {
    chi: Character,
    eps: BigRational,
    a: Scalar,
    b: Scalar,
    c: Scalar,
}

impl ThetaAut {
    pub fn new(g: &GroupInstance, chi: Character, eps: Scalar, a: Scalar, b: Scalar, c: Scalar) -> Result<Self> {
        if chi.images().len() != g.rank() {
            return Err(Error::Arity {
                expected: g.rank(),
                found: chi.images().len(),
            });
        }
        if !g.epsilon_in_e(&eps)? {
            return Err(Error::NotInScalingSet(eps.to_string()));
        }
        if c.is_zero() {
            return Err(Error::ZeroScalar("c"));
        }
        let (a, b, c) = (g.field().admit(&a)?, g.field().admit(&b)?, g.field().admit(&c)?);
        let eps = eps.as_rational().expect("checked by epsilon_in_e");
        Ok(ThetaAut { chi, eps, a, b, c })
    }

    pub fn identity(g: &GroupInstance) -> Self {
        ThetaAut {
            chi: Character::trivial(g),
            eps: BigRational::from_integer(1.into()),
            a: Scalar::zero(),
            b: Scalar::zero(),
            c: Scalar::one(),
        }
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    pub fn eps(&self) -> Scalar {
        Scalar::from_rational(self.eps.clone())
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    pub fn is_identity(&self) -> bool {
        self.chi.is_trivial() && self.eps == BigRational::from_integer(1.into()) && self.a.is_zero() && self.b.is_zero() && self.c.is_one()
    }

    fn scale(&self, x: &GroupElement) -> GroupElement {
        x.scale(&self.eps).expect("scaling set preserves the group")
    }

    pub fn on_symbol(&self, g: &GroupInstance, s: &Symbol) -> Element {
        match s {
            Symbol::L(x) => {
                let chi = self.chi.eval(x);
                let lead = &chi / &self.eps();
                let tail = &(&(&self.b * &g.pair(x)) + &self.a) * &chi;
                &mono(Symbol::L(self.scale(x)), lead) + &mono(Symbol::I(self.scale(x)), tail)
            }
            Symbol::I(y) => mono(Symbol::I(self.scale(y)), &self.c * &self.chi.eval(y)),
            _ => Element::zero(Tag::D1),
        }
    }
}

pub fn apply_theta(g: &GroupInstance, theta: &ThetaAut, u: &Element) -> Result<Element> {
    check_d1(g, u)?;
    Ok(extend_linear(Tag::D1, u, |s| theta.on_symbol(g, s)))
}

/// `θ₁∘θ₂ = θ((χ₁∘ε₂)χ₂, ε₁ε₂, ε₂⁻¹a₁ + c₁a₂, b₁ + c₁b₂, c₁c₂)`.
pub fn compose_theta(t1: &ThetaAut, t2: &ThetaAut) -> ThetaAut {
    ThetaAut {
        chi: t1.chi.precompose_scaling(&t2.eps).mul(&t2.chi),
        eps: &t1.eps * &t2.eps,
        a: &(&t1.a / &t2.eps()) + &(&t1.c * &t2.a),
        b: &t1.b + &(&t1.c * &t2.b),
        c: &t1.c * &t2.c,
    }
}

/// `θ⁻¹ = θ(χ⁻¹∘ε⁻¹, ε⁻¹, −εa/c, −b/c, 1/c)`.
pub fn invert_theta(t: &ThetaAut) -> ThetaAut {
    let eps_inv = t.eps.recip();
    let c_inv = t.c.inv().expect("c is nonzero");
    ThetaAut {
        chi: t.chi.inverse().precompose_scaling(&eps_inv),
        eps: eps_inv,
        a: -(&(&t.eps() * &t.a) * &c_inv),
        b: -(&t.b * &c_inv),
        c: c_inv,
    }
}

/// A word `exp(k₁ ad t^{z₁}) ⋯ exp(k_n ad t^{z_n})`. On `D1` each factor acts
/// by `L(y) ↦ L(y) − k∂(z)I(y + z)` and fixes every `I(y)`, so the factors
/// commute.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InnerAut {
    factors: Vec<(Scalar, GroupElement)>,
}

impl InnerAut {
    pub fn new(g: &GroupInstance, factors: Vec<(Scalar, GroupElement)>) -> Result<Self> {
        for (k, z) in &factors {
            g.check(z)?;
            g.field().admit(k)?;
            if z.is_zero() {
                return Err(Error::NotAnAutomorphism(
                    "inner factors need a nonzero degree".into(),
                ));
            }
        }
        Ok(InnerAut::normalized(factors))
    }

    /// Merges factors of equal degree and drops zero ones; the factors
    /// commute, so this does not change the automorphism.
    fn normalized(factors: impl IntoIterator<Item = (Scalar, GroupElement)>) -> Self {
        let mut merged: BTreeMap<GroupElement, Scalar> = BTreeMap::new();
        for (k, z) in factors {
            *merged.entry(z).or_insert_with(Scalar::zero) += &k;
        }
        InnerAut {
            factors: merged.into_iter().filter(|(_, k)| !k.is_zero()).map(|(z, k)| (k, z)).collect(),
        }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn factors(&self) -> &[(Scalar, GroupElement)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn inverse(&self) -> InnerAut {
        InnerAut {
            factors: self.factors.iter().map(|(k, z)| (-k, z.clone())).collect(),
        }
    }

    pub fn then(&self, other: &InnerAut) -> InnerAut {
        InnerAut::normalized(self.factors.iter().chain(&other.factors).cloned())
    }

    pub fn on_symbol(&self, g: &GroupInstance, s: &Symbol) -> Element {
        let mut out = d1(s.clone());
        if let Symbol::L(y) = s {
            for (k, z) in &self.factors {
                out.add_term(Symbol::I(y.add(z)), -(k * &g.pair(z)));
            }
        }
        out
    }
}

pub fn apply_inner(g: &GroupInstance, eta: &InnerAut, u: &Element) -> Result<Element> {
    check_d1(g, u)?;
    Ok(extend_linear(Tag::D1, u, |s| eta.on_symbol(g, s)))
}

/// `η∘θ`: `θ` acts first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutWord {
    pub inner: InnerAut,
    pub theta: ThetaAut,
}

impl AutWord {
    pub fn new(inner: InnerAut, theta: ThetaAut) -> Self {
        AutWord { inner, theta }
    }

    pub fn identity(g: &GroupInstance) -> Self {
        AutWord::new(InnerAut::identity(), ThetaAut::identity(g))
    }

    pub fn on_symbol(&self, g: &GroupInstance, s: &Symbol) -> Element {
        extend_linear(Tag::D1, &self.theta.on_symbol(g, s), |t| self.inner.on_symbol(g, t))
    }

    pub fn apply(&self, g: &GroupInstance, u: &Element) -> Result<Element> {
        check_d1(g, u)?;
        Ok(extend_linear(Tag::D1, u, |s| self.on_symbol(g, s)))
    }

    /// `(η₁θ₁)(η₂θ₂) = η₁(θ₁η₂θ₁⁻¹)θ₁θ₂`, using
    /// `θ exp(k ad tᶻ) θ⁻¹ = exp(k cχ(z) ad t^{εz})`.
    pub fn compose(&self, other: &AutWord) -> AutWord {
        let t1 = &self.theta;
        let moved = InnerAut::normalized(
            other
                .inner
                .factors
                .iter()
                .map(|(k, z)| (&(k * &t1.c) * &t1.chi.eval(z), t1.scale(z))),
        );
        AutWord::new(self.inner.then(&moved), compose_theta(t1, &other.theta))
    }

    pub fn inverse(&self) -> AutWord {
        let unit = ThetaAut::unit_like(&self.theta);
        AutWord::new(InnerAut::identity(), invert_theta(&self.theta)).compose(&AutWord::new(self.inner.inverse(), unit))
    }
}

impl ThetaAut {
    fn unit_like(other: &ThetaAut) -> Self {
        ThetaAut {
            chi: Character::unit(other.chi.images().len()),
            eps: BigRational::from_integer(1.into()),
            a: Scalar::zero(),
            b: Scalar::zero(),
            c: Scalar::one(),
        }
    }
}

/// `π([u, v]) − [π(u), π(v)]`, using the bracket of the operands' algebra.
pub fn homomorphism_defect(
    g: &GroupInstance,
    pi: impl Fn(&Element) -> Result<Element>,
    u: &Element,
    v: &Element,
) -> Result<Element> {
    let lhs = pi(&bracket(g, u, v)?)?;
    let rhs = bracket(g, &pi(u)?, &pi(v)?)?;
    Ok(&lhs - &rhs)
}

/// Factors an automorphism given by its images of basis symbols as `η∘θ`
/// and checks the factorization on every probe generator.
pub fn factor_automorphism(
    g: &GroupInstance,
    pi: impl Fn(&Symbol) -> Element,
    probes: &[GroupElement],
) -> Result<AutWord> {
    let zero = g.zero();
    let p0 = pi(&Symbol::L(zero.clone()));
    if p0.tag() != Tag::D1 {
        return Err(Error::TagMismatch {
            expected: Tag::D1,
            found: p0.tag(),
        });
    }
    if let Some((s, _)) = p0.terms().find(|(s, _)| matches!(s, Symbol::L(z) if !z.is_zero())) {
        return Err(Error::NotAnAutomorphism(format!(
            "image of L(0) has a term {s} of nonzero degree"
        )));
    }
    let lambda0 = p0.coeff(&Symbol::L(zero.clone()));
    let eps = lambda0
        .inv()
        .ok_or_else(|| Error::NotAnAutomorphism("image of L(0) has no L(0) term".into()))?;
    if !g.epsilon_in_e(&eps)? {
        return Err(Error::NotInScalingSet(eps.to_string()));
    }
    let eps_q = eps.as_rational().expect("checked by epsilon_in_e");

    let mut factors = Vec::new();
    for (s, gamma) in p0.terms() {
        if let Symbol::I(w) = s {
            if !w.is_zero() {
                factors.push((-(&(&eps * gamma) / &g.pair(w)), w.clone()));
            }
        }
    }
    let eta = InnerAut::new(g, factors)?;
    let eta_inv = eta.inverse();
    let rest = |s: Symbol| extend_linear(Tag::D1, &pi(&s), |t| eta_inv.on_symbol(g, t));
    let scaled = |x: &GroupElement| x.scale(&eps_q).expect("scaling set preserves the group");

    let chi_images = g
        .generators()
        .iter()
        .map(|e| &eps * &rest(Symbol::L(e.clone())).coeff(&Symbol::L(scaled(e))))
        .collect::<Vec<_>>();
    let chi = match Character::new(g, chi_images) {
        Ok(chi) => chi,
        Err(e) => return Err(Error::NotAnAutomorphism(format!("no character fits the L-images: {e}"))),
    };
    let c = rest(Symbol::I(zero.clone())).coeff(&Symbol::I(zero));
    let x0 = g.base_point();
    let f = |x: &GroupElement| {
        &rest(Symbol::L(x.clone())).coeff(&Symbol::I(scaled(x))) / &chi.eval(x)
    };
    let (f1, f2) = (f(&x0), f(&x0.scale_int(2)));
    let b = (&f2 - &f1).checked_div(&g.pair(&x0)).ok_or(Error::SingularProbe)?;
    let a = &(&f1 * &Scalar::from_int(2)) - &f2;
    let theta = ThetaAut::new(g, chi, eps, a, b, c).map_err(|e| Error::NotAnAutomorphism(e.to_string()))?;
    let word = AutWord::new(eta, theta);

    for p in probes {
        g.check(p)?;
        for s in [Symbol::L(p.clone()), Symbol::I(p.clone())] {
            let (got, want) = (pi(&s), word.on_symbol(g, &s));
            if got != want {
                return Err(Error::NotAnAutomorphism(format!(
                    "image of {s} is {got} but the factorization predicts {want}"
                )));
            }
        }
    }
    Ok(word)
}

/// Lifts `η∘θ` to an automorphism of `HV`.
pub fn lift_automorphism_to_hv(g: &GroupInstance, word: &AutWord, check_seed: Option<u64>) -> Result<CentralLift> {
    let (g2, w2) = (g.clone(), word.clone());
    CentralLift::new(
        g,
        LiftKind::Automorphism,
        Arc::new(move |u: &Element| extend_linear(Tag::D1, u, |s| w2.on_symbol(&g2, s))),
        check_seed,
    )
}

/// `ad(tᶻ)²` applied to `u`.
pub fn ad_squared(g: &GroupInstance, z: &GroupElement, u: &Element) -> Result<Element> {
    let t = d1(Symbol::I(z.clone()));
    commutator(g, &t, &commutator(g, &t, u)?)
}

/// A random `θ`; characters are drawn from small rationals so that powers
/// stay cheap.
pub fn random_theta(s: &mut Sampler, g: &GroupInstance) -> ThetaAut {
    ThetaAut::new(
        g,
        s.character(g),
        s.scaling(g),
        s.field_scalar(g),
        s.field_scalar(g),
        s.nonzero_field_scalar(g),
    )
    .expect("sampled parameters are valid")
}

pub fn random_inner(s: &mut Sampler, g: &GroupInstance, max_factors: usize) -> InnerAut {
    let n = s.rng().gen_range(0..=max_factors);
    let factors = (0..n)
        .map(|_| (s.coefficient(), s.nonzero_group_element(g)))
        .collect();
    InnerAut::new(g, factors).expect("sampled factors are valid")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLawCheck {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
    pub witness: Option<String>,
}

impl GroupLawCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLawReport {
    pub checks: Vec<GroupLawCheck>,
}

impl GroupLawReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(GroupLawCheck::passed)
    }
}

fn slice_n(g: &GroupInstance, chi: Character) -> ThetaAut {
    ThetaAut { chi, ..ThetaAut::identity(g) }
}

fn in_nac(t: &ThetaAut) -> bool {
    t.eps == BigRational::from_integer(1.into())
}

/// Checks the subgroup structure of the `θ` family on `samples` draws per
/// check: `N = {θ(χ,1,0,0,1)}` closed and normal, `𝔞 = {θ(1,1,a,b,1)}`
/// additive and abelian, `𝔠 = {θ(1,1,0,0,c)}` multiplicative, `N𝔞𝔠`
/// stable under conjugation by `θ(1,ε,0,0,1)`, and `θ ↦ ε` multiplicative.
pub fn verify_group_laws(g: &GroupInstance, samples: usize, seed: u64) -> GroupLawReport {
    let mut s = Sampler::stream(seed, 0x6A0);
    let mut checks = Vec::new();
    let mut run = |name: &'static str, s: &mut Sampler, law: &mut dyn FnMut(&mut Sampler) -> Option<String>| {
        let mut check = GroupLawCheck {
            name,
            samples,
            failures: 0,
            witness: None,
        };
        for _ in 0..samples {
            if let Some(w) = law(s) {
                check.failures += 1;
                check.witness.get_or_insert(w);
            }
        }
        checks.push(check);
    };

    run("normal-subgroup-N", &mut s, &mut |s| {
        let (n1, n2) = (slice_n(g, s.character(g)), slice_n(g, s.character(g)));
        let prod = compose_theta(&n1, &n2);
        let t = random_theta(s, g);
        let conj = compose_theta(&compose_theta(&t, &n1), &invert_theta(&t));
        let closed = prod == slice_n(g, n1.chi.mul(&n2.chi));
        let normal = conj.a.is_zero() && conj.b.is_zero() && conj.c.is_one() && in_nac(&conj);
        (!(closed && normal)).then(|| format!("N = {n1:?}, {n2:?}; conjugator {t:?}"))
    });

    run("additive-subgroup-a", &mut s, &mut |s| {
        let mk = |a: Scalar, b: Scalar| ThetaAut { a, b, ..ThetaAut::identity(g) };
        let (a1, b1, a2, b2) = (s.field_scalar(g), s.field_scalar(g), s.field_scalar(g), s.field_scalar(g));
        let (t1, t2) = (mk(a1.clone(), b1.clone()), mk(a2.clone(), b2.clone()));
        let ok = compose_theta(&t1, &t2) == mk(&a1 + &a2, &b1 + &b2) && compose_theta(&t1, &t2) == compose_theta(&t2, &t1);
        (!ok).then(|| format!("a-slice: {t1:?}, {t2:?}"))
    });

    run("multiplicative-subgroup-c", &mut s, &mut |s| {
        let mk = |c: Scalar| ThetaAut { c, ..ThetaAut::identity(g) };
        let (c1, c2) = (s.nonzero_field_scalar(g), s.nonzero_field_scalar(g));
        let ok = compose_theta(&mk(c1.clone()), &mk(c2.clone())) == mk(&c1 * &c2);
        (!ok).then(|| format!("c-slice: {c1}, {c2}"))
    });

    run("nac-normal-under-eps", &mut s, &mut |s| {
        let mut t = random_theta(s, g);
        t.eps = BigRational::from_integer(1.into());
        let e = ThetaAut { eps: s.scaling(g).as_rational().expect("rational"), ..ThetaAut::identity(g) };
        let conj = compose_theta(&compose_theta(&e, &t), &invert_theta(&e));
        (!in_nac(&conj)).then(|| format!("{t:?} conjugated by {e:?} gives {conj:?}"))
    });

    run("eps-projection-homomorphism", &mut s, &mut |s| {
        let (t1, t2) = (random_theta(s, g), random_theta(s, g));
        let ok = compose_theta(&t1, &t2).eps == &t1.eps * &t2.eps;
        (!ok).then(|| format!("{t1:?}, {t2:?}"))
    });

    GroupLawReport { checks }
}
