//! 2-cocycles on `D1`: the canonical cocycles, coboundaries, verification of
//! the cocycle identity, extraction of cohomology classes from probe values,
//! and exact linear-system oracles for the functional equations that pin the
//! classes down.

use std::collections::BTreeMap;

use crate::algebra::{commutator, Element, Symbol, Tag};
use crate::error::{Error, Result};
use crate::foundations::{linalg, GroupElement, GroupInstance, GroupKind, Scalar};
use crate::sample::Sampler;
use rand::Rng;

/// Which pair of basis families a diagonal form is supported on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// `(L(x), L(y))`
    LL,
    /// `(L(x), I(y))`, extended antisymmetrically to `(I(y), L(x))`.
    LI,
    /// `(I(x), I(y))`
    II,
}

/// The bilinear form `(s, t) ↦ δ_{x+y,0} p(∂(x))` on one pair family, where
/// `x` is the degree of the first argument (of the `L` argument for mixed
/// pairs) and `p` is a polynomial given by its coefficients, lowest first.
///
/// Antisymmetry on `LL` and `II` pairs holds exactly when `p` is odd; this is
/// not enforced, so corrupted forms can be fed to [`verify_cocycle`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalForm {
    pub kind: PairKind,
    pub poly: Vec<Scalar>,
}

impl DiagonalForm {
    pub fn new(kind: PairKind, poly: Vec<Scalar>) -> Self {
        DiagonalForm { kind, poly }
    }

    fn from_ints(kind: PairKind, poly: &[i64]) -> Self {
        Self::new(kind, poly.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    /// `ψ₁(tˣ, tʸ) = δ_{x+y,0} ∂(y) = −δ_{x+y,0} ∂(x)`.
    pub fn psi1() -> Self {
        Self::from_ints(PairKind::II, &[0, -1])
    }

    /// `ψ₂(tˣ∂, tʸ∂) = δ_{x+y,0} (∂(x)³ − ∂(x))`.
    pub fn psi2() -> Self {
        Self::from_ints(PairKind::LL, &[0, -1, 0, 1])
    }

    /// `ψ₃(tˣ∂, tʸ) = δ_{x+y,0} ∂(x)²`.
    pub fn psi3() -> Self {
        Self::from_ints(PairKind::LI, &[0, 0, 1])
    }

    /// `ψ₃′(tˣ∂, tʸ) = δ_{x+y,0} ∂(x)`, a coboundary.
    pub fn psi3_prime() -> Self {
        Self::from_ints(PairKind::LI, &[0, 1])
    }

    /// The Witt cocycle `ψ(tˣ∂, tʸ∂) = δ_{x+y,0} ∂(x)³`.
    pub fn witt() -> Self {
        Self::from_ints(PairKind::LL, &[0, 0, 0, 1])
    }

    fn poly_at(&self, t: &Scalar) -> Scalar {
        self.poly
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * t) + c)
    }

    pub fn eval_symbols(&self, g: &GroupInstance, s: &Symbol, t: &Symbol) -> Scalar {
        let (x, y, sign) = match (self.kind, s, t) {
            (PairKind::LL, Symbol::L(x), Symbol::L(y)) => (x, y, 1),
            (PairKind::II, Symbol::I(x), Symbol::I(y)) => (x, y, 1),
            (PairKind::LI, Symbol::L(x), Symbol::I(y)) => (x, y, 1),
            (PairKind::LI, Symbol::I(y), Symbol::L(x)) => (x, y, -1),
            _ => return Scalar::zero(),
        };
        if !x.add(y).is_zero() {
            return Scalar::zero();
        }
        let v = self.poly_at(&g.pair(x));
        if sign < 0 {
            -v
        } else {
            v
        }
    }

    pub fn eval(&self, g: &GroupInstance, u: &Element, v: &Element) -> Scalar {
        bilinear(u, v, |s, t| self.eval_symbols(g, s, t))
    }
}

fn bilinear(u: &Element, v: &Element, mut f: impl FnMut(&Symbol, &Symbol) -> Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for (s, a) in u.terms() {
        for (t, b) in v.terms() {
            let val = f(s, t);
            if !val.is_zero() {
                acc += &(&(a * b) * &val);
            }
        }
    }
    acc
}

/// A finitely supported linear functional on `D1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearFunctional {
    values: BTreeMap<Symbol, Scalar>,
}

impl LinearFunctional {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn set(&mut self, s: Symbol, value: Scalar) -> Result<()> {
        if !Tag::D1.admits(&s) {
            return Err(Error::Inadmissible {
                symbol: s.to_string(),
                tag: Tag::D1,
            });
        }
        if value.is_zero() {
            self.values.remove(&s);
        } else {
            self.values.insert(s, value);
        }
        Ok(())
    }

    pub fn with(mut self, s: Symbol, value: Scalar) -> Result<Self> {
        self.set(s, value)?;
        Ok(self)
    }

    pub fn value(&self, s: &Symbol) -> Scalar {
        self.values.get(s).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn values(&self) -> impl Iterator<Item = (&Symbol, &Scalar)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eval(&self, u: &Element) -> Scalar {
        u.terms()
            .filter_map(|(s, c)| self.values.get(s).map(|v| c * v))
            .sum()
    }
}

/// A random functional supported on up to four `D1` symbols.
pub fn random_functional(s: &mut Sampler, g: &GroupInstance) -> LinearFunctional {
    let mut f = LinearFunctional::zero();
    let n = s.rng().gen_range(1..=4);
    for _ in 0..n {
        let sym = s.symbol(g, Tag::D1);
        let c = s.field_scalar(g);
        f.set(sym, c).expect("D1 symbol");
    }
    f
}

/// `a·ψ₁ + b·ψ₂ + c·ψ₃ + c′·ψ₃′ + ψ_g` with `ψ_g(u, v) = g([u, v])`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cocycle {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub cprime: Scalar,
    pub boundary: LinearFunctional,
}

impl Cocycle {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn combination(a: Scalar, b: Scalar, c: Scalar) -> Self {
        Cocycle {
            a,
            b,
            c,
            ..Self::default()
        }
    }

    pub fn psi1() -> Self {
        Self::combination(Scalar::one(), Scalar::zero(), Scalar::zero())
    }

    pub fn psi2() -> Self {
        Self::combination(Scalar::zero(), Scalar::one(), Scalar::zero())
    }

    pub fn psi3() -> Self {
        Self::combination(Scalar::zero(), Scalar::zero(), Scalar::one())
    }

    pub fn psi3_prime() -> Self {
        Cocycle {
            cprime: Scalar::one(),
            ..Self::default()
        }
    }

    pub fn with_boundary(mut self, g: LinearFunctional) -> Self {
        self.boundary = g;
        self
    }

    pub fn eval(&self, g: &GroupInstance, u: &Element, v: &Element) -> Scalar {
        let mut acc = Scalar::zero();
        for (k, form) in [
            (&self.a, DiagonalForm::psi1()),
            (&self.b, DiagonalForm::psi2()),
            (&self.c, DiagonalForm::psi3()),
            (&self.cprime, DiagonalForm::psi3_prime()),
        ] {
            if !k.is_zero() {
                acc += &(k * &form.eval(g, u, v));
            }
        }
        if !self.boundary.is_zero() {
            let uv = commutator(g, u, v).expect("cocycles are evaluated on D1");
            acc += &self.boundary.eval(&uv);
        }
        acc
    }
}

/// The cocycles whose values give the central terms of the `HV` bracket, in
/// the order `C_L`, `C_I`, `C_LI`: `ψ₂/12`, `ψ₁`, `ψ₃ − ψ₃′`.
pub fn hv_central_cocycles() -> [Cocycle; 3] {
    [
        Cocycle::combination(Scalar::zero(), Scalar::from_ratio(1, 12), Scalar::zero()),
        Cocycle::psi1(),
        Cocycle {
            c: Scalar::one(),
            cprime: -Scalar::one(),
            ..Cocycle::default()
        },
    ]
}

/// Spec-level evaluation: checks the operands then evaluates `α(u, v)`.
pub fn cocycle_eval(g: &GroupInstance, alpha: &Cocycle, u: &Element, v: &Element) -> Result<Scalar> {
    for e in [u, v] {
        if e.tag() != Tag::D1 {
            return Err(Error::TagMismatch {
                expected: Tag::D1,
                found: e.tag(),
            });
        }
        e.check_group(g)?;
    }
    Ok(alpha.eval(g, u, v))
}

/// `ψ_g(u, v) = g([u, v])`.
pub fn coboundary(g: LinearFunctional) -> Cocycle {
    Cocycle::zero().with_boundary(g)
}

/// Coordinates of a class in the basis `[ψ₁], [ψ₂], [ψ₃]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl CohomologyClass {
    pub fn zero() -> Self {
        CohomologyClass {
            a: Scalar::zero(),
            b: Scalar::zero(),
            c: Scalar::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CocycleCheck {
    Antisymmetry,
    CocycleIdentity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleWitness {
    pub check: CocycleCheck,
    pub u: Element,
    pub v: Element,
    pub w: Element,
    pub defect: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleReport {
    pub samples: usize,
    pub failures: usize,
    pub witness: Option<CocycleWitness>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks antisymmetry and the 2-cocycle identity on `samples` random triples
/// of `D1` elements. With `domain = Tag::W` the triples are drawn from the
/// Witt subalgebra.
pub fn verify_cocycle(
    g: &GroupInstance,
    form: impl Fn(&Element, &Element) -> Scalar,
    samples: usize,
    seed: u64,
    domain: Tag,
) -> Result<CocycleReport> {
    verify_cocycle_with(g, form, samples, &mut Sampler::stream(seed, 0xC0C7), domain)
}

/// [`verify_cocycle`] drawing from a caller-supplied sampler.
pub fn verify_cocycle_with(
    g: &GroupInstance,
    form: impl Fn(&Element, &Element) -> Scalar,
    samples: usize,
    sampler: &mut Sampler,
    domain: Tag,
) -> Result<CocycleReport> {
    let mut report = CocycleReport {
        samples,
        failures: 0,
        witness: None,
    };
    for _ in 0..samples {
        let mut draw = || -> Result<Element> {
            match domain {
                Tag::W => sampler.element(g, Tag::W).to_d1(),
                _ => Ok(sampler.element(g, Tag::D1)),
            }
        };
        let (u, v, w) = (draw()?, draw()?, draw()?);
        let anti = &form(&u, &v) + &form(&v, &u);
        let identity = &(&form(&commutator(g, &u, &v)?, &w) + &form(&commutator(g, &v, &w)?, &u))
            + &form(&commutator(g, &w, &u)?, &v);
        for (check, defect) in [
            (CocycleCheck::Antisymmetry, anti),
            (CocycleCheck::CocycleIdentity, identity),
        ] {
            if !defect.is_zero() {
                report.failures += 1;
                if report.witness.is_none() {
                    report.witness = Some(CocycleWitness {
                        check,
                        u: u.clone(),
                        v: v.clone(),
                        w: w.clone(),
                        defect,
                    });
                }
            }
        }
    }
    Ok(report)
}

fn d1(s: Symbol) -> Element {
    Element::basis(Tag::D1, s).expect("D1 symbol")
}

/// Reads off the class of a cocycle from finitely many probe values.
///
/// With `x₀` the base point and `d = ∂(x₀)`:
/// * `a` from `α(I(x₀), I(−x₀)) = −a·d`, since coboundaries vanish on `I`–`I` pairs;
/// * `b` from the cubic coefficient of `k ↦ α(L(kx₀), L(−kx₀))`, `k = 1, 2, 3`;
/// * `c` from the quadratic coefficient of `k ↦ α(L(kx₀), I(−kx₀))`, `k = 1, 2`.
///
/// Coboundaries contribute only terms linear in `k` to the last two probes.
/// The caller is responsible for `form` being a cocycle.
pub fn extract_class(g: &GroupInstance, form: impl Fn(&Element, &Element) -> Scalar) -> Result<CohomologyClass> {
    let x0 = g.base_point();
    let d = g.pair(&x0);
    let at = |k: i64| x0.scale_int(k);

    let a = form(&d1(Symbol::I(x0.clone())), &d1(Symbol::I(x0.neg())))
        .checked_div(&-&d)
        .ok_or(Error::SingularProbe)?;

    let cubic_rows: Vec<Vec<Scalar>> = (1..=3)
        .map(|k| (1..=3).rev().map(|p| Scalar::from_int(k).pow(p).expect("k > 0")).collect())
        .collect();
    let cubic_vals: Vec<Scalar> = (1..=3)
        .map(|k| form(&d1(Symbol::L(at(k))), &d1(Symbol::L(at(-k)))))
        .collect();
    let cubic = linalg::solve(&cubic_rows, &cubic_vals).ok_or(Error::SingularProbe)?;
    let b = cubic[0]
        .checked_div(&d.pow(3).expect("nonzero"))
        .ok_or(Error::SingularProbe)?;

    let quad_rows: Vec<Vec<Scalar>> = (1..=2)
        .map(|k| vec![Scalar::from_int(k * k), Scalar::from_int(k)])
        .collect();
    let quad_vals: Vec<Scalar> = (1..=2)
        .map(|k| form(&d1(Symbol::L(at(k))), &d1(Symbol::I(at(-k)))))
        .collect();
    let quad = linalg::solve(&quad_rows, &quad_vals).ok_or(Error::SingularProbe)?;
    let c = quad[0]
        .checked_div(&(&d * &d))
        .ok_or(Error::SingularProbe)?;

    Ok(CohomologyClass { a, b, c })
}

/// Result of a functional-equation oracle over the window `-N..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalEquationSolution {
    pub window: i64,
    pub equations: usize,
    pub dimension: usize,
    /// Solution-space basis as value tables indexed `-N..=N`; when the space
    /// is two-dimensional it is normalized against the expected closed forms.
    pub basis: Vec<Vec<Scalar>>,
    /// True when the normalized basis equals the expected closed forms exactly.
    pub matches_closed_form: bool,
}

/// Residual of `(k − l) f(k + l) = (k + l)(f(k) − f(l))`.
pub fn cubic_fe_residual(f: impl Fn(i64) -> Scalar, k: i64, l: i64) -> Scalar {
    &(&Scalar::from_int(k - l) * &f(k + l)) - &(&Scalar::from_int(k + l) * &(&f(k) - &f(l)))
}

/// Residual of `∂(y − x) f(x + y) = ∂(y) f(y) − ∂(x) f(x)` on integer multiples
/// of the base point.
pub fn linear_fe_residual(g: &GroupInstance, f: impl Fn(i64) -> Scalar, x: i64, y: i64) -> Scalar {
    let p = |k: i64| g.pair(&g.base_point().scale_int(k));
    &(&p(y - x) * &f(x + y)) - &(&(&p(y) * &f(y)) - &(&p(x) * &f(x)))
}

fn window_system(n: i64, row: impl Fn(i64, i64) -> Vec<(i64, Scalar)>) -> (Vec<Vec<Scalar>>, usize) {
    let width = (2 * n + 1) as usize;
    let idx = |k: i64| (k + n) as usize;
    let mut rows = Vec::new();
    for k in -n..=n {
        for l in -n..=n {
            if (k + l).abs() > n {
                continue;
            }
            let mut r = vec![Scalar::zero(); width];
            for (pos, coeff) in row(k, l) {
                r[idx(pos)] += &coeff;
            }
            if r.iter().any(|c| !c.is_zero()) {
                rows.push(r);
            }
        }
    }
    (rows, width)
}

/// Re-expresses a two-dimensional basis so that its values at the given
/// positions match `targets` (one column per expected function).
fn normalize_pair(basis: &[Vec<Scalar>], positions: [usize; 2], targets: [[Scalar; 2]; 2]) -> Option<Vec<Vec<Scalar>>> {
    let m: Vec<Vec<Scalar>> = positions
        .iter()
        .map(|&p| vec![basis[0][p].clone(), basis[1][p].clone()])
        .collect();
    let mut out = Vec::new();
    for target in targets {
        let coeffs = linalg::solve(&m, &target)?;
        out.push(
            (0..basis[0].len())
                .map(|i| &(&coeffs[0] * &basis[0][i]) + &(&coeffs[1] * &basis[1][i]))
                .collect(),
        );
    }
    Some(out)
}

fn finish(
    n: i64,
    rows: Vec<Vec<Scalar>>,
    width: usize,
    positions: [i64; 2],
    expected: [&dyn Fn(i64) -> Scalar; 2],
) -> FunctionalEquationSolution {
    let raw = linalg::null_space(&rows, width);
    let dimension = raw.len();
    let idx = |k: i64| (k + n) as usize;
    let normalized = (dimension == 2)
        .then(|| {
            let targets = expected.map(|f| [f(positions[0]), f(positions[1])]);
            normalize_pair(&raw, positions.map(idx), targets)
        })
        .flatten();
    let matches_closed_form = normalized.as_ref().is_some_and(|basis| {
        basis
            .iter()
            .zip(expected)
            .all(|(vals, f)| (-n..=n).all(|k| vals[idx(k)] == f(k)))
    });
    FunctionalEquationSolution {
        window: n,
        equations: rows.len(),
        dimension,
        basis: normalized.unwrap_or(raw),
        matches_closed_form,
    }
}

/// Solves `(k − l) f(k + l) = (k + l)(f(k) − f(l))` over `f(−N), …, f(N)` for
/// every `k, l` with `k, l, k + l` in the window. The expected solution space
/// is `span{k, k²}`.
pub fn solve_cubic_fe(n: i64) -> Result<FunctionalEquationSolution> {
    if n < 3 {
        return Err(Error::Config(format!("window {n} is below the minimum of 3")));
    }
    let (rows, width) = window_system(n, |k, l| {
        vec![
            (k + l, Scalar::from_int(k - l)),
            (k, Scalar::from_int(-(k + l))),
            (l, Scalar::from_int(k + l)),
        ]
    });
    Ok(finish(
        n,
        rows,
        width,
        [1, 2],
        [&|k| Scalar::from_int(k), &|k| Scalar::from_int(k * k)],
    ))
}

/// Solves `∂(y − x) f(x + y) = ∂(y) f(y) − ∂(x) f(x)` over `f(−N), …, f(N)`
/// on a `Z` instance. The expected solution space is `span{∂(x), 1}`.
pub fn solve_linear_fe(n: i64, g: &GroupInstance) -> Result<FunctionalEquationSolution> {
    if n < 3 {
        return Err(Error::Config(format!("window {n} is below the minimum of 3")));
    }
    if g.kind() != GroupKind::Z {
        return Err(Error::Config("the linear functional-equation oracle runs on Z".into()));
    }
    let p = |k: i64| g.pair(&GroupElement::int(k));
    let (rows, width) = window_system(n, |x, y| vec![(x + y, p(y - x)), (y, -p(y)), (x, p(x))]);
    Ok(finish(n, rows, width, [0, 1], [&|k| p(k), &|_| Scalar::one()]))
}
