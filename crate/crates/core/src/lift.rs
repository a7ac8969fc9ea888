//! Extension of derivations and automorphisms of `D1` to `HV`.
//!
//! For a map `f` on `D1` and each central generator `C_k` with cocycle `ω_k`,
//! the pulled-back form `P_k` is `ω_k(fu, v) + ω_k(u, fv)` for derivations and
//! `ω_k(fu, fv)` for automorphisms. Writing `[P_k] = Σ_j M_{jk} [ω_j]` fixes
//! the images `C_j ↦ Σ_k M_{jk} C_k`, and the coboundary left over,
//! `P_k − Σ_j M_{jk} ω_j = φ_k([·,·])`, fixes the central correction `φ_k`
//! added to `f` on `L(x)` and `I(x)`. `D1` is perfect, so `φ_k` is determined
//! by its values on brackets.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::algebra::{Element, Symbol, Tag};
use crate::cohomology::{extract_class, hv_central_cocycles, verify_cocycle, Cocycle};
use crate::error::{Error, Result};
use crate::foundations::{GroupInstance, Scalar};

/// The central generators in the order used by [`Element::central_part`].
pub const CENTRAL: [Symbol; 3] = [Symbol::CL, Symbol::CI, Symbol::CLI];

/// Samples used to check that each pulled-back form is a cocycle.
pub const PULLBACK_SAMPLES: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftKind {
    Derivation,
    Automorphism,
}

pub type LinearMap = Arc<dyn Fn(&Element) -> Element + Send + Sync>;

/// Extends a map on basis symbols linearly.
pub(crate) fn extend_linear(tag: Tag, u: &Element, f: impl Fn(&Symbol) -> Element) -> Element {
    let mut out = Element::zero(tag);
    for (s, c) in u.terms() {
        out = &out + &f(s).scale(c);
    }
    out
}

#[derive(Clone)]
pub struct CentralLift {
    group: GroupInstance,
    kind: LiftKind,
    map: LinearMap,
    cocycles: [Cocycle; 3],
    /// `matrix[j][k]` is the coefficient of `C_k` in the image of `C_j`.
    matrix: [[Scalar; 3]; 3],
    memo: Arc<Mutex<HashMap<Symbol, Element>>>,
}

impl fmt::Debug for CentralLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CentralLift")
            .field("kind", &self.kind)
            .field("matrix", &self.matrix)
            .finish_non_exhaustive()
    }
}

fn d1(s: Symbol) -> Element {
    Element::basis(Tag::D1, s).expect("D1 symbol")
}

impl CentralLift {
    /// Builds the lift of `map` (a `D1 → D1` linear map). With `check` set to
    /// `Some(seed)`, each pulled-back form is first verified to be a cocycle.
    pub fn new(g: &GroupInstance, kind: LiftKind, map: LinearMap, check: Option<u64>) -> Result<Self> {
        let mut lift = CentralLift {
            group: g.clone(),
            kind,
            map,
            cocycles: hv_central_cocycles(),
            matrix: Default::default(),
            memo: Default::default(),
        };
        for k in 0..3 {
            if let Some(seed) = check {
                let report = verify_cocycle(g, |u, v| lift.pullback(k, u, v), PULLBACK_SAMPLES, seed, Tag::D1)?;
                if let Some(w) = report.witness {
                    return Err(Error::PullbackNotCocycle(format!(
                        "pullback onto {} fails {:?} at ({}, {}, {}) with defect {}",
                        CENTRAL[k], w.check, w.u, w.v, w.w, w.defect
                    )));
                }
            }
            let class = extract_class(g, |u, v| lift.pullback(k, u, v))?;
            lift.matrix[0][k] = &class.b * &Scalar::from_int(12);
            lift.matrix[1][k] = class.a;
            lift.matrix[2][k] = class.c;
        }
        Ok(lift)
    }

    pub fn kind(&self) -> LiftKind {
        self.kind
    }

    pub fn matrix(&self) -> &[[Scalar; 3]; 3] {
        &self.matrix
    }

    /// The underlying map on `D1`.
    pub fn base(&self, u: &Element) -> Element {
        (self.map)(u)
    }

    fn pullback(&self, k: usize, u: &Element, v: &Element) -> Scalar {
        let w = &self.cocycles[k];
        match self.kind {
            LiftKind::Derivation => &w.eval(&self.group, &(self.map)(u), v) + &w.eval(&self.group, u, &(self.map)(v)),
            LiftKind::Automorphism => w.eval(&self.group, &(self.map)(u), &(self.map)(v)),
        }
    }

    /// `P_k − Σ_j M_{jk} ω_j`, a coboundary.
    fn residual(&self, k: usize, u: &Element, v: &Element) -> Scalar {
        let mut r = self.pullback(k, u, v);
        for j in 0..3 {
            if !self.matrix[j][k].is_zero() {
                r -= &(&self.matrix[j][k] * &self.cocycles[j].eval(&self.group, u, v));
            }
        }
        r
    }

    /// The central correction `φ_k(s)` for a non-central symbol.
    pub fn correction(&self, s: &Symbol) -> [Scalar; 3] {
        let g = &self.group;
        let x0 = g.base_point();
        let d = g.pair(&x0);
        let (u, v, scale) = match s {
            Symbol::L(x) if x.is_zero() => (
                d1(Symbol::L(x0.neg())),
                d1(Symbol::L(x0.clone())),
                &d * &Scalar::from_int(2),
            ),
            Symbol::L(x) => (d1(Symbol::L(g.zero())), d1(s.clone()), g.pair(x)),
            Symbol::I(x) if x.is_zero() => (d1(Symbol::L(x0.neg())), d1(Symbol::I(x0.clone())), d),
            Symbol::I(x) => (d1(Symbol::L(g.zero())), d1(s.clone()), g.pair(x)),
            _ => return Default::default(),
        };
        std::array::from_fn(|k| self.residual(k, &u, &v) / scale.clone())
    }

    pub fn central_image(&self, j: usize) -> Element {
        Element::from_terms(
            Tag::HV,
            CENTRAL.iter().cloned().zip(self.matrix[j].iter().cloned()),
        )
        .expect("central symbols")
    }

    /// The lifted map on a basis symbol of `HV`.
    pub fn apply_symbol(&self, s: &Symbol) -> Element {
        if let Some(j) = CENTRAL.iter().position(|c| c == s) {
            return self.central_image(j);
        }
        if let Some(hit) = self.memo.lock().expect("memo lock").get(s) {
            return hit.clone();
        }
        let mut out = (self.map)(&d1(s.clone())).to_hv().expect("D1 embeds in HV");
        for (k, phi) in self.correction(s).into_iter().enumerate() {
            out.add_term(CENTRAL[k].clone(), phi);
        }
        self.memo.lock().expect("memo lock").insert(s.clone(), out.clone());
        out
    }

    pub fn apply(&self, u: &Element) -> Result<Element> {
        if u.tag() != Tag::HV {
            return Err(Error::TagMismatch {
                expected: Tag::HV,
                found: u.tag(),
            });
        }
        u.check_group(&self.group)?;
        Ok(extend_linear(Tag::HV, u, |s| self.apply_symbol(s)))
    }
}
