use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::element::{expect_tag, Element, Symbol, Tag};
use crate::error::{Error, Result};
use crate::foundations::{GroupElement, GroupInstance, Scalar};

/// Default cap on the power of `∂` in products of differential operators.
pub const DEFAULT_ORDER_CAP: u32 = 16;

fn check_pair(g: &GroupInstance, u: &Element, v: &Element, tag: Tag) -> Result<()> {
    expect_tag(u, tag)?;
    expect_tag(v, tag)?;
    u.check_group(g)?;
    v.check_group(g)
}

/// `[tˣ∂, tʸ∂] = ∂(y − x) t^{x+y}∂`, extended bilinearly.
pub fn witt_bracket(g: &GroupInstance, u: &Element, v: &Element) -> Result<Element> {
    check_pair(g, u, v, Tag::W)?;
    let mut out = Element::zero(Tag::W);
    for (s, a) in u.terms() {
        let x = s.degree().expect("W symbols are graded");
        for (t, b) in v.terms() {
            let y = t.degree().expect("W symbols are graded");
            let c = g.pair(&y.sub(x));
            out.add_term(Symbol::L(x.add(y)), &(a * b) * &c);
        }
    }
    Ok(out)
}

fn binomial(m: u32, i: u32) -> Scalar {
    let mut acc = BigInt::from(1);
    for k in 0..i {
        acc = acc * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    Scalar::Rational(BigRational::from_integer(acc))
}

/// Product in the associative algebra `D` with the default order cap.
pub fn diffop_product(g: &GroupInstance, u: &Element, v: &Element) -> Result<Element> {
    diffop_product_capped(g, u, v, DEFAULT_ORDER_CAP)
}

/// `(tˣ∂ᵐ)(tʸ∂ⁿ) = t^{x+y} Σ_{i=0}^{m} C(m,i) ∂(y)ⁱ ∂^{m+n−i}`, extended bilinearly.
/// Products whose order would exceed `cap` are rejected.
pub fn diffop_product_capped(g: &GroupInstance, u: &Element, v: &Element, cap: u32) -> Result<Element> {
    check_pair(g, u, v, Tag::D)?;
    let mut out = Element::zero(Tag::D);
    for (s, a) in u.terms() {
        let (Symbol::D(x, m), a) = (s, a) else {
            unreachable!("D holds only D symbols")
        };
        for (t, b) in v.terms() {
            let Symbol::D(y, n) = t else {
                unreachable!("D holds only D symbols")
            };
            if m + n > cap {
                return Err(Error::OrderCap { order: m + n, cap });
            }
            let ab = a * b;
            let dy = g.pair(y);
            let xy = x.add(y);
            let mut dy_pow = Scalar::one();
            for i in 0..=*m {
                out.add_term(
                    Symbol::D(xy.clone(), m + n - i),
                    &(&ab * &binomial(*m, i)) * &dy_pow,
                );
                dy_pow = &dy_pow * &dy;
            }
        }
    }
    Ok(out)
}

/// `uv − vu` in `D`, or in `D1` through its embedding into `D`.
pub fn commutator(g: &GroupInstance, u: &Element, v: &Element) -> Result<Element> {
    let tag = u.tag();
    if !matches!(tag, Tag::D | Tag::D1) {
        return Err(Error::TagMismatch {
            expected: Tag::D,
            found: tag,
        });
    }
    check_pair(g, u, v, tag)?;
    let (du, dv) = match tag {
        Tag::D1 => (u.to_d()?, v.to_d()?),
        _ => (u.clone(), v.clone()),
    };
    let cap = du
        .terms()
        .chain(dv.terms())
        .filter_map(|(s, _)| s.order())
        .max()
        .unwrap_or(0)
        .saturating_mul(2)
        .max(DEFAULT_ORDER_CAP);
    let uv = diffop_product_capped(g, &du, &dv, cap)?;
    let vu = diffop_product_capped(g, &dv, &du, cap)?;
    let diff = &uv - &vu;
    match tag {
        Tag::D1 => diff.to_d1(),
        _ => Ok(diff),
    }
}

/// The bracket of `HV`:
///
/// * `[L(x), L(y)] = ∂(y−x) L(x+y) + δ_{x+y,0} (∂(x)³ − ∂(x))/12 · C_L`
/// * `[I(x), I(y)] = ∂(y) δ_{x+y,0} C_I`
/// * `[L(x), I(y)] = ∂(y) I(x+y) + δ_{x+y,0} (∂(x)² − ∂(x)) C_LI`
/// * central symbols bracket to zero.
pub fn hv_bracket(g: &GroupInstance, u: &Element, v: &Element) -> Result<Element> {
    check_pair(g, u, v, Tag::HV)?;
    let mut out = Element::zero(Tag::HV);
    let twelfth = Scalar::from_ratio(1, 12);
    for (s, a) in u.terms() {
        for (t, b) in v.terms() {
            let ab = a * b;
            match (s, t) {
                (Symbol::L(x), Symbol::L(y)) => {
                    let xy = x.add(y);
                    out.add_term(Symbol::L(xy.clone()), &ab * &g.pair(&y.sub(x)));
                    if xy.is_zero() {
                        let dx = g.pair(x);
                        let cubic = &(&(&dx * &dx) * &dx) - &dx;
                        out.add_term(Symbol::CL, &(&ab * &cubic) * &twelfth);
                    }
                }
                (Symbol::I(x), Symbol::I(y)) => {
                    if x.add(y).is_zero() {
                        out.add_term(Symbol::CI, &ab * &g.pair(y));
                    }
                }
                (Symbol::L(x), Symbol::I(y)) => {
                    add_mixed(g, &mut out, x, y, ab);
                }
                (Symbol::I(y), Symbol::L(x)) => {
                    add_mixed(g, &mut out, x, y, -ab);
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

fn add_mixed(g: &GroupInstance, out: &mut Element, x: &GroupElement, y: &GroupElement, coeff: Scalar) {
    let xy = x.add(y);
    out.add_term(Symbol::I(xy.clone()), &coeff * &g.pair(y));
    if xy.is_zero() {
        let dx = g.pair(x);
        out.add_term(Symbol::CLI, &coeff * &(&(&dx * &dx) - &dx));
    }
}

/// The Lie bracket of the algebra named by the operands' tag.
pub fn bracket(g: &GroupInstance, u: &Element, v: &Element) -> Result<Element> {
    match u.tag() {
        Tag::W => witt_bracket(g, u, v),
        Tag::D | Tag::D1 => commutator(g, u, v),
        Tag::HV => hv_bracket(g, u, v),
    }
}

/// `[[u,v],w] + [[v,w],u] + [[w,u],v]`.
pub fn jacobi_defect(g: &GroupInstance, u: &Element, v: &Element, w: &Element) -> Result<Element> {
    let a = bracket(g, &bracket(g, u, v)?, w)?;
    let b = bracket(g, &bracket(g, v, w)?, u)?;
    let c = bracket(g, &bracket(g, w, u)?, v)?;
    Ok(&(&a + &b) + &c)
}

/// Splits `u` by group degree; central symbols sit in degree zero.
pub fn grade_components(g: &GroupInstance, u: &Element) -> BTreeMap<GroupElement, Element> {
    let mut out: BTreeMap<GroupElement, Element> = BTreeMap::new();
    for (s, c) in u.terms() {
        let deg = s.degree().cloned().unwrap_or_else(|| g.zero());
        out.entry(deg)
            .or_insert_with(|| Element::zero(u.tag()))
            .add_term(s.clone(), c.clone());
    }
    out
}

/// The quotient map `HV → D1` killing the center.
pub fn project_to_d1(u: &Element) -> Result<Element> {
    expect_tag(u, Tag::HV)?;
    u.to_d1()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> GroupInstance {
        GroupInstance::integers()
    }
    fn el(tag: Tag, terms: &[(Symbol, Scalar)]) -> Element {
        Element::from_terms(tag, terms.iter().cloned()).unwrap()
    }
    fn l(n: i64) -> Symbol {
        Symbol::L(GroupElement::int(n))
    }
    fn i(n: i64) -> Symbol {
        Symbol::I(GroupElement::int(n))
    }
    fn d(n: i64, m: u32) -> Symbol {
        Symbol::D(GroupElement::int(n), m)
    }
    fn one(s: Symbol, tag: Tag) -> Element {
        Element::basis(tag, s).unwrap()
    }
    fn k(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn witt_examples() {
        let g = z();
        assert_eq!(
            witt_bracket(&g, &one(l(1), Tag::W), &one(l(2), Tag::W)).unwrap(),
            one(l(3), Tag::W)
        );
        assert!(witt_bracket(&g, &one(l(4), Tag::W), &one(l(4), Tag::W)).unwrap().is_zero());
        let g2 = GroupInstance::lattice_sqrt(2).unwrap();
        let e1 = one(Symbol::L(GroupElement::lattice(&[1, 0])), Tag::W);
        let e2 = one(Symbol::L(GroupElement::lattice(&[0, 1])), Tag::W);
        let expected = Element::monomial(
            Tag::W,
            Symbol::L(GroupElement::lattice(&[1, 1])),
            "-1+sqrt(2)".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(witt_bracket(&g2, &e1, &e2).unwrap(), expected);
    }

    #[test]
    fn product_examples() {
        let g = z();
        let p = diffop_product(&g, &one(d(1, 1), Tag::D), &one(d(2, 1), Tag::D)).unwrap();
        assert_eq!(p, el(Tag::D, &[(d(3, 2), k(1)), (d(3, 1), k(2))]));
        let p = diffop_product(&g, &one(d(3, 0), Tag::D), &one(d(-5, 0), Tag::D)).unwrap();
        assert_eq!(p, one(d(-2, 0), Tag::D));
        let p = diffop_product(&g, &one(d(0, 1), Tag::D), &one(d(2, 1), Tag::D)).unwrap();
        assert_eq!(p, el(Tag::D, &[(d(2, 2), k(1)), (d(2, 1), k(2))]));
    }

    #[test]
    fn product_order_cap() {
        let g = z();
        let e = one(d(0, 9), Tag::D);
        assert_eq!(
            diffop_product(&g, &e, &e),
            Err(Error::OrderCap { order: 18, cap: 16 })
        );
        assert!(diffop_product_capped(&g, &e, &e, 18).is_ok());
    }

    #[test]
    fn commutator_examples() {
        let g = z();
        let c = commutator(&g, &one(l(1), Tag::D1), &one(i(2), Tag::D1)).unwrap();
        assert_eq!(c, el(Tag::D1, &[(i(3), k(2))]));
        assert!(commutator(&g, &one(i(3), Tag::D1), &one(i(5), Tag::D1)).unwrap().is_zero());
        let c = commutator(&g, &one(l(1), Tag::D1), &one(l(2), Tag::D1)).unwrap();
        assert_eq!(c, one(l(3), Tag::D1));
        assert!(commutator(&g, &one(l(1), Tag::W), &one(l(2), Tag::W)).is_err());
    }

    #[test]
    fn hv_examples() {
        let g = z();
        let hv = |s| one(s, Tag::HV);
        assert_eq!(
            hv_bracket(&g, &hv(l(2)), &hv(l(-2))).unwrap(),
            el(Tag::HV, &[(l(0), k(-4)), (Symbol::CL, Scalar::from_ratio(1, 2))])
        );
        assert_eq!(
            hv_bracket(&g, &hv(l(1)), &hv(i(-1))).unwrap(),
            el(Tag::HV, &[(i(0), k(-1))])
        );
        assert_eq!(
            hv_bracket(&g, &hv(i(3)), &hv(i(-3))).unwrap(),
            el(Tag::HV, &[(Symbol::CI, k(-3))])
        );
        let mixed = el(Tag::HV, &[(l(5), k(2)), (i(-1), k(1)), (Symbol::CLI, k(7))]);
        assert!(hv_bracket(&g, &hv(Symbol::CL), &mixed).unwrap().is_zero());
        assert!(hv_bracket(&g, &mixed, &hv(Symbol::CI)).unwrap().is_zero());
        // [L(2), I(-2)] carries the C_LI term ∂(2)² − ∂(2) = 2.
        assert_eq!(
            hv_bracket(&g, &hv(l(2)), &hv(i(-2))).unwrap(),
            el(Tag::HV, &[(i(0), k(-2)), (Symbol::CLI, k(2))])
        );
    }

    #[test]
    fn grading_examples() {
        let g = z();
        let u = el(Tag::HV, &[(l(1), k(1)), (i(1), k(2)), (Symbol::CL, k(1))]);
        let parts = grade_components(&g, &u);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[&GroupElement::int(1)], el(Tag::HV, &[(l(1), k(1)), (i(1), k(2))]));
        assert_eq!(parts[&GroupElement::int(0)], one(Symbol::CL, Tag::HV));
        assert!(grade_components(&g, &Element::zero(Tag::W)).is_empty());
        let w = el(Tag::W, &[(l(1), k(1)), (l(2), k(1))]);
        assert_eq!(grade_components(&g, &w).len(), 2);
    }

    #[test]
    fn projection_examples() {
        let g = z();
        let u = el(Tag::HV, &[(l(2), k(1)), (Symbol::CL, Scalar::from_ratio(1, 2))]);
        assert_eq!(project_to_d1(&u).unwrap(), one(l(2), Tag::D1));
        assert!(project_to_d1(&one(Symbol::CI, Tag::HV)).unwrap().is_zero());
        let lhs = project_to_d1(&hv_bracket(&g, &one(l(2), Tag::HV), &one(l(-2), Tag::HV)).unwrap()).unwrap();
        let rhs = commutator(&g, &one(l(2), Tag::D1), &one(l(-2), Tag::D1)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, el(Tag::D1, &[(l(0), k(-4))]));
    }

    #[test]
    fn jacobi_examples() {
        let g = z();
        let hv = |s| one(s, Tag::HV);
        assert!(jacobi_defect(&g, &hv(l(1)), &hv(l(2)), &hv(l(-3))).unwrap().is_zero());
        assert!(jacobi_defect(&g, &hv(l(2)), &hv(i(-1)), &hv(i(-1))).unwrap().is_zero());
        let u = el(Tag::HV, &[(l(1), k(1)), (i(-2), k(3))]);
        assert!(jacobi_defect(&g, &u, &u, &hv(l(1))).unwrap().is_zero());
    }

    #[test]
    fn group_mismatch_is_rejected() {
        let g = z();
        let bad = one(Symbol::L(GroupElement::lattice(&[1, 0])), Tag::W);
        assert!(witt_bracket(&g, &bad, &one(l(1), Tag::W)).is_err());
    }
}
