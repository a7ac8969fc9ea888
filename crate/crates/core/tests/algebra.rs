use hv_core::algebra::{
    bracket, commutator, diffop_product, grade_components, hv_bracket, jacobi_defect, project_to_d1, witt_bracket,
    Element, Symbol, Tag,
};
use hv_core::cohomology::hv_central_cocycles;
use hv_core::foundations::{GroupElement, GroupInstance, Scalar};
use hv_core::sample::Sampler;
use proptest::prelude::*;

fn groups() -> Vec<GroupInstance> {
    vec![
        GroupInstance::integers(),
        GroupInstance::lattice_sqrt(2).unwrap(),
        GroupInstance::rationals(),
    ]
}

/// The bracket of `HV` rebuilt from the `D1` commutator and the three
/// central cocycles.
fn hv_oracle(g: &GroupInstance, u: &Element, v: &Element) -> Element {
    let (u1, v1) = (u.to_d1().unwrap(), v.to_d1().unwrap());
    let mut out = commutator(g, &u1, &v1).unwrap().to_hv().unwrap();
    for (s, w) in [Symbol::CL, Symbol::CI, Symbol::CLI].into_iter().zip(hv_central_cocycles()) {
        out = &out + &Element::monomial(Tag::HV, s, w.eval(g, &u1, &v1)).unwrap();
    }
    out
}

fn embed_w_in_d(u: &Element) -> Element {
    Element::from_terms(
        Tag::D,
        u.terms().map(|(s, c)| match s {
            Symbol::L(x) => (Symbol::D(x.clone(), 1), c.clone()),
            _ => unreachable!(),
        }),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hv_bracket_matches_cocycle_construction(seed in any::<u64>()) {
        for g in groups() {
            let mut s = Sampler::new(seed);
            let (u, v) = (s.element(&g, Tag::HV), s.element(&g, Tag::HV));
            prop_assert_eq!(hv_bracket(&g, &u, &v).unwrap(), hv_oracle(&g, &u, &v));
        }
    }

    #[test]
    fn brackets_are_bilinear_and_antisymmetric(seed in any::<u64>()) {
        for g in groups() {
            let mut s = Sampler::new(seed);
            for tag in [Tag::W, Tag::D, Tag::D1, Tag::HV] {
                let (u, v, w) = (s.element(&g, tag), s.element(&g, tag), s.element(&g, tag));
                let k = s.field_scalar(&g);
                let uv = bracket(&g, &u, &v).unwrap();
                prop_assert!((&uv + &bracket(&g, &v, &u).unwrap()).is_zero());
                let lhs = bracket(&g, &(&u.scale(&k) + &w), &v).unwrap();
                let rhs = &uv.scale(&k) + &bracket(&g, &w, &v).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn jacobi_holds(seed in any::<u64>()) {
        for g in groups() {
            let mut s = Sampler::new(seed);
            for tag in [Tag::W, Tag::D, Tag::D1, Tag::HV] {
                let (u, v, w) = (s.element(&g, tag), s.element(&g, tag), s.element(&g, tag));
                prop_assert!(jacobi_defect(&g, &u, &v, &w).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn diffop_product_is_associative(seed in any::<u64>()) {
        let g = GroupInstance::integers();
        let mut s = Sampler::new(seed);
        let (u, v, w) = (s.element(&g, Tag::D), s.element(&g, Tag::D), s.element(&g, Tag::D));
        let lhs = diffop_product(&g, &diffop_product(&g, &u, &v).unwrap(), &w).unwrap();
        let rhs = diffop_product(&g, &u, &diffop_product(&g, &v, &w).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn witt_embeds_in_differential_operators(seed in any::<u64>()) {
        for g in groups() {
            let mut s = Sampler::new(seed);
            let (u, v) = (s.element(&g, Tag::W), s.element(&g, Tag::W));
            let lhs = embed_w_in_d(&witt_bracket(&g, &u, &v).unwrap());
            let rhs = commutator(&g, &embed_w_in_d(&u), &embed_w_in_d(&v)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn projection_is_a_homomorphism(seed in any::<u64>()) {
        for g in groups() {
            let mut s = Sampler::new(seed);
            let (u, v) = (s.element(&g, Tag::HV), s.element(&g, Tag::HV));
            let lhs = project_to_d1(&hv_bracket(&g, &u, &v).unwrap()).unwrap();
            let rhs = commutator(&g, &project_to_d1(&u).unwrap(), &project_to_d1(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn brackets_respect_the_grading(seed in any::<u64>()) {
        for g in groups() {
            let mut s = Sampler::new(seed);
            for tag in [Tag::W, Tag::D, Tag::D1, Tag::HV] {
                let (u, v) = (s.element(&g, tag), s.element(&g, tag));
                for (x, ux) in grade_components(&g, &u) {
                    for (y, vy) in grade_components(&g, &v) {
                        let uv = bracket(&g, &ux, &vy).unwrap();
                        let degrees: Vec<GroupElement> = grade_components(&g, &uv).into_keys().collect();
                        prop_assert!(degrees.iter().all(|d| *d == x.add(&y)));
                    }
                }
            }
        }
    }
}

#[test]
fn central_symbols_commute_with_everything() {
    let g = GroupInstance::integers();
    let mut s = Sampler::new(17);
    for c in [Symbol::CL, Symbol::CI, Symbol::CLI] {
        let c = Element::basis(Tag::HV, c).unwrap();
        for _ in 0..50 {
            assert!(hv_bracket(&g, &c, &s.element(&g, Tag::HV)).unwrap().is_zero());
        }
    }
    let k = Scalar::from_ratio(1, 12);
    let l = |n: i64| Element::basis(Tag::HV, Symbol::L(GroupElement::int(n))).unwrap();
    let expected = &l(0).scale(&Scalar::from_int(-4)) + &Element::monomial(Tag::HV, Symbol::CL, &k * &Scalar::from_int(6)).unwrap();
    assert_eq!(hv_bracket(&g, &l(2), &l(-2)).unwrap(), expected);
}
