//! Acceptance run: one line per criterion, then a single assertion.
//!
//! Criteria run sequentially in one test so wall-clock limits are not skewed
//! by other tests sharing the CPU.

use std::process::Command;
use std::time::{Duration, Instant};

use hv_cli::parser::parse_element;
use hv_core::algebra::{commutator, hv_bracket, jacobi_defect, project_to_d1, witt_bracket, Element, Symbol, Tag};
use hv_core::automorphisms::{
    ad_squared, apply_inner, apply_theta, compose_theta, factor_automorphism, homomorphism_defect, invert_theta,
    lift_automorphism_to_hv, random_inner, random_theta, verify_group_laws, AutWord,
};
use hv_core::cohomology::{
    coboundary, extract_class, random_functional, solve_cubic_fe, solve_linear_fe, verify_cocycle, Cocycle,
    CohomologyClass, DiagonalForm, LinearFunctional,
};
use hv_core::derivations::{
    decompose_degree0, default_probes, leibniz_defect, lift_derivation_to_hv, lifted_leibniz_defect, probe_symbols,
    Degree0Decomposition, Derivation,
};
use hv_core::foundations::{AdditiveMap, GroupInstance, Scalar};
use hv_core::lift::CENTRAL;
use hv_core::sample::Sampler;

const SEED: u64 = 20_240_917;

const JACOBI_LIMIT: Duration = Duration::from_secs(10);
const ORACLE_LIMIT: Duration = Duration::from_secs(1);
const VERIFY_LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn z() -> GroupInstance {
    GroupInstance::integers()
}

fn z2() -> GroupInstance {
    GroupInstance::lattice_sqrt(2).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn hv_err(e: hv_core::Error) -> String {
    e.to_string()
}

fn hv_element(s: &mut Sampler, g: &GroupInstance) -> Element {
    s.element(g, Tag::HV)
}

fn lie_axioms() -> Outcome {
    let started = Instant::now();
    for (g, n) in [(z(), 1000), (z2(), 500)] {
        let mut s = Sampler::new(SEED);
        for _ in 0..n {
            let (u, v, w) = (hv_element(&mut s, &g), hv_element(&mut s, &g), hv_element(&mut s, &g));
            let d = jacobi_defect(&g, &u, &v, &w).map_err(hv_err)?;
            ensure(d.is_zero(), || format!("jacobi defect {d} at ({u}, {v}, {w})"))?;
        }
    }
    let t = started.elapsed();
    ensure(t < JACOBI_LIMIT, || format!("took {t:?}"))?;
    Ok(format!("1000 + 500 triples, exact zero, {t:.2?}"))
}

fn embed(u: &Element) -> Element {
    Element::from_terms(
        Tag::D,
        u.terms().map(|(s, c)| match s {
            Symbol::L(x) => (Symbol::D(x.clone(), 1), c.clone()),
            other => panic!("not a Witt symbol: {other}"),
        }),
    )
    .unwrap()
}

fn commutator_consistency() -> Outcome {
    for g in [z(), z2()] {
        let mut s = Sampler::new(SEED + 1);
        for _ in 0..500 {
            let (u, v) = (s.element(&g, Tag::W), s.element(&g, Tag::W));
            let lhs = embed(&witt_bracket(&g, &u, &v).map_err(hv_err)?);
            let rhs = commutator(&g, &embed(&u), &embed(&v)).map_err(hv_err)?;
            ensure(lhs == rhs, || format!("[{u}, {v}]: {lhs} != {rhs}"))?;
        }
        for _ in 0..1000 {
            let (u, v) = (hv_element(&mut s, &g), hv_element(&mut s, &g));
            let lhs = project_to_d1(&hv_bracket(&g, &u, &v).map_err(hv_err)?).map_err(hv_err)?;
            let rhs = commutator(&g, &project_to_d1(&u).map_err(hv_err)?, &project_to_d1(&v).map_err(hv_err)?)
                .map_err(hv_err)?;
            ensure(lhs == rhs, || format!("projection at ({u}, {v})"))?;
        }
    }
    Ok("500 Witt pairs, 1000 projection pairs per group".into())
}

fn cocycle_suite() -> Outcome {
    for g in [z(), z2()] {
        let witt = DiagonalForm::witt();
        let report = verify_cocycle(&g, |u, v| witt.eval(&g, u, v), 1000, SEED, Tag::W).map_err(hv_err)?;
        ensure(report.passed(), || format!("psi: {:?}", report.witness))?;
        for (name, c) in [("psi1", Cocycle::psi1()), ("psi2", Cocycle::psi2()), ("psi3", Cocycle::psi3())] {
            let report = verify_cocycle(&g, |u, v| c.eval(&g, u, v), 1000, SEED, Tag::D1).map_err(hv_err)?;
            ensure(report.passed(), || format!("{name}: {:?}", report.witness))?;
        }
        let f = LinearFunctional::zero()
            .with(Symbol::I(g.zero()), -Scalar::one())
            .map_err(hv_err)?;
        let cb = coboundary(f);
        let mut s = Sampler::new(SEED + 2);
        for _ in 0..1000 {
            let (u, v) = (s.element(&g, Tag::D1), s.element(&g, Tag::D1));
            let (a, b) = (Cocycle::psi3_prime().eval(&g, &u, &v), cb.eval(&g, &u, &v));
            ensure(a == b, || format!("psi3' at ({u}, {v}): {a} != {b}"))?;
        }
    }
    Ok("psi, psi1, psi2, psi3 on 1000 triples; psi3' on 1000 pairs".into())
}

fn class_extraction() -> Outcome {
    for g in [z(), z2()] {
        let mut s = Sampler::new(SEED + 3);
        for _ in 0..100 {
            let (a, b, c) = (s.field_scalar(&g), s.field_scalar(&g), s.field_scalar(&g));
            let alpha = Cocycle::combination(a.clone(), b.clone(), c.clone()).with_boundary(random_functional(&mut s, &g));
            let got = extract_class(&g, |u, v| alpha.eval(&g, u, v)).map_err(hv_err)?;
            let want = CohomologyClass { a, b, c };
            ensure(got == want, || format!("{got:?} != {want:?}"))?;
        }
        for _ in 0..100 {
            let cb = coboundary(random_functional(&mut s, &g));
            let got = extract_class(&g, |u, v| cb.eval(&g, u, v)).map_err(hv_err)?;
            ensure(got.is_zero(), || format!("coboundary extracted to {got:?}"))?;
        }
    }
    Ok("100 round trips and 100 coboundaries per group".into())
}

fn oracles() -> Outcome {
    let int = |k: i64| Scalar::from_int(k);
    let started = Instant::now();
    let cubic = solve_cubic_fe(10).map_err(hv_err)?;
    let t_cubic = started.elapsed();
    ensure(cubic.dimension == 2, || format!("cubic dimension {}", cubic.dimension))?;
    let window: Vec<i64> = (-10..=10).collect();
    ensure(cubic.basis[0] == window.iter().map(|&k| int(k)).collect::<Vec<_>>(), || "cubic basis[0] != k".into())?;
    ensure(cubic.basis[1] == window.iter().map(|&k| int(k * k)).collect::<Vec<_>>(), || "cubic basis[1] != k^2".into())?;

    let g = z();
    let started = Instant::now();
    let linear = solve_linear_fe(10, &g).map_err(hv_err)?;
    let t_linear = started.elapsed();
    ensure(linear.dimension == 2, || format!("linear dimension {}", linear.dimension))?;
    ensure(linear.basis[0] == window.iter().map(|&k| int(k)).collect::<Vec<_>>(), || "linear basis[0] != d".into())?;
    ensure(linear.basis[1] == vec![int(1); 21], || "linear basis[1] != 1".into())?;

    ensure(t_cubic < ORACLE_LIMIT && t_linear < ORACLE_LIMIT, || format!("took {t_cubic:?} / {t_linear:?}"))?;
    Ok(format!("dimension 2 each, {t_cubic:.2?} / {t_linear:.2?}"))
}

fn derivations() -> Outcome {
    for g in [z(), z2()] {
        let mut s = Sampler::new(SEED + 4);
        for which in 0..4 {
            for _ in 0..1000 {
                let d = match which {
                    0 => Derivation::Sigma1,
                    1 => Derivation::Sigma2,
                    2 => Derivation::Sigma3,
                    _ => Derivation::Xi(s.additive_map(&g)),
                };
                let (u, v) = (s.element(&g, Tag::D1), s.element(&g, Tag::D1));
                let defect = leibniz_defect(&g, &d, &u, &v).map_err(hv_err)?;
                ensure(defect.is_zero(), || format!("{d:?} at ({u}, {v}): {defect}"))?;
            }
        }
        let probes = default_probes(&g);
        for _ in 0..100 {
            let want = Degree0Decomposition {
                mu: s.additive_map(&g),
                a: s.field_scalar(&g),
                b: s.field_scalar(&g),
                c0: s.field_scalar(&g),
            };
            let got = decompose_degree0(&g, &want.to_derivation(), &probes).map_err(hv_err)?;
            ensure(got == want, || format!("{got:?} != {want:?}"))?;
        }
        let ad = Derivation::inner(Element::basis(Tag::D1, Symbol::L(g.zero())).unwrap()).map_err(hv_err)?;
        let got = decompose_degree0(&g, &ad, &probes).map_err(hv_err)?;
        ensure(
            got.mu == AdditiveMap::pairing(&g) && got.a.is_zero() && got.b.is_zero() && got.c0.is_zero(),
            || format!("ad(L(0)) decomposed as {got:?}"),
        )?;
    }
    Ok("Leibniz on 4 x 1000 pairs, 100 decompositions and ad(L(0)) per group".into())
}

fn automorphisms() -> Outcome {
    for g in [z(), z2()] {
        let mut s = Sampler::new(SEED + 5);
        for _ in 0..200 {
            let (t1, t2) = (random_theta(&mut s, &g), random_theta(&mut s, &g));
            let t = compose_theta(&t1, &t2);
            for _ in 0..50 {
                let u = s.element(&g, Tag::D1);
                let lhs = apply_theta(&g, &t, &u).map_err(hv_err)?;
                let rhs = apply_theta(&g, &t1, &apply_theta(&g, &t2, &u).map_err(hv_err)?).map_err(hv_err)?;
                ensure(lhs == rhs, || format!("composition at {u}"))?;
            }
            let inv = invert_theta(&t1);
            ensure(compose_theta(&t1, &inv).is_identity(), || format!("{t1:?} * inverse"))?;
            let u = s.element(&g, Tag::D1);
            let back = apply_theta(&g, &inv, &apply_theta(&g, &t1, &u).map_err(hv_err)?).map_err(hv_err)?;
            ensure(back == u, || format!("inverse action at {u}"))?;
        }
        let probes = default_probes(&g);
        for _ in 0..100 {
            let word = AutWord::new(random_inner(&mut s, &g, 3), random_theta(&mut s, &g));
            let got = factor_automorphism(&g, |sym| word.on_symbol(&g, sym), &probes).map_err(hv_err)?;
            ensure(got == word, || format!("{word:?} factored as {got:?}"))?;
        }
        for _ in 0..1000 {
            let (t, eta) = (random_theta(&mut s, &g), random_inner(&mut s, &g, 3));
            let (u, v) = (s.element(&g, Tag::D1), s.element(&g, Tag::D1));
            let d1 = homomorphism_defect(&g, |x| apply_theta(&g, &t, x), &u, &v).map_err(hv_err)?;
            let d2 = homomorphism_defect(&g, |x| apply_inner(&g, &eta, x), &u, &v).map_err(hv_err)?;
            ensure(d1.is_zero() && d2.is_zero(), || format!("homomorphism defect at ({u}, {v})"))?;
        }
        for z in probes.iter().filter(|z| !z.is_zero()) {
            for sym in probe_symbols(&probes) {
                let u = Element::basis(Tag::D1, sym).unwrap();
                let d = ad_squared(&g, z, &u).map_err(hv_err)?;
                ensure(d.is_zero(), || format!("ad(t^{z})^2 {u} = {d}"))?;
            }
        }
    }
    Ok("200 x 50 compositions, inverses, 100 factorizations, 1000 pairs, ad^2 per group".into())
}

/// HV pairs where every fourth left operand carries all three central generators.
fn hv_pair(s: &mut Sampler, g: &GroupInstance, i: usize) -> (Element, Element) {
    let mut u = hv_element(s, g);
    if i.is_multiple_of(4) {
        for c in CENTRAL {
            u.push(c, s.nonzero_field_scalar(g)).unwrap();
        }
    }
    (u, hv_element(s, g))
}

fn lifting() -> Outcome {
    for g in [z(), z2()] {
        let mut s = Sampler::new(SEED + 6);
        let ders = [
            Derivation::Sigma1,
            Derivation::Sigma2,
            Derivation::Sigma3,
            Derivation::Xi(s.additive_map(&g)),
            Derivation::Inner(s.element(&g, Tag::D1)),
        ];
        let der_lifts: Vec<_> = ders
            .iter()
            .map(|d| lift_derivation_to_hv(&g, d, Some(SEED)))
            .collect::<Result<_, _>>()
            .map_err(hv_err)?;
        for i in 0..500 {
            let (u, v) = hv_pair(&mut s, &g, i);
            let defect = lifted_leibniz_defect(&g, &der_lifts[i % ders.len()], &u, &v).map_err(hv_err)?;
            ensure(defect.is_zero(), || format!("lifted {:?} at ({u}, {v}): {defect}", ders[i % ders.len()]))?;
        }
        let words: Vec<AutWord> = (0..5)
            .map(|_| AutWord::new(random_inner(&mut s, &g, 2), random_theta(&mut s, &g)))
            .collect();
        let aut_lifts: Vec<_> = words
            .iter()
            .map(|w| lift_automorphism_to_hv(&g, w, Some(SEED)))
            .collect::<Result<_, _>>()
            .map_err(hv_err)?;
        for i in 0..500 {
            let (u, v) = hv_pair(&mut s, &g, i);
            let lift = &aut_lifts[i % words.len()];
            let defect = homomorphism_defect(&g, |x| lift.apply(x), &u, &v).map_err(hv_err)?;
            ensure(defect.is_zero(), || format!("lifted {:?} at ({u}, {v}): {defect}", words[i % words.len()]))?;
        }
        let mut symbols = probe_symbols(&default_probes(&g));
        symbols.extend(CENTRAL);
        for (i, w1) in words.iter().enumerate() {
            let w2 = &words[(i + 1) % words.len()];
            let composed = lift_automorphism_to_hv(&g, &w1.compose(w2), Some(SEED)).map_err(hv_err)?;
            let (l1, l2) = (&aut_lifts[i], &aut_lifts[(i + 1) % words.len()]);
            for sym in &symbols {
                let u = Element::basis(Tag::HV, sym.clone()).unwrap();
                let lhs = composed.apply(&u).map_err(hv_err)?;
                let rhs = l1.apply(&l2.apply(&u).map_err(hv_err)?).map_err(hv_err)?;
                ensure(lhs == rhs, || format!("lift of composition differs on {sym}: {lhs} != {rhs}"))?;
            }
        }
    }
    Ok("500 derivation pairs, 500 automorphism pairs, composition on probes per group".into())
}

fn group_laws() -> Outcome {
    for g in [z(), z2()] {
        let report = verify_group_laws(&g, 200, SEED);
        ensure(report.checks.len() == 5, || format!("{} checks", report.checks.len()))?;
        for c in &report.checks {
            ensure(c.passed() && c.samples >= 200, || format!("{}: {:?}", c.name, c.witness))?;
        }
    }
    Ok("5 checks x 200 samples per group".into())
}

fn cli() -> Outcome {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hv"))
        .arg("verify")
        .env_remove("HV_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    let t = started.elapsed();
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stdout))
    })?;
    ensure(t < VERIFY_LIMIT, || format!("hv verify took {t:?}"))?;

    let groups = [z(), z2(), GroupInstance::rationals()];
    let tags = [Tag::W, Tag::D, Tag::D1, Tag::HV];
    let mut s = Sampler::new(SEED + 7);
    for i in 0..1000 {
        let (g, tag) = (&groups[i % 3], tags[i % 4]);
        let e = s.element(g, tag);
        let back = parse_element(&e.to_string(), g, tag).map_err(hv_err)?;
        ensure(back == e, || format!("round trip of {e} gave {back}"))?;
    }
    Ok(format!("hv verify exit 0 in {t:.2?}; 1000 elements round-trip"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("Lie axioms on HV", lie_axioms),
        ("embedding and commutator consistency", commutator_consistency),
        ("cocycle suite", cocycle_suite),
        ("class extraction", class_extraction),
        ("functional-equation oracles", oracles),
        ("degree-zero derivations", derivations),
        ("automorphism suite", automorphisms),
        ("lifting to HV", lifting),
        ("group laws", group_laws),
        ("CLI verify and round trip", cli),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:2} FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
