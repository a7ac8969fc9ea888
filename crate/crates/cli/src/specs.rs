//! JSON descriptions of cocycles, derivations and automorphisms, and JSON
//! renderings of results. Scalars are always strings.

use hv_core::algebra::{Element, Tag};
use hv_core::automorphisms::{AutWord, InnerAut, ThetaAut};
use hv_core::cohomology::{Cocycle, CohomologyClass, DiagonalForm, LinearFunctional};
use hv_core::derivations::Derivation;
use hv_core::foundations::{AdditiveMap, Character, GroupInstance, Scalar};
use hv_core::{Error, Result};
use serde_json::{json, Map, Value};

use crate::parser::parse_element;

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))
}

fn scalar(g: &GroupInstance, v: &Value) -> Result<Scalar> {
    let s: Scalar = match v {
        Value::String(s) => s.parse()?,
        Value::Number(n) if n.is_i64() => Scalar::from_int(n.as_i64().expect("checked")),
        other => return Err(config_err(format!("expected a scalar string, found {other}"))),
    };
    g.field().admit(&s)
}

fn scalar_field(g: &GroupInstance, obj: &Map<String, Value>, key: &str, default: Option<Scalar>) -> Result<Scalar> {
    match (obj.get(key), default) {
        (Some(v), _) => scalar(g, v),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(config_err(format!("missing field {key:?}"))),
    }
}

fn scalar_list(g: &GroupInstance, v: &Value) -> Result<Vec<Scalar>> {
    v.as_array()
        .ok_or_else(|| config_err("expected an array of scalars"))?
        .iter()
        .map(|x| scalar(g, x))
        .collect()
}

fn object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| config_err(format!("expected an object, found {v}")))
}

/// `{"chi":["2"],"eps":"-1","a":"1","b":"0","c":"3"}`; every field is
/// optional and defaults to the identity.
pub fn theta_from_json(g: &GroupInstance, v: &Value) -> Result<ThetaAut> {
    let obj = object(v)?;
    let chi = match obj.get("chi") {
        Some(c) => Character::new(g, scalar_list(g, c)?)?,
        None => Character::trivial(g),
    };
    ThetaAut::new(
        g,
        chi,
        scalar_field(g, obj, "eps", Some(Scalar::one()))?,
        scalar_field(g, obj, "a", Some(Scalar::zero()))?,
        scalar_field(g, obj, "b", Some(Scalar::zero()))?,
        scalar_field(g, obj, "c", Some(Scalar::one()))?,
    )
}

pub fn theta_to_json(t: &ThetaAut) -> Value {
    json!({
        "chi": t.chi().images().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "eps": t.eps().to_string(),
        "a": t.a().to_string(),
        "b": t.b().to_string(),
        "c": t.c().to_string(),
    })
}

/// `{"factors":[["k","z"], ...]}` with `z` written as in element arguments.
pub fn inner_from_json(g: &GroupInstance, v: &Value) -> Result<InnerAut> {
    let factors = object(v)?
        .get("factors")
        .and_then(Value::as_array)
        .ok_or_else(|| config_err("inner automorphism needs a \"factors\" array"))?;
    let mut out = Vec::new();
    for f in factors {
        let pair = f
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| config_err("each factor is a [k, z] pair"))?;
        let k = scalar(g, &pair[0])?;
        let z = match &pair[1] {
            Value::String(s) => g.parse_element(s)?,
            Value::Number(n) => g.parse_element(&n.to_string())?,
            other => return Err(config_err(format!("invalid degree {other}"))),
        };
        out.push((k, z));
    }
    InnerAut::new(g, out)
}

pub fn inner_to_json(eta: &InnerAut) -> Value {
    json!({
        "factors": eta
            .factors()
            .iter()
            .map(|(k, z)| json!([k.to_string(), z.to_string()]))
            .collect::<Vec<_>>()
    })
}

/// `{"inner":{..},"theta":{..}}`; a bare theta or inner object is accepted
/// as a one-sided word.
pub fn word_from_json(g: &GroupInstance, v: &Value) -> Result<AutWord> {
    let obj = object(v)?;
    if obj.contains_key("inner") || obj.contains_key("theta") {
        let inner = match obj.get("inner") {
            Some(i) => inner_from_json(g, i)?,
            None => InnerAut::identity(),
        };
        let theta = match obj.get("theta") {
            Some(t) => theta_from_json(g, t)?,
            None => ThetaAut::identity(g),
        };
        return Ok(AutWord::new(inner, theta));
    }
    if obj.contains_key("factors") {
        return Ok(AutWord::new(inner_from_json(g, v)?, ThetaAut::identity(g)));
    }
    Ok(AutWord::new(InnerAut::identity(), theta_from_json(g, v)?))
}

pub fn word_to_json(w: &AutWord) -> Value {
    json!({"inner": inner_to_json(&w.inner), "theta": theta_to_json(&w.theta)})
}

/// `{"xi":{"mu":[...]}}`, `{"sigma":1}`, `{"ad":"L(1)"}`, `{"scale":"2","der":...}`,
/// or an array (or `{"sum":[...]}`) of those.
pub fn derivation_from_json(g: &GroupInstance, v: &Value) -> Result<Derivation> {
    if let Some(items) = v.as_array() {
        return Ok(Derivation::Combination(
            items
                .iter()
                .map(|i| Ok((Scalar::one(), derivation_from_json(g, i)?)))
                .collect::<Result<Vec<_>>>()?,
        ));
    }
    let obj = object(v)?;
    if let Some(items) = obj.get("sum") {
        return derivation_from_json(g, items);
    }
    if let Some(inner) = obj.get("der") {
        let k = scalar_field(g, obj, "scale", Some(Scalar::one()))?;
        return Ok(Derivation::Combination(vec![(k, derivation_from_json(g, inner)?)]));
    }
    if let Some(s) = obj.get("sigma") {
        return match s.as_u64() {
            Some(1) => Ok(Derivation::Sigma1),
            Some(2) => Ok(Derivation::Sigma2),
            Some(3) => Ok(Derivation::Sigma3),
            _ => Err(config_err("sigma must be 1, 2 or 3")),
        };
    }
    if let Some(x) = obj.get("xi") {
        let mu = object(x)?
            .get("mu")
            .ok_or_else(|| config_err("xi needs \"mu\""))?;
        return Ok(Derivation::Xi(AdditiveMap::new(g, scalar_list(g, mu)?)?));
    }
    if let Some(w) = obj.get("ad") {
        let text = w.as_str().ok_or_else(|| config_err("ad takes an element string"))?;
        return Derivation::inner(parse_element(text, g, Tag::D1)?);
    }
    Err(config_err(format!("unrecognised derivation {v}")))
}

/// A named cocycle (`psi`, `psi1`, `psi2`, `psi3`, `psi3'`) or
/// `{"a":..,"b":..,"c":..,"cprime":..,"g":{"I(0)":"-1"}}`.
pub enum CocycleSpec {
    Witt,
    Combination(Box<Cocycle>),
}

impl CocycleSpec {
    pub fn eval(&self, g: &GroupInstance, u: &Element, v: &Element) -> Scalar {
        match self {
            CocycleSpec::Witt => DiagonalForm::witt().eval(g, u, v),
            CocycleSpec::Combination(c) => c.eval(g, u, v),
        }
    }

    pub fn domain(&self) -> Tag {
        match self {
            CocycleSpec::Witt => Tag::W,
            CocycleSpec::Combination(_) => Tag::D1,
        }
    }
}

pub fn cocycle_from_text(g: &GroupInstance, text: &str) -> Result<CocycleSpec> {
    match text.trim() {
        "psi" | "witt" => return Ok(CocycleSpec::Witt),
        "psi1" => return Ok(CocycleSpec::Combination(Box::new(Cocycle::psi1()))),
        "psi2" => return Ok(CocycleSpec::Combination(Box::new(Cocycle::psi2()))),
        "psi3" => return Ok(CocycleSpec::Combination(Box::new(Cocycle::psi3()))),
        "psi3'" | "psi3p" | "psi3prime" => return Ok(CocycleSpec::Combination(Box::new(Cocycle::psi3_prime()))),
        _ => {}
    }
    let v = parse_json(text)?;
    let obj = object(&v)?;
    let zero = Some(Scalar::zero());
    let mut boundary = LinearFunctional::zero();
    if let Some(gv) = obj.get("g") {
        for (sym, val) in object(gv)? {
            let e = parse_element(sym, g, Tag::D1)?;
            let s = match e.terms().next() {
                Some((s, c)) if e.len() == 1 && c.is_one() => s.clone(),
                _ => return Err(config_err(format!("functional keys are basis symbols, found {sym:?}"))),
            };
            boundary.set(s, scalar(g, val)?)?;
        }
    }
    Ok(CocycleSpec::Combination(Box::new(Cocycle {
        a: scalar_field(g, obj, "a", zero.clone())?,
        b: scalar_field(g, obj, "b", zero.clone())?,
        c: scalar_field(g, obj, "c", zero.clone())?,
        cprime: scalar_field(g, obj, "cprime", zero)?,
        boundary,
    })))
}

pub fn class_to_json(c: &CohomologyClass) -> Value {
    json!({"a": c.a.to_string(), "b": c.b.to_string(), "c": c.c.to_string()})
}

/// `{"element": text, "algebra": tag, "terms": [[symbol, coeff], ...]}`.
pub fn element_to_json(e: &Element) -> Value {
    json!({
        "element": e.to_string(),
        "algebra": e.tag().to_string(),
        "terms": e.terms().map(|(s, c)| json!([s.to_string(), c.to_string()])).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hv_core::derivations::derive;
    use hv_core::foundations::GroupElement;

    #[test]
    fn theta_json_round_trip() {
        let g = GroupInstance::integers();
        let v = parse_json(r#"{"chi":["2"],"eps":"-1","a":"1","b":"0","c":"3"}"#).unwrap();
        let t = theta_from_json(&g, &v).unwrap();
        assert_eq!(theta_from_json(&g, &theta_to_json(&t)).unwrap(), t);
        assert!(theta_from_json(&g, &parse_json(r#"{"eps":"2"}"#).unwrap()).is_err());
    }

    #[test]
    fn derivation_specs() {
        let g = GroupInstance::lattice_sqrt(2).unwrap();
        let d = derivation_from_json(&g, &parse_json(r#"[{"xi":{"mu":["1","-1"]}},{"sigma":1}]"#).unwrap()).unwrap();
        let x = parse_element("L(2,3)", &g, Tag::D1).unwrap();
        let got = derive(&g, &d, &x).unwrap();
        assert_eq!(got.coeff(&hv_core::algebra::Symbol::L(GroupElement::lattice(&[2, 3]))), Scalar::from_int(-1));
        assert!(derivation_from_json(&g, &parse_json(r#"{"ad":"L(1,0)"}"#).unwrap()).is_ok());
        assert!(derivation_from_json(&g, &parse_json(r#"{"sigma":4}"#).unwrap()).is_err());
    }

    #[test]
    fn cocycle_specs() {
        let g = GroupInstance::integers();
        let c = cocycle_from_text(&g, r#"{"cprime":"1","g":{"I(0)":"1"}}"#).unwrap();
        let u = parse_element("L(1)", &g, Tag::D1).unwrap();
        let v = parse_element("I(-1)", &g, Tag::D1).unwrap();
        assert!(c.eval(&g, &u, &v).is_zero());
        assert!(cocycle_from_text(&g, "psi9").is_err());
    }
}
