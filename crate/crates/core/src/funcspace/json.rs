//! Function files.

use super::{AddForm, AdditiveFn, CharForm, Character, ComplexFn, Lin, Phi, Term};
use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::scalar::{complex_from_value, complex_to_value, pair, C64, ONE};
use serde_json::{json, Map, Value};

fn bad(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field \"{key}\" in {v}")))
}

fn scalar(v: &Value) -> Result<C64> {
    complex_from_value(v).ok_or_else(|| bad(format!("not a scalar: {v}")))
}

fn scalars(v: &Value) -> Result<Vec<C64>> {
    match v {
        Value::Array(items) => items.iter().map(scalar).collect(),
        other => Ok(vec![scalar(other)?]),
    }
}

fn label_map(carrier: &Carrier, v: &Value) -> Result<Vec<Option<C64>>> {
    let n = carrier.size().ok_or_else(|| bad("tables need a finite carrier"))?;
    let obj = v.as_object().ok_or_else(|| bad("\"values\" must map labels to scalars"))?;
    let mut out = vec![None; n];
    for (label, val) in obj {
        let i = carrier.index_of(label).ok_or_else(|| bad(format!("unknown element {label}")))?;
        out[i] = if val.is_null() { None } else { Some(scalar(val)?) };
    }
    Ok(out)
}

fn table_json(carrier: &Carrier, vals: &[Option<C64>]) -> Value {
    let mut m = Map::new();
    for (i, v) in vals.iter().enumerate() {
        m.insert(carrier.labels()[i].clone(), v.map_or(Value::Null, pair));
    }
    Value::Object(m)
}

pub fn character_from_json(carrier: &Carrier, v: &Value) -> Result<Character> {
    let form = field(v, "form")?.as_str().ok_or_else(|| bad("\"form\" must be a string"))?;
    let chi = match form {
        "exp" => Character::exp(scalars(field(v, "b")?)?),
        "power" => Character::power(scalar(field(v, "s")?)?),
        "ones" => Character::ones(),
        "zero" => Character::zero(),
        "table" => {
            let vals = label_map(carrier, field(v, "values")?)?;
            if vals.iter().any(Option::is_none) {
                return Err(bad("character tables must list every element"));
            }
            Character::table(vals.into_iter().flatten().collect())
        }
        other => return Err(bad(format!("unknown character form {other}"))),
    };
    Ok(chi)
}

pub fn character_to_json(carrier: &Carrier, chi: &Character) -> Value {
    match &chi.form {
        CharForm::Exp(b) => {
            json!({"kind":"character","form":"exp","b": b.iter().map(|z| complex_to_value(*z)).collect::<Vec<_>>()})
        }
        CharForm::Power(s) => json!({"kind":"character","form":"power","s": complex_to_value(*s)}),
        CharForm::Ones => json!({"kind":"character","form":"ones"}),
        CharForm::Zero => json!({"kind":"character","form":"zero"}),
        CharForm::Table(vals) => {
            let opts: Vec<Option<C64>> = vals.iter().copied().map(Some).collect();
            json!({"kind":"character","form":"table","values": table_json(carrier, &opts)})
        }
    }
}

pub fn additive_from_json(carrier: &Carrier, v: &Value) -> Result<AdditiveFn> {
    let form = field(v, "form")?.as_str().ok_or_else(|| bad("\"form\" must be a string"))?;
    Ok(match form {
        "linear" => AdditiveFn::linear(scalars(field(v, "alpha")?)?),
        "log" => AdditiveFn::log(scalar(field(v, "alpha")?)?),
        "zero" => AdditiveFn::zero(),
        "table" => AdditiveFn { form: AddForm::Table(label_map(carrier, field(v, "values")?)?) },
        other => return Err(bad(format!("unknown additive form {other}"))),
    })
}

pub fn additive_to_json(carrier: &Carrier, a: &AdditiveFn) -> Value {
    match &a.form {
        AddForm::Linear(al) => {
            json!({"kind":"additive","form":"linear","alpha": al.iter().map(|z| complex_to_value(*z)).collect::<Vec<_>>()})
        }
        AddForm::Log(al) => json!({"kind":"additive","form":"log","alpha": complex_to_value(*al)}),
        AddForm::Zero => json!({"kind":"additive","form":"zero"}),
        AddForm::Table(vals) => json!({"kind":"additive","form":"table","values": table_json(carrier, vals)}),
    }
}

pub fn phi_from_json(carrier: &Carrier, v: &Value) -> Result<Phi> {
    match v.get("kind").and_then(Value::as_str) {
        Some("additive") => Ok(Phi::Add(additive_from_json(carrier, v)?)),
        Some("square") => Ok(Phi::Square(additive_from_json(carrier, field(v, "of")?)?)),
        Some("sum") => Ok(Phi::Combo(
            terms(v)?.into_iter().map(|(k, t)| Ok((k, phi_from_json(carrier, t)?))).collect::<Result<_>>()?,
        )),
        _ => Err(bad(format!("not a psi argument: {v}"))),
    }
}

fn phi_to_json(carrier: &Carrier, p: &Phi) -> Value {
    match p {
        Phi::Add(a) => additive_to_json(carrier, a),
        Phi::Square(a) => json!({"kind":"square","of": additive_to_json(carrier, a)}),
        Phi::Combo(parts) => json!({"kind":"sum","terms": parts.iter()
            .map(|(k, q)| json!([pair(*k), phi_to_json(carrier, q)])).collect::<Vec<_>>()}),
    }
}

fn terms(v: &Value) -> Result<Vec<(C64, &Value)>> {
    field(v, "terms")?
        .as_array()
        .ok_or_else(|| bad("\"terms\" must be an array"))?
        .iter()
        .map(|t| match t {
            Value::Array(p) if p.len() == 2 => Ok((scalar(&p[0])?, &p[1])),
            Value::Object(_) => Ok((scalar(field(t, "coef")?)?, field(t, "fn")?)),
            other => Err(bad(format!("bad term {other}"))),
        })
        .collect()
}

fn term_to_json(carrier: &Carrier, t: &Term) -> Value {
    match t {
        Term::Char(chi) => character_to_json(carrier, chi),
        Term::Psi(chi, phi) => {
            json!({"kind":"psi","chi": character_to_json(carrier, chi), "phi": phi_to_json(carrier, phi)})
        }
    }
}

/// Reads a function file.
pub fn fn_from_json(carrier: &Carrier, v: &Value) -> Result<ComplexFn> {
    let kind = field(v, "kind")?.as_str().ok_or_else(|| bad("\"kind\" must be a string"))?;
    match kind {
        "character" => Ok(Lin::chr(&character_from_json(carrier, v)?).into()),
        "psi" => {
            let chi = character_from_json(carrier, field(v, "chi")?)?;
            let phi = phi_from_json(carrier, field(v, "phi")?)?;
            super::psi_extend(carrier, &chi, &phi)
        }
        "table" => {
            let vals = label_map(carrier, field(v, "values")?)?;
            if vals.iter().any(Option::is_none) {
                return Err(bad("function tables must list every element"));
            }
            Ok(ComplexFn::table(vals.into_iter().flatten().collect()))
        }
        "sum" => {
            let parts =
                terms(v)?.into_iter().map(|(k, t)| Ok((k, fn_from_json(carrier, t)?))).collect::<Result<Vec<_>>>()?;
            let refs: Vec<(C64, &ComplexFn)> = parts.iter().map(|(k, f)| (*k, f)).collect();
            Ok(ComplexFn::combine(&refs))
        }
        "zero" => Ok(ComplexFn::zero()),
        other => Err(bad(format!("unknown function kind {other}"))),
    }
}

/// Writes a function file; custom evaluators have no file form.
pub fn fn_to_json(carrier: &Carrier, f: &ComplexFn) -> Result<Value> {
    if let Some(lin) = f.descriptor() {
        if lin.0.is_empty() {
            return Ok(json!({"kind":"zero"}));
        }
        if lin.0.len() == 1 && lin.0[0].0 == ONE {
            return Ok(term_to_json(carrier, &lin.0[0].1));
        }
        let ts: Vec<Value> = lin.0.iter().map(|(k, t)| json!([pair(*k), term_to_json(carrier, t)])).collect();
        return Ok(json!({"kind":"sum","terms": ts}));
    }
    if let Some(t) = f.as_table() {
        let opts: Vec<Option<C64>> = t.iter().copied().map(Some).collect();
        return Ok(json!({"kind":"table","values": table_json(carrier, &opts)}));
    }
    Err(bad("function has no serializable form"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::Element;

    #[test]
    fn spec_examples_parse() {
        let r2 = Carrier::rat_add(2, None).unwrap();
        let chi = fn_from_json(&r2, &json!({"kind":"character","carrier":"r2","form":"exp","b":[1.0,0.0]})).unwrap();
        let x = Element::rat(&[(1, 1), (5, 1)]);
        assert!((chi.eval(&x).unwrap() - C64::new(1f64.exp(), 0.0)).norm() < 1e-12);
        let a = additive_from_json(&r2, &json!({"kind":"additive","form":"linear","alpha":["1/2",0]})).unwrap();
        assert_eq!(a.eval(&x).unwrap(), Some(C64::new(0.5, 0.0)));
        let mul =
            Carrier::from_json(&json!({"kind":"finite","elements":["0","1"],"table":[["0","0"],["0","1"]]})).unwrap();
        let t = fn_from_json(&mul, &json!({"kind":"table","values":{"0":[0,0],"1":[1,0]}})).unwrap();
        assert_eq!(t.eval(&Element::Idx(1)).unwrap(), ONE);
    }

    #[test]
    fn round_trip_sum() {
        let r2 = Carrier::rat_add(2, None).unwrap();
        let chi = Character::exp(vec![C64::new(0.2, 0.1), C64::new(-0.3, 0.0)]);
        let a = AdditiveFn::linear(vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)]);
        let f: ComplexFn = (Lin::chr(&chi) * 2.0 - Lin::psi_sq(&chi, &a) + Lin::psi(&chi, &a)).into();
        let v = fn_to_json(&r2, &f).unwrap();
        let g = fn_from_json(&r2, &v).unwrap();
        for x in r2.window() {
            assert_eq!(f.eval(x).unwrap(), g.eval(x).unwrap());
        }
    }
}
