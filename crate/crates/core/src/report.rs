//! Structured reports with a JSON and a `key: value` rendering.
//!
//! Both renderings are produced from the same [`serde_json::Value`], so they
//! cannot disagree. Rationals are strings `p/q` in lowest terms; integers
//! are JSON numbers when they fit in `i64`.

use num_bigint::BigInt;
use serde_json::{Map, Value};

use crate::cycles::{CycleConfig, Decomposition, Divisor};
use crate::twistor::{AdimReport, Derivation};
use crate::Rational;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn value(&self) -> Value {
        Value::Object(self.fields.clone())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value()).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut lines = Vec::new();
        for (k, v) in &self.fields {
            flatten(k, v, &mut lines);
        }
        let mut out = String::new();
        for (k, v) in lines {
            out.push_str(&format!("{k}: {v}\n"));
        }
        out
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.to_json()
        } else {
            self.to_human()
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Dotted `key: value` pairs; scalar arrays are printed inline as tuples.
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&format!("{prefix}.{k}"), inner, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| scalar(x).is_some()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            out.push((prefix.to_string(), format!("({})", parts.join(", "))));
        }
        Value::Array(items) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), inner, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other).expect("scalar"))),
    }
}

pub fn rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

pub fn integer(i: &BigInt) -> Value {
    match i64::try_from(i) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(i.to_string()),
    }
}

pub fn integers(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(integer).collect())
}

pub fn divisor(d: &Divisor<Rational>) -> Value {
    Value::Array(d.coeffs().iter().map(rational).collect())
}

pub fn one_based(idx: &[usize]) -> Value {
    Value::Array(idx.iter().map(|i| Value::from(i + 1)).collect())
}

pub fn config(c: &CycleConfig) -> Value {
    let mut m = Map::new();
    m.insert("self_ints".into(), Value::from(c.self_ints().to_vec()));
    m.insert("k".into(), c.k().map_or(Value::Null, Value::from));
    m.insert("n".into(), c.stored_n().map_or(Value::Null, Value::from));
    m.insert("k_squared".into(), Value::from(c.c_squared()));
    Value::Object(m)
}

/// `decomposition`, `m0`, `l` and `d` fields of a decomposition.
pub fn add_decomposition(r: &mut Report, z: &Decomposition<Rational>) {
    let mut dm = Map::new();
    dm.insert("p".into(), divisor(&z.p));
    dm.insert("n".into(), divisor(&z.n_part));
    dm.insert("support".into(), one_based(&z.support));
    dm.insert("p_dot".into(), Value::Array(z.p_dot.iter().map(rational).collect()));
    r.insert("decomposition", Value::Object(dm));
    match z.m0_coefficients() {
        Ok((m0, l)) => {
            r.insert("m0", integer(&m0));
            r.insert("l", integers(&l));
        }
        Err(_) => {
            r.insert("m0", Value::Null);
            r.insert("l", Value::Null);
        }
    }
    r.insert("d", rational(&z.d));
}

pub fn derivation(d: &Derivation) -> Value {
    serde_json::to_value(d).expect("derivations serialize")
}

pub fn adim(a: &AdimReport, n: i64) -> Report {
    let mut r = Report::new();
    r.insert("verdict", a.verdict.as_str());
    r.insert("a", a.verdict.algebraic_dimension().map_or(Value::Null, Value::from));
    r.insert("branch", a.branch);
    r.insert("reason", a.reason.as_str());
    r.insert("n", n);
    r.insert("generic_kodaira", a.generic_kodaira);
    r.insert("a_upper_bound", 1 + a.generic_kodaira);
    r.insert("bound_respected", a.respects_bound());
    if let Some(z) = &a.decomposition {
        add_decomposition(&mut r, z);
    }
    r.insert(
        "derivations",
        Value::Array(a.derivations.iter().map(derivation).collect()),
    );
    r
}
