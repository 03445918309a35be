//! Runtime values, valuations and the finite-domain configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use super::types::Type;

/// An element of a carrier set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub set: Arc<str>,
    pub index: u32,
}

impl Atom {
    pub fn new(set: &str, index: u32) -> Self {
        Atom { set: Arc::from(set), index }
    }

    /// Atoms of `ADDRESS` are `this, ADDRESS1, ADDRESS2, …`; other sets count from 1.
    pub fn display_name(&self) -> String {
        match (&*self.set, self.index) {
            ("ADDRESS", 0) => "this".to_string(),
            ("ADDRESS", i) => format!("ADDRESS{i}"),
            (s, i) => format!("{s}{}", i + 1),
        }
    }

    pub fn parse(set: &str, name: &str, count: u32) -> Option<Atom> {
        (0..count).map(|i| Atom::new(set, i)).find(|a| a.display_name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i128),
    Bool(bool),
    Atom(Atom),
    Pair(Box<Value>, Box<Value>),
    /// Finite set; a set of pairs doubles as a finite map.
    Set(BTreeSet<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn map(entries: impl IntoIterator<Item = (Value, Value)>) -> Value {
        Value::Set(entries.into_iter().map(|(k, v)| Value::pair(k, v)).collect())
    }

    pub fn as_int(&self) -> Option<i128> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    /// Values associated with `key` when `self` is a set of pairs.
    pub fn images<'a>(&'a self, key: &'a Value) -> impl Iterator<Item = &'a Value> + 'a {
        self.as_set().into_iter().flatten().filter_map(move |p| match p {
            Value::Pair(k, v) if **k == *key => Some(&**v),
            _ => None,
        })
    }

    /// True when `self` is a set of pairs with no key repeated.
    pub fn is_function(&self) -> bool {
        let Some(set) = self.as_set() else { return false };
        let mut prev: Option<&Value> = None;
        for p in set {
            let Value::Pair(k, _) = p else { return false };
            if prev == Some(&**k) {
                return false;
            }
            prev = Some(k);
        }
        true
    }

    /// Wire encoding: integers, booleans, atom names, sorted arrays for sets
    /// and sorted `[key, value]` arrays for maps.
    pub fn to_json(&self) -> Json {
        match self {
            Value::Int(n) => match i64::try_from(*n) {
                Ok(n) => Json::from(n),
                Err(_) => Json::String(n.to_string()),
            },
            Value::Bool(b) => Json::Bool(*b),
            Value::Atom(a) => Json::String(a.display_name()),
            Value::Pair(a, b) => Json::Array(vec![a.to_json(), b.to_json()]),
            Value::Set(s) => Json::Array(s.iter().map(Value::to_json).collect()),
        }
    }

    pub fn from_json(json: &Json, ty: &Type, bounds: &Bounds) -> Result<Value, String> {
        match (ty, json) {
            (Type::Int, Json::Number(n)) => {
                n.as_i64().map(|n| Value::Int(n.into())).ok_or_else(|| format!("{n} is not an integer"))
            }
            (Type::Int, Json::String(s)) => s.parse::<i128>().map(Value::Int).map_err(|_| format!("`{s}` is not an integer")),
            (Type::Bool, Json::Bool(b)) => Ok(Value::Bool(*b)),
            (Type::Bool, Json::String(s)) if s == "TRUE" || s == "FALSE" => Ok(Value::Bool(s == "TRUE")),
            (Type::Carrier(set), Json::String(s)) => Atom::parse(set, s, bounds.addr_count)
                .map(Value::Atom)
                .ok_or_else(|| format!("`{s}` is not an element of {set} within bounds")),
            (Type::Prod(a, b), Json::Array(items)) if items.len() == 2 => {
                Ok(Value::pair(Value::from_json(&items[0], a, bounds)?, Value::from_json(&items[1], b, bounds)?))
            }
            (Type::Pow(t), Json::Array(items)) => {
                items.iter().map(|i| Value::from_json(i, t, bounds)).collect::<Result<BTreeSet<_>, _>>().map(Value::Set)
            }
            _ => Err(format!("{json} does not encode a value of type {ty}")),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(true) => f.write_str("TRUE"),
            Value::Bool(false) => f.write_str("FALSE"),
            Value::Atom(a) => f.write_str(&a.display_name()),
            Value::Pair(a, b) => write!(f, "{a} ↦ {b}"),
            Value::Set(s) => {
                if s.is_empty() {
                    return f.write_str("∅");
                }
                f.write_str("{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Bindings from names to values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Valuation(BTreeMap<String, Value>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, v: Value) -> Option<Value> {
        self.0.insert(name.into(), v)
    }

    pub fn remove(&mut self, name: &str) -> Option<Value> {
        self.0.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&mut self, other: &Valuation) {
        for (k, v) in other.iter() {
            self.0.insert(k.clone(), v.clone());
        }
    }

    /// Restriction to `names`, keeping only those bound here.
    pub fn restrict<'a>(&self, names: impl IntoIterator<Item = &'a String>) -> Valuation {
        Valuation(names.into_iter().filter_map(|n| self.0.get(n).map(|v| (n.clone(), v.clone()))).collect())
    }

    /// Binds each carrier set name to its atoms under `bounds`.
    pub fn bind_carriers<'a>(&mut self, sets: impl IntoIterator<Item = &'a String>, bounds: &Bounds) {
        for s in sets {
            let atoms = (0..bounds.addr_count).map(|i| Value::Atom(Atom::new(s, i))).collect();
            self.0.insert(s.clone(), Value::Set(atoms));
        }
    }

    pub fn to_json(&self) -> Json {
        Json::Object(self.0.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
    }
}

impl FromIterator<(String, Value)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Finite-domain configuration for enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Size of every carrier set.
    #[serde(rename = "addr")]
    pub addr_count: u32,
    pub int_lo: i128,
    pub int_hi: i128,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { addr_count: 3, int_lo: 0, int_hi: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid bounds: {0}")]
pub struct BoundsError(pub String);

impl Bounds {
    pub fn new(addr_count: u32, int_lo: i128, int_hi: i128) -> Result<Self, BoundsError> {
        let b = Bounds { addr_count, int_lo, int_hi };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        if self.addr_count < 1 {
            return Err(BoundsError("addr must be at least 1".into()));
        }
        if self.int_lo > self.int_hi {
            return Err(BoundsError(format!("int_lo {} exceeds int_hi {}", self.int_lo, self.int_hi)));
        }
        Ok(())
    }

    /// Whether every value in `self` is also in `other`.
    pub fn within(&self, other: &Bounds) -> bool {
        self.addr_count <= other.addr_count && other.int_lo <= self.int_lo && self.int_hi <= other.int_hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot enumerate values of type {0}")]
pub struct NotEnumerable(pub Type);

/// All values of `ty` within `bounds`, in ascending order.
///
/// `ℙ(A × B)` enumerates partial functions only.
pub fn enumerate(ty: &Type, bounds: &Bounds) -> Result<Vec<Value>, NotEnumerable> {
    Ok(match ty {
        Type::Int => (bounds.int_lo..=bounds.int_hi).map(Value::Int).collect(),
        Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Type::Carrier(s) => (0..bounds.addr_count).map(|i| Value::Atom(Atom::new(s, i))).collect(),
        Type::Prod(a, b) => {
            let bs = enumerate(b, bounds)?;
            let mut out = Vec::new();
            for x in enumerate(a, bounds)? {
                for y in &bs {
                    out.push(Value::pair(x.clone(), y.clone()));
                }
            }
            out
        }
        Type::Pow(inner) => match &**inner {
            Type::Prod(k, v) => {
                let keys = enumerate(k, bounds)?;
                let vals = enumerate(v, bounds)?;
                partial_functions(&keys, &vals, ty)?
            }
            t => {
                let elems = enumerate(t, bounds)?;
                if elems.len() > 20 {
                    return Err(NotEnumerable(ty.clone()));
                }
                let mut out: Vec<Value> = (0u32..(1 << elems.len()))
                    .map(|mask| {
                        Value::Set(
                            elems.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, e)| e.clone()).collect(),
                        )
                    })
                    .collect();
                out.sort();
                out
            }
        },
    })
}

fn partial_functions(keys: &[Value], vals: &[Value], ty: &Type) -> Result<Vec<Value>, NotEnumerable> {
    let choices = vals.len() as u128 + 1;
    let total = choices.checked_pow(keys.len() as u32).filter(|n| *n <= 5_000_000);
    let Some(total) = total else { return Err(NotEnumerable(ty.clone())) };
    let mut out = Vec::with_capacity(total as usize);
    let mut digits = vec![0usize; keys.len()];
    for _ in 0..total {
        out.push(Value::Set(
            digits.iter().zip(keys).filter(|(d, _)| **d > 0).map(|(d, k)| Value::pair(k.clone(), vals[*d - 1].clone())).collect(),
        ));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < choices as usize {
                break;
            }
            *d = 0;
        }
    }
    out.sort();
    Ok(out)
}
