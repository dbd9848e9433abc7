//! Values, tuples, schemas and relation instances.
//!
//! An [`Instance`] keeps its tuples sorted and duplicate-free. The position of a
//! tuple in that canonical order doubles as its vertex id in the conflict
//! hypergraph, so every module that talks about "tuple 3" means the same tuple.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{CqaError, Result};

/// The two disjoint value domains: uninterpreted symbols and integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrType {
    Sym,
    Num,
}

impl AttrType {
    pub fn parse(s: &str) -> Option<AttrType> {
        match s {
            "sym" => Some(AttrType::Sym),
            "num" => Some(AttrType::Num),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AttrType::Sym => "sym",
            AttrType::Num => "num",
        }
    }
}

impl fmt::Display for AttrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A database constant. A `Sym` never equals a `Num`; two symbols are equal
/// exactly when their names are.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Sym(Arc<str>),
    Num(BigInt),
}

impl Value {
    pub fn sym(name: &str) -> Value {
        Value::Sym(Arc::from(name))
    }

    pub fn num(n: impl Into<BigInt>) -> Value {
        Value::Num(n.into())
    }

    pub fn ty(&self) -> AttrType {
        match self {
            Value::Sym(_) => AttrType::Sym,
            Value::Num(_) => AttrType::Num,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Value::Sym(s) => Some(s),
            Value::Num(_) => None,
        }
    }

    pub fn as_num(&self) -> Option<&BigInt> {
        match self {
            Value::Num(n) => Some(n),
            Value::Sym(_) => None,
        }
    }

    /// Renders the value in the query/constraint DSL: symbols single-quoted,
    /// numbers bare.
    pub fn to_dsl(&self) -> String {
        match self {
            Value::Num(n) => n.to_string(),
            Value::Sym(s) => {
                if s.contains('\'') && !s.contains('"') {
                    format!("\"{s}\"")
                } else {
                    format!("'{}'", s.replace('\'', "''"))
                }
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Sym(s) => serde_json::Value::String(s.to_string()),
            Value::Num(n) => match n.to_i64() {
                Some(i) => serde_json::Value::from(i),
                None => serde_json::Value::String(n.to_string()),
            },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Sym(s) => f.write_str(s),
            Value::Num(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::sym(s)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::num(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Attribute {
    pub name: String,
    pub ty: AttrType,
}

/// A single relation schema `R(U)` with typed attributes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Schema {
    relation: String,
    attributes: Vec<Attribute>,
}

impl Schema {
    pub fn new(
        relation: impl Into<String>,
        attributes: impl IntoIterator<Item = (impl Into<String>, AttrType)>,
    ) -> Result<Schema> {
        let relation = relation.into();
        if !is_identifier(&relation) {
            return Err(CqaError::Schema(format!(
                "relation name `{relation}` is not an identifier"
            )));
        }
        let attributes: Vec<Attribute> = attributes
            .into_iter()
            .map(|(name, ty)| Attribute {
                name: name.into(),
                ty,
            })
            .collect();
        if attributes.is_empty() {
            return Err(CqaError::Schema(format!(
                "relation `{relation}` needs at least one attribute"
            )));
        }
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if !is_identifier(&a.name) {
                return Err(CqaError::Schema(format!(
                    "attribute name `{}` is not an identifier",
                    a.name
                )));
            }
            if !seen.insert(a.name.as_str()) {
                return Err(CqaError::Schema(format!(
                    "duplicate attribute `{}`",
                    a.name
                )));
            }
        }
        Ok(Schema {
            relation,
            attributes,
        })
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attr_type(&self, position: usize) -> AttrType {
        self.attributes[position].ty
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Same attributes under another relation name.
    pub fn renamed(&self, relation: impl Into<String>) -> Result<Schema> {
        Schema::new(
            relation,
            self.attributes.iter().map(|a| (a.name.clone(), a.ty)),
        )
    }

    /// Checks that `values` is a well-typed tuple of this schema.
    pub fn check_tuple(&self, values: &[Value]) -> Result<()> {
        if values.len() != self.arity() {
            return Err(CqaError::Type(format!(
                "tuple of arity {} for relation {} of arity {}",
                values.len(),
                self.relation,
                self.arity()
            )));
        }
        for (v, a) in values.iter().zip(&self.attributes) {
            if v.ty() != a.ty {
                return Err(CqaError::Type(format!(
                    "value {} is {} but attribute {} is {}",
                    v.to_dsl(),
                    v.ty(),
                    a.name,
                    a.ty
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, a) in self.attributes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", a.name, a.ty)?;
        }
        f.write_str(")")
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple(Vec<Value>);

impl Tuple {
    pub fn new(values: Vec<Value>) -> Tuple {
        Tuple(values)
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn into_values(self) -> Vec<Value> {
        self.0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.0.iter().map(Value::to_json).collect())
    }
}

impl std::ops::Index<usize> for Tuple {
    type Output = Value;
    fn index(&self, i: usize) -> &Value {
        &self.0[i]
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Tuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Index of a tuple in an instance's canonical order.
pub type VertexId = u32;

/// A finite, duplicate-free set of tuples over one schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    schema: Schema,
    tuples: Vec<Tuple>,
}

impl Instance {
    /// Builds an instance, collapsing duplicate tuples.
    pub fn new(schema: Schema, tuples: impl IntoIterator<Item = Tuple>) -> Result<Instance> {
        let mut tuples: Vec<Tuple> = tuples.into_iter().collect();
        for t in &tuples {
            schema.check_tuple(t.values())?;
        }
        tuples.sort_unstable();
        tuples.dedup();
        if tuples.len() > VertexId::MAX as usize {
            return Err(CqaError::Schema("instance has too many tuples".into()));
        }
        Ok(Instance { schema, tuples })
    }

    pub fn empty(schema: Schema) -> Instance {
        Instance {
            schema,
            tuples: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Tuples in canonical (sorted) order.
    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.vertex_of(t).is_some()
    }

    pub fn vertex_of(&self, t: &Tuple) -> Option<VertexId> {
        self.tuples
            .binary_search(t)
            .ok()
            .map(|i| i as VertexId)
    }

    pub fn tuple(&self, v: VertexId) -> &Tuple {
        &self.tuples[v as usize]
    }

    /// The sub-instance made of the given vertices.
    pub fn restrict(&self, vertices: impl IntoIterator<Item = VertexId>) -> Instance {
        let mut tuples: Vec<Tuple> = vertices
            .into_iter()
            .map(|v| self.tuples[v as usize].clone())
            .collect();
        tuples.sort_unstable();
        tuples.dedup();
        Instance {
            schema: self.schema.clone(),
            tuples,
        }
    }

    pub fn active_domain(&self) -> BTreeSet<Value> {
        active_domain(self)
    }
}

/// Every value occurring in some tuple of the instance.
pub fn active_domain(instance: &Instance) -> BTreeSet<Value> {
    instance
        .tuples
        .iter()
        .flat_map(|t| t.values().iter().cloned())
        .collect()
}
