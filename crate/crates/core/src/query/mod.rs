//! First-order queries over the single relation plus comparisons.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! formula  := or ( "->" formula )?
//! or       := and ( "|" and )*
//! and      := unary ( "&" unary )*
//! unary    := "!" unary | ("exists" | "forall") var ("," var)* "." formula
//!           | "(" formula ")" | "true" | "false" | atom
//! atom     := Rel "(" term ("," term)* ")" | term cmp term
//! term     := variable | 'symbol' | "symbol" | integer
//! ```
//!
//! A quantifier's body extends as far right as possible. Bound variable names
//! must be distinct from each other and from the free variables.

mod cnf;
mod eval;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::constraints::{type_builtin, BuiltinAtom, Term};
use crate::error::{CqaError, Result};
use crate::model::{AttrType, Schema, Value};
use crate::syntax::CmpOp;

pub use cnf::{to_cnf, GroundClause};
pub use eval::{eval_fo, PreparedQuery, Truth, World};
pub use parser::{parse_formula, parse_phi, parse_query};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    True,
    False,
    Rel(Vec<Term>),
    Builtin(BuiltinAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn rel(terms: Vec<Term>) -> Formula {
        Formula::Rel(terms)
    }

    pub fn cmp(lhs: Term, op: CmpOp, rhs: Term) -> Formula {
        Formula::Builtin(BuiltinAtom::new(lhs, op, rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `exists vars. body`; with no variables, just `body`.
    pub fn exists(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn forall(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Rel(_) | Formula::Builtin(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn mentions_relation(&self) -> bool {
        match self {
            Formula::Rel(_) => true,
            Formula::True | Formula::False | Formula::Builtin(_) => false,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => {
                f.mentions_relation()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.mentions_relation() || b.mentions_relation()
            }
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(ts) => ts.iter().for_each(|t| term(t, bound, out)),
            Formula::Builtin(b) => {
                term(&b.lhs, bound, out);
                term(&b.rhs, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    /// Every constant mentioned.
    pub fn constants(&self) -> BTreeSet<Value> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(ts) => ts.iter().for_each(&mut *f),
            Formula::Builtin(b) => {
                f(&b.lhs);
                f(&b.rhs);
            }
            Formula::Not(x) | Formula::Exists(_, x) | Formula::Forall(_, x) => x.visit_terms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    fn visit_binders(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::True | Formula::False | Formula::Rel(_) | Formula::Builtin(_) => {}
            Formula::Not(x) => x.visit_binders(f),
            Formula::Exists(vs, x) | Formula::Forall(vs, x) => {
                vs.iter().for_each(|v| f(v));
                x.visit_binders(f);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
        }
    }

    /// Replaces free occurrences of variables by constants.
    pub fn substitute(&self, subst: &BTreeMap<String, Value>) -> Formula {
        let term = |t: &Term| match t {
            Term::Var(v) => subst
                .get(v)
                .map(|c| Term::Const(c.clone()))
                .unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Rel(ts) => Formula::Rel(ts.iter().map(term).collect()),
            Formula::Builtin(b) => Formula::Builtin(BuiltinAtom::new(term(&b.lhs), b.op, term(&b.rhs))),
            Formula::Not(f) => Formula::not(f.substitute(subst)),
            Formula::And(a, b) => Formula::and(a.substitute(subst), b.substitute(subst)),
            Formula::Or(a, b) => Formula::or(a.substitute(subst), b.substitute(subst)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(subst), b.substitute(subst)),
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let mut inner = subst.clone();
                for v in vs {
                    inner.remove(v);
                }
                let body = f.substitute(&inner);
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(vs.clone(), Box::new(body))
                } else {
                    Formula::Forall(vs.clone(), Box::new(body))
                }
            }
        }
    }

    /// Renames variables (free and bound) through `rename`.
    pub fn rename_vars(&self, rename: &impl Fn(&str) -> String) -> Formula {
        let term = |t: &Term| match t {
            Term::Var(v) => Term::Var(rename(v)),
            Term::Const(_) => t.clone(),
        };
        let vars = |vs: &[String]| vs.iter().map(|v| rename(v)).collect::<Vec<_>>();
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Rel(ts) => Formula::Rel(ts.iter().map(term).collect()),
            Formula::Builtin(b) => Formula::Builtin(BuiltinAtom::new(term(&b.lhs), b.op, term(&b.rhs))),
            Formula::Not(f) => Formula::not(f.rename_vars(rename)),
            Formula::And(a, b) => Formula::and(a.rename_vars(rename), b.rename_vars(rename)),
            Formula::Or(a, b) => Formula::or(a.rename_vars(rename), b.rename_vars(rename)),
            Formula::Implies(a, b) => Formula::implies(a.rename_vars(rename), b.rename_vars(rename)),
            Formula::Exists(vs, f) => Formula::Exists(vars(vs), Box::new(f.rename_vars(rename))),
            Formula::Forall(vs, f) => Formula::Forall(vars(vs), Box::new(f.rename_vars(rename))),
        }
    }

    /// Top-level conjuncts, flattening nested `&`.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => vec![other],
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            _ => 5,
        }
    }

    fn fmt_in(&self, f: &mut fmt::Formatter<'_>, relation: &str, ctx: u8) -> fmt::Result {
        let paren = self.prec() < ctx;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::True => f.write_str("true")?,
            Formula::False => f.write_str("false")?,
            Formula::Rel(ts) => {
                write!(f, "{relation}(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")?;
            }
            Formula::Builtin(b) => write!(f, "{b}")?,
            Formula::Not(x) => {
                f.write_str("!")?;
                x.fmt_in(f, relation, 4)?;
            }
            Formula::And(a, b) => {
                a.fmt_in(f, relation, 3)?;
                f.write_str(" & ")?;
                b.fmt_in(f, relation, 4)?;
            }
            Formula::Or(a, b) => {
                a.fmt_in(f, relation, 2)?;
                f.write_str(" | ")?;
                b.fmt_in(f, relation, 3)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_in(f, relation, 2)?;
                f.write_str(" -> ")?;
                b.fmt_in(f, relation, 1)?;
            }
            Formula::Exists(vs, x) | Formula::Forall(vs, x) => {
                let kw = if matches!(self, Formula::Exists(..)) {
                    "exists"
                } else {
                    "forall"
                };
                write!(f, "{kw} {}. ", vs.join(","))?;
                x.fmt_in(f, relation, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }

    /// Renders the formula in query syntax with `relation` as the predicate name.
    pub fn display<'a>(&'a self, relation: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Formula, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_in(f, self.1, 0)
            }
        }
        D(self, relation)
    }
}

/// Which evaluation strategy a query shape admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FragmentTag {
    /// Boolean combination of ground atoms.
    GroundQuantifierFree,
    /// Quantifier-free with free variables.
    OpenQuantifierFree,
    /// A sentence `exists t. R(t) & phi(t)` with `phi` made of comparisons only.
    SingleLiteralExistential,
    General,
}

/// A type-checked query over one schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Query {
    formula: Formula,
    #[serde(skip)]
    schema: Schema,
    free_vars: Vec<String>,
    var_types: BTreeMap<String, AttrType>,
    fragment: FragmentTag,
}

/// The pieces of a single-literal existential sentence: the relation atom's
/// terms and the comparison-only conjuncts beside it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistentialShape {
    pub vars: Vec<String>,
    pub atom: Vec<Term>,
    pub phi: Vec<Formula>,
}

impl Query {
    pub fn new(schema: &Schema, formula: Formula) -> Result<Query> {
        check_atoms(&formula, schema)?;
        let free_vars = formula.free_vars();
        let mut binders = BTreeSet::new();
        let mut clash = None;
        formula.visit_binders(&mut |v| {
            if !binders.insert(v.to_string()) && clash.is_none() {
                clash = Some(format!("variable `{v}` is quantified twice"));
            }
        });
        if let Some(m) = clash {
            return Err(CqaError::Query(m));
        }
        if let Some(v) = free_vars.iter().find(|v| binders.contains(*v)) {
            return Err(CqaError::Query(format!(
                "variable `{v}` occurs both free and quantified"
            )));
        }
        let var_types = infer_types(&formula, schema)?;
        let fragment = classify(&formula, &free_vars);
        Ok(Query {
            formula,
            schema: schema.clone(),
            free_vars,
            var_types,
            fragment,
        })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free_vars
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars.is_empty()
    }

    pub fn var_type(&self, var: &str) -> Option<AttrType> {
        self.var_types.get(var).copied()
    }

    pub fn var_types(&self) -> &BTreeMap<String, AttrType> {
        &self.var_types
    }

    pub fn fragment(&self) -> FragmentTag {
        self.fragment
    }

    pub fn negated(&self) -> Query {
        Query::new(&self.schema, Formula::not(self.formula.clone()))
            .expect("negation preserves well-formedness")
    }

    /// Substitutes constants for the free variables, yielding a sentence.
    pub fn ground(&self, subst: &BTreeMap<String, Value>) -> Result<Query> {
        for v in &self.free_vars {
            let value = subst
                .get(v)
                .ok_or_else(|| CqaError::UnboundVariable(v.clone()))?;
            let want = self.var_types[v];
            if value.ty() != want {
                return Err(CqaError::Type(format!(
                    "variable `{v}` is {want} but was given {}",
                    value.to_dsl()
                )));
            }
        }
        let restricted: BTreeMap<String, Value> = self
            .free_vars
            .iter()
            .map(|v| (v.clone(), subst[v].clone()))
            .collect();
        Query::new(&self.schema, self.formula.substitute(&restricted))
    }

    /// Grounds with values listed in free-variable order.
    pub fn ground_values(&self, values: &[Value]) -> Result<Query> {
        if values.len() != self.free_vars.len() {
            return Err(CqaError::Query(format!(
                "{} values for {} free variables",
                values.len(),
                self.free_vars.len()
            )));
        }
        let subst = self.free_vars.iter().cloned().zip(values.iter().cloned()).collect();
        self.ground(&subst)
    }

    /// Decomposes a `SingleLiteralExistential` sentence.
    pub fn existential_shape(&self) -> Option<ExistentialShape> {
        existential_shape(&self.formula, &self.free_vars)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula.display(self.schema.relation()))
    }
}

fn check_atoms(formula: &Formula, schema: &Schema) -> Result<()> {
    let mut err = None;
    let mut visit = |f: &Formula| {
        if let Formula::Rel(ts) = f {
            if ts.len() != schema.arity() {
                err.get_or_insert(CqaError::Query(format!(
                    "{} has arity {}, atom has {} terms",
                    schema.relation(),
                    schema.arity(),
                    ts.len()
                )));
            }
            for (i, t) in ts.iter().enumerate() {
                if let Term::Const(c) = t {
                    if i < schema.arity() && c.ty() != schema.attr_type(i) {
                        err.get_or_insert(CqaError::Type(format!(
                            "constant {} in {} position {}",
                            c.to_dsl(),
                            schema.attr_type(i),
                            schema.attributes()[i].name
                        )));
                    }
                }
            }
        }
    };
    walk(formula, &mut visit);
    err.map_or(Ok(()), Err)
}

fn walk(f: &Formula, visit: &mut impl FnMut(&Formula)) {
    visit(f);
    match f {
        Formula::Not(x) | Formula::Exists(_, x) | Formula::Forall(_, x) => walk(x, visit),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            walk(a, visit);
            walk(b, visit);
        }
        _ => {}
    }
}

fn infer_types(formula: &Formula, schema: &Schema) -> Result<BTreeMap<String, AttrType>> {
    let mut types: BTreeMap<String, AttrType> = BTreeMap::new();
    let mut builtins = Vec::new();
    let mut all_vars = BTreeSet::new();
    let mut err = None;
    walk(formula, &mut |f| match f {
        Formula::Rel(ts) => {
            for (i, t) in ts.iter().enumerate() {
                if let Term::Var(v) = t {
                    all_vars.insert(v.clone());
                    let want = schema.attr_type(i);
                    if let Some(prev) = types.insert(v.clone(), want) {
                        if prev != want {
                            err.get_or_insert(CqaError::Type(format!(
                                "variable `{v}` occupies both {prev} and {want} positions"
                            )));
                        }
                    }
                }
            }
        }
        Formula::Builtin(b) => {
            for t in [&b.lhs, &b.rhs] {
                if let Term::Var(v) = t {
                    all_vars.insert(v.clone());
                }
            }
            builtins.push(b.clone());
        }
        Formula::Exists(vs, _) | Formula::Forall(vs, _) => all_vars.extend(vs.iter().cloned()),
        _ => {}
    });
    if let Some(e) = err {
        return Err(e);
    }
    // Propagate types through comparisons until nothing changes.
    loop {
        let mut changed = false;
        for b in &builtins {
            let ty_of = |t: &Term, types: &BTreeMap<String, AttrType>| match t {
                Term::Const(c) => Some(c.ty()),
                Term::Var(v) => types.get(v).copied(),
            };
            let (l, r) = (ty_of(&b.lhs, &types), ty_of(&b.rhs, &types));
            for (t, other) in [(&b.lhs, r), (&b.rhs, l)] {
                if let (Term::Var(v), Some(ty)) = (t, other) {
                    if !types.contains_key(v) {
                        types.insert(v.clone(), ty);
                        changed = true;
                    }
                }
            }
            if b.op.is_order() {
                for t in [&b.lhs, &b.rhs] {
                    if let Term::Var(v) = t {
                        if !types.contains_key(v) {
                            types.insert(v.clone(), AttrType::Num);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(v) = all_vars.iter().find(|v| !types.contains_key(*v)) {
        return Err(CqaError::Type(format!(
            "cannot infer a type for variable `{v}`"
        )));
    }
    for b in &builtins {
        type_builtin(b, &types).map_err(CqaError::Type)?;
    }
    Ok(types)
}

fn existential_shape(formula: &Formula, free_vars: &[String]) -> Option<ExistentialShape> {
    if !free_vars.is_empty() {
        return None;
    }
    let Formula::Exists(vars, body) = formula else {
        return None;
    };
    let mut atom = None;
    let mut phi = Vec::new();
    for c in body.conjuncts() {
        match c {
            Formula::Rel(ts) if atom.is_none() => atom = Some(ts.clone()),
            other if other.is_quantifier_free() && !other.mentions_relation() => {
                phi.push(other.clone())
            }
            _ => return None,
        }
    }
    let atom = atom?;
    let atom_vars: BTreeSet<&str> = atom.iter().filter_map(Term::as_var).collect();
    if !vars.iter().all(|v| atom_vars.contains(v.as_str())) {
        return None;
    }
    Some(ExistentialShape {
        vars: vars.clone(),
        atom,
        phi,
    })
}

fn classify(formula: &Formula, free_vars: &[String]) -> FragmentTag {
    if formula.is_quantifier_free() {
        if free_vars.is_empty() {
            FragmentTag::GroundQuantifierFree
        } else {
            FragmentTag::OpenQuantifierFree
        }
    } else if existential_shape(formula, free_vars).is_some() {
        FragmentTag::SingleLiteralExistential
    } else {
        FragmentTag::General
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r3() -> Schema {
        Schema::new(
            "R",
            [("A", AttrType::Sym), ("B", AttrType::Num), ("C", AttrType::Sym)],
        )
        .unwrap()
    }

    #[test]
    fn free_vars_in_first_occurrence_order() {
        let q = parse_query("exists b. R(x, b, y) & x = z", &r3()).unwrap();
        assert_eq!(q.free_vars(), &["x", "y", "z"]);
        assert_eq!(q.var_type("z"), Some(AttrType::Sym));
        assert_eq!(q.fragment(), FragmentTag::General);
    }

    #[test]
    fn rejects_rebinding_and_bad_types() {
        assert!(parse_query("exists x. R(x,1,'c') & exists x. R(x,2,'c')", &r3()).is_err());
        assert!(parse_query("R(x,1,'c') & exists x. R(x,2,'c')", &r3()).is_err());
        assert!(parse_query("R(x, x, 'c')", &r3()).is_err());
        assert!(parse_query("exists a,b,c. R(a,b,c) & a < c", &r3()).is_err());
        assert!(parse_query("R('a', 'b', 'c')", &r3()).is_err());
        assert!(parse_query("x = y", &r3()).is_err());
        assert!(parse_query("R(a, b)", &r3()).is_err());
    }

    #[test]
    fn order_comparison_types_unconstrained_var_as_number() {
        let q = parse_query("x < 3", &r3()).unwrap();
        assert_eq!(q.var_type("x"), Some(AttrType::Num));
    }

    #[test]
    fn classifies_fragments() {
        let tag = |s: &str| parse_query(s, &r3()).unwrap().fragment();
        assert_eq!(tag("R('a',1,'b') | !R('a',2,'b')"), FragmentTag::GroundQuantifierFree);
        assert_eq!(tag("R(x,1,'b') & 1 < 2"), FragmentTag::OpenQuantifierFree);
        assert_eq!(tag("exists x,y,z. R(x,y,z) & y < 5"), FragmentTag::SingleLiteralExistential);
        assert_eq!(tag("exists x,y,z. y < 5 & R(x,y,z) & (x = 'a' | z != 'b')"), FragmentTag::SingleLiteralExistential);
        assert_eq!(tag("exists x,y. R(x,y,'c') & !R(x,y,'d')"), FragmentTag::General);
        assert_eq!(tag("exists x,y,w. R(x,y,'c') & w = 'a'"), FragmentTag::General);
        assert_eq!(tag("forall x,y,z. R(x,y,z)"), FragmentTag::General);
    }

    #[test]
    fn ground_checks_types_and_coverage() {
        let q = parse_query("R(x, n, 'c')", &r3()).unwrap();
        let mut s = BTreeMap::new();
        s.insert("x".to_string(), Value::num(5));
        s.insert("n".to_string(), Value::num(1));
        assert!(matches!(q.ground(&s), Err(CqaError::Type(_))));
        s.insert("x".to_string(), Value::sym("a"));
        let g = q.ground(&s).unwrap();
        assert_eq!(g.to_string(), "R('a',1,'c')");
        assert_eq!(g.fragment(), FragmentTag::GroundQuantifierFree);
        s.remove("n");
        assert!(matches!(q.ground(&s), Err(CqaError::UnboundVariable(_))));
        let sentence = parse_query("R('a',1,'c')", &r3()).unwrap();
        assert_eq!(sentence.ground(&BTreeMap::new()).unwrap(), sentence);
    }

    #[test]
    fn display_round_trips_precedence() {
        for text in [
            "!(exists x. R(x,1,'c')) & (R('a',1,'c') | R('b',1,'c'))",
            "R('a',1,'c') -> R('b',1,'c') -> false",
            "(R('a',1,'c') -> R('b',1,'c')) -> true",
            "R('a',1,'c') | (R('b',1,'c') | R('d',1,'c'))",
            "exists x,y. R(x,y,'c') & !R(x,y,'d') & y >= -2",
            "forall x,y,z. R(x,y,z) -> (exists w. R(w,y,z) & w != x)",
        ] {
            let q = parse_query(text, &r3()).unwrap();
            assert_eq!(q.to_string(), text);
            assert_eq!(parse_query(&q.to_string(), &r3()).unwrap(), q);
        }
    }

    #[test]
    fn ast_serializes_to_json() {
        let q = parse_query("exists x. R(x, 1, 'c')", &r3()).unwrap();
        let json = serde_json::to_value(&q).unwrap();
        assert_eq!(json["fragment"], "single_literal_existential");
        assert!(json["formula"]["exists"].is_array());
    }
}
