//! Denial constraints and functional dependencies.
//!
//! A denial constraint `forall ... not [R(..) & ... & R(..) & builtins]` is
//! stored as its body: relation literals (term vectors) plus a conjunction of
//! comparisons. An FD `X -> Y` compiles to one two-literal denial per
//! attribute of `Y`, with `X`-equality expressed by sharing variables.
//!
//! DSL, one constraint per line, `#` starts a comment line:
//!
//! ```text
//! fd: Name -> City, Street
//! denial: Emp(n,s,m), Emp(m,s2,m2), s > s2
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{CqaError, Result};
use crate::matching::{edge_of, for_each_match, CompiledDenial, TupleStore};
use crate::model::{AttrType, Instance, Schema, Tuple, Value, VertexId};
use crate::syntax::{tokenize, CmpOp, Cursor, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Var(String),
    Const(Value),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(&c.to_dsl()),
        }
    }
}

/// A comparison between two terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BuiltinAtom {
    pub op: CmpOp,
    pub lhs: Term,
    pub rhs: Term,
}

impl BuiltinAtom {
    pub fn new(lhs: Term, op: CmpOp, rhs: Term) -> BuiltinAtom {
        BuiltinAtom { op, lhs, rhs }
    }
}

impl fmt::Display for BuiltinAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op, self.rhs)
    }
}

/// Assigns each variable the type of the positions it occupies and checks
/// builtins against those types.
pub(crate) fn type_builtin(
    b: &BuiltinAtom,
    types: &BTreeMap<String, AttrType>,
) -> Result<AttrType, String> {
    let ty = |t: &Term| -> Result<AttrType, String> {
        match t {
            Term::Const(v) => Ok(v.ty()),
            Term::Var(v) => types
                .get(v)
                .copied()
                .ok_or_else(|| format!("variable `{v}` has no type")),
        }
    };
    let (l, r) = (ty(&b.lhs)?, ty(&b.rhs)?);
    if l != r {
        return Err(format!("`{b}` compares {l} with {r}"));
    }
    if b.op.is_order() && l != AttrType::Num {
        return Err(format!("`{b}` orders symbols; order comparisons need numbers"));
    }
    Ok(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Origin {
    Denial,
    /// Compiled from `fds[fd]`, guarding right-hand-side attribute `attribute`.
    Fd { fd: usize, attribute: usize },
}

/// The body of `forall ... not [R(x1) & ... & R(xm) & phi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DenialConstraint {
    literals: Vec<Vec<Term>>,
    builtins: Vec<BuiltinAtom>,
    origin: Origin,
}

impl DenialConstraint {
    /// Validates arity, typing and safety against `schema`.
    pub fn new(
        schema: &Schema,
        literals: Vec<Vec<Term>>,
        builtins: Vec<BuiltinAtom>,
    ) -> Result<DenialConstraint> {
        if literals.is_empty() {
            return Err(CqaError::Constraint(
                "a denial constraint needs at least one relation literal".into(),
            ));
        }
        let mut types: BTreeMap<String, AttrType> = BTreeMap::new();
        for lit in &literals {
            if lit.len() != schema.arity() {
                return Err(CqaError::Constraint(format!(
                    "literal of arity {} for {} of arity {}",
                    lit.len(),
                    schema.relation(),
                    schema.arity()
                )));
            }
            for (pos, t) in lit.iter().enumerate() {
                let want = schema.attr_type(pos);
                match t {
                    Term::Const(v) if v.ty() != want => {
                        return Err(CqaError::Type(format!(
                            "constant {} in {} position {}",
                            v.to_dsl(),
                            want,
                            schema.attributes()[pos].name
                        )))
                    }
                    Term::Const(_) => {}
                    Term::Var(name) => match types.insert(name.clone(), want) {
                        Some(prev) if prev != want => {
                            return Err(CqaError::Type(format!(
                                "variable `{name}` occupies both {prev} and {want} positions"
                            )))
                        }
                        _ => {}
                    },
                }
            }
        }
        for b in &builtins {
            for t in [&b.lhs, &b.rhs] {
                if let Term::Var(v) = t {
                    if !types.contains_key(v) {
                        return Err(CqaError::Constraint(format!(
                            "unsafe variable `{v}` in `{b}`: it occurs in no relation literal"
                        )));
                    }
                }
            }
            type_builtin(b, &types).map_err(CqaError::Type)?;
        }
        Ok(DenialConstraint {
            literals,
            builtins,
            origin: Origin::Denial,
        })
    }

    pub fn literals(&self) -> &[Vec<Term>] {
        &self.literals
    }

    pub fn builtins(&self) -> &[BuiltinAtom] {
        &self.builtins
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn display<'a>(&'a self, schema: &'a Schema) -> impl fmt::Display + 'a {
        DenialDisplay { c: self, schema }
    }
}

struct DenialDisplay<'a> {
    c: &'a DenialConstraint,
    schema: &'a Schema,
}

impl fmt::Display for DenialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for lit in &self.c.literals {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}(", self.schema.relation())?;
            for (i, t) in lit.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        for b in &self.c.builtins {
            write!(f, ", {b}")?;
        }
        Ok(())
    }
}

/// A functional dependency over attribute positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Fd {
    lhs: Vec<usize>,
    rhs: Vec<usize>,
}

impl Fd {
    pub fn new(
        schema: &Schema,
        lhs: impl IntoIterator<Item = usize>,
        rhs: impl IntoIterator<Item = usize>,
    ) -> Result<Fd> {
        let lhs: BTreeSet<usize> = lhs.into_iter().collect();
        let rhs: BTreeSet<usize> = rhs.into_iter().collect();
        if rhs.is_empty() {
            return Err(CqaError::Constraint("FD with empty right-hand side".into()));
        }
        if let Some(p) = lhs.iter().chain(&rhs).find(|&&p| p >= schema.arity()) {
            return Err(CqaError::Constraint(format!(
                "FD position {p} outside arity {}",
                schema.arity()
            )));
        }
        if let Some(&p) = lhs.intersection(&rhs).next() {
            return Err(CqaError::Constraint(format!(
                "attribute {} on both sides of an FD",
                schema.attributes()[p].name
            )));
        }
        Ok(Fd {
            lhs: lhs.into_iter().collect(),
            rhs: rhs.into_iter().collect(),
        })
    }

    pub fn by_names(schema: &Schema, lhs: &[&str], rhs: &[&str]) -> Result<Fd> {
        let pos = |n: &&str| {
            schema
                .position(n)
                .ok_or_else(|| CqaError::Constraint(format!("unknown attribute `{n}`")))
        };
        let l = lhs.iter().map(pos).collect::<Result<Vec<_>>>()?;
        let r = rhs.iter().map(pos).collect::<Result<Vec<_>>>()?;
        Fd::new(schema, l, r)
    }

    /// Parses `A,B -> C,D`.
    pub fn parse(text: &str, schema: &Schema) -> Result<Fd> {
        let mut cur = Cursor::new(tokenize(text, 1)?);
        let fd = parse_fd_body(&mut cur, schema)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input after FD"));
        }
        Ok(fd)
    }

    pub fn lhs(&self) -> &[usize] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[usize] {
        &self.rhs
    }

    /// Textbook check: any two tuples agreeing on `lhs` agree on `rhs`.
    pub fn holds_in(&self, instance: &Instance) -> bool {
        let mut seen: std::collections::HashMap<Vec<&Value>, Vec<&Value>> = Default::default();
        for t in instance.tuples() {
            let key: Vec<&Value> = self.lhs.iter().map(|&p| &t[p]).collect();
            let val: Vec<&Value> = self.rhs.iter().map(|&p| &t[p]).collect();
            match seen.get(&key) {
                Some(prev) if *prev != val => return false,
                Some(_) => {}
                None => {
                    seen.insert(key, val);
                }
            }
        }
        true
    }

    pub fn display<'a>(&'a self, schema: &'a Schema) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Fd, &'a Schema);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let names = |ps: &[usize]| {
                    ps.iter()
                        .map(|&p| self.1.attributes()[p].name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                let lhs = names(&self.0.lhs);
                if lhs.is_empty() {
                    write!(f, "-> {}", names(&self.0.rhs))
                } else {
                    write!(f, "{lhs} -> {}", names(&self.0.rhs))
                }
            }
        }
        D(self, schema)
    }
}

/// Compiles an FD into one denial constraint per right-hand-side attribute:
/// `not [R(x..) & R(x'..) & y_A != y'_A]` with the `lhs` positions sharing
/// variables between the two literals.
pub fn fd_to_denial(fd: &Fd, schema: &Schema) -> Vec<DenialConstraint> {
    let first: Vec<Term> = (0..schema.arity()).map(|i| Term::Var(format!("x{i}"))).collect();
    let second: Vec<Term> = (0..schema.arity())
        .map(|i| {
            if fd.lhs.contains(&i) {
                Term::Var(format!("x{i}"))
            } else {
                Term::Var(format!("y{i}"))
            }
        })
        .collect();
    fd.rhs
        .iter()
        .map(|&a| DenialConstraint {
            literals: vec![first.clone(), second.clone()],
            builtins: vec![BuiltinAtom::new(
                Term::Var(format!("x{a}")),
                CmpOp::Ne,
                Term::Var(format!("y{a}")),
            )],
            origin: Origin::Denial,
        })
        .collect()
}

/// A validated set of constraints over one schema. FDs are kept in FD form
/// alongside their compiled denials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintSet {
    schema: Schema,
    fds: Vec<Fd>,
    denials: Vec<DenialConstraint>,
}

impl ConstraintSet {
    pub fn new(schema: Schema) -> ConstraintSet {
        ConstraintSet {
            schema,
            fds: Vec::new(),
            denials: Vec::new(),
        }
    }

    pub fn with_fds(schema: Schema, fds: impl IntoIterator<Item = Fd>) -> ConstraintSet {
        let mut cs = ConstraintSet::new(schema);
        for fd in fds {
            cs.add_fd(fd);
        }
        cs
    }

    pub fn add_fd(&mut self, fd: Fd) {
        let index = self.fds.len();
        for (mut d, &attribute) in fd_to_denial(&fd, &self.schema).into_iter().zip(&fd.rhs) {
            d.origin = Origin::Fd {
                fd: index,
                attribute,
            };
            self.denials.push(d);
        }
        self.fds.push(fd);
    }

    pub fn add_denial(&mut self, d: DenialConstraint) {
        self.denials.push(DenialConstraint {
            origin: Origin::Denial,
            ..d
        });
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn fds(&self) -> &[Fd] {
        &self.fds
    }

    /// Every constraint in denial form, compiled FDs included.
    pub fn denials(&self) -> &[DenialConstraint] {
        &self.denials
    }

    pub fn is_empty(&self) -> bool {
        self.denials.is_empty()
    }

    /// The FD, when the set consists of exactly one FD and nothing else.
    pub fn single_fd(&self) -> Option<&Fd> {
        let only_fd = self
            .denials
            .iter()
            .all(|d| matches!(d.origin, Origin::Fd { .. }));
        match self.fds.as_slice() {
            [fd] if only_fd => Some(fd),
            _ => None,
        }
    }

    pub(crate) fn compile(&self) -> Vec<CompiledDenial> {
        self.denials.iter().map(CompiledDenial::new).collect()
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fd in &self.fds {
            writeln!(f, "fd: {}", fd.display(&self.schema))?;
        }
        for d in self.denials.iter().filter(|d| d.origin == Origin::Denial) {
            writeln!(f, "denial: {}", d.display(&self.schema))?;
        }
        Ok(())
    }
}

fn parse_fd_body(cur: &mut Cursor, schema: &Schema) -> Result<Fd> {
    let side = |cur: &mut Cursor, stop: &Tok| -> Result<Vec<usize>> {
        let mut out = Vec::new();
        if cur.peek() == stop {
            return Ok(out);
        }
        loop {
            let here = cur.here().clone();
            let name = cur.expect_ident()?;
            let pos = schema.position(&name).ok_or_else(|| {
                CqaError::syntax(
                    here.line,
                    here.column,
                    format!("unknown attribute `{name}` of {}", schema.relation()),
                )
            })?;
            out.push(pos);
            if !cur.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    };
    let lhs = side(cur, &Tok::Arrow)?;
    cur.expect(&Tok::Arrow)?;
    let rhs = side(cur, &Tok::Eof)?;
    Fd::new(schema, lhs, rhs)
}

pub(crate) fn parse_term(cur: &mut Cursor) -> Result<Term> {
    match cur.peek().clone() {
        Tok::Ident(name) => {
            cur.bump();
            Ok(Term::Var(name))
        }
        Tok::Str(s) => {
            cur.bump();
            Ok(Term::Const(Value::sym(&s)))
        }
        Tok::Int(n) => {
            cur.bump();
            Ok(Term::Const(Value::Num(n)))
        }
        other => Err(cur.error(format!("expected a term, found {}", other.describe()))),
    }
}

pub(crate) fn parse_term_list(cur: &mut Cursor) -> Result<Vec<Term>> {
    cur.expect(&Tok::LParen)?;
    let mut terms = Vec::new();
    if cur.eat(&Tok::RParen) {
        return Ok(terms);
    }
    loop {
        terms.push(parse_term(cur)?);
        if cur.eat(&Tok::RParen) {
            return Ok(terms);
        }
        cur.expect(&Tok::Comma)?;
    }
}

fn parse_denial_body(cur: &mut Cursor, schema: &Schema) -> Result<DenialConstraint> {
    let start = cur.here().clone();
    let mut literals = Vec::new();
    let mut builtins = Vec::new();
    if cur.at_end() {
        return Err(cur.error("empty denial constraint"));
    }
    loop {
        let here = cur.here().clone();
        match (cur.peek().clone(), cur.peek_at(1).clone()) {
            (Tok::Ident(name), Tok::LParen) => {
                cur.bump();
                if name != schema.relation() {
                    return Err(CqaError::syntax(
                        here.line,
                        here.column,
                        format!("unknown relation `{name}` (schema is {})", schema.relation()),
                    ));
                }
                let terms = parse_term_list(cur)?;
                if terms.len() != schema.arity() {
                    return Err(CqaError::syntax(
                        here.line,
                        here.column,
                        format!("{name} has arity {}, found {} terms", schema.arity(), terms.len()),
                    ));
                }
                literals.push(terms);
            }
            _ => {
                let lhs = parse_term(cur)?;
                let op = match cur.bump() {
                    Tok::Cmp(op) => op,
                    other => {
                        return Err(CqaError::syntax(
                            here.line,
                            here.column,
                            format!("expected a comparison after `{lhs}`, found {}", other.describe()),
                        ))
                    }
                };
                let rhs = parse_term(cur)?;
                builtins.push(BuiltinAtom::new(lhs, op, rhs));
            }
        }
        if cur.at_end() {
            break;
        }
        cur.expect(&Tok::Comma)?;
    }
    DenialConstraint::new(schema, literals, builtins).map_err(|e| match e {
        CqaError::Constraint(m) | CqaError::Type(m) => CqaError::syntax(start.line, start.column, m),
        other => other,
    })
}

/// Parses the constraint DSL against `schema`.
pub fn parse_constraints(dsl_text: &str, schema: &Schema) -> Result<ConstraintSet> {
    let mut cs = ConstraintSet::new(schema.clone());
    for (idx, raw) in dsl_text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cur = Cursor::new(tokenize(raw, line)?);
        let kind = cur.expect_ident()?;
        cur.expect(&Tok::Colon)?;
        match kind.as_str() {
            "fd" => {
                let here = cur.here().clone();
                let fd = parse_fd_body(&mut cur, schema).map_err(|e| match e {
                    CqaError::Constraint(m) => CqaError::syntax(here.line, here.column, m),
                    other => other,
                })?;
                cs.add_fd(fd);
            }
            "denial" => {
                let d = parse_denial_body(&mut cur, schema)?;
                cs.add_denial(d);
            }
            other => {
                return Err(CqaError::syntax(
                    line,
                    1,
                    format!("unknown constraint kind `{other}` (expected `fd` or `denial`)"),
                ))
            }
        }
        if !cur.at_end() {
            return Err(cur.error(format!("unexpected {}", cur.peek().describe())));
        }
    }
    Ok(cs)
}

/// Calls `visit` with every violating vertex set of `c` in `instance`, once
/// per substitution (so the same set may repeat).
pub fn for_each_violation<F>(instance: &Instance, c: &DenialConstraint, mut visit: F)
where
    F: FnMut(&[VertexId]) -> ControlFlow<()>,
{
    let compiled = [CompiledDenial::new(c)];
    let store = TupleStore::full(instance.tuples(), &compiled);
    let _ = for_each_match(&compiled[0], &store, None, |chosen| visit(&edge_of(chosen)));
}

/// All tuple sets jointly violating `c`, deduplicated and in canonical order.
pub fn violations(instance: &Instance, c: &DenialConstraint) -> Vec<Vec<Tuple>> {
    let mut sets: BTreeSet<Vec<VertexId>> = BTreeSet::new();
    for_each_violation(instance, c, |e| {
        sets.insert(e.to_vec());
        ControlFlow::Continue(())
    });
    sets.into_iter()
        .map(|e| e.into_iter().map(|v| instance.tuple(v).clone()).collect())
        .collect()
}

/// `r |= F`: no constraint has a violating substitution.
pub fn is_consistent(instance: &Instance, cs: &ConstraintSet) -> bool {
    let compiled = cs.compile();
    let store = TupleStore::full(instance.tuples(), &compiled);
    compiled
        .iter()
        .all(|c| for_each_match(c, &store, None, |_| ControlFlow::Break(())).is_continue())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csv::parse_instance;

    fn person() -> Schema {
        Schema::new(
            "Person",
            [
                ("Name", AttrType::Sym),
                ("City", AttrType::Sym),
                ("Street", AttrType::Sym),
            ],
        )
        .unwrap()
    }

    fn emp() -> Schema {
        Schema::new(
            "Emp",
            [("N", AttrType::Sym), ("S", AttrType::Num), ("M", AttrType::Sym)],
        )
        .unwrap()
    }

    fn person_instance() -> Instance {
        parse_instance(
            "Name,City,Street\nBrown,Amherst,115 Klein\nBrown,Amherst,120 Maple\nGreen,Clarence,4000 Transit\n",
            &person(),
        )
        .unwrap()
    }

    fn t(vals: &[&str]) -> Tuple {
        Tuple::new(vals.iter().map(|&v| Value::sym(v)).collect())
    }

    #[test]
    fn parses_person_fd() {
        let cs = parse_constraints("# key\nfd: Name -> City, Street\n", &person()).unwrap();
        assert_eq!(cs.fds().len(), 1);
        assert_eq!(cs.fds()[0].lhs(), &[0]);
        assert_eq!(cs.fds()[0].rhs(), &[1, 2]);
        assert_eq!(cs.denials().len(), 2);
        assert!(cs.single_fd().is_some());
    }

    #[test]
    fn parses_salary_denial() {
        let cs = parse_constraints("denial: Emp(n,s,m), Emp(m,s2,m2), s > s2", &emp()).unwrap();
        let d = &cs.denials()[0];
        assert_eq!(d.literals().len(), 2);
        assert_eq!(d.builtins()[0].op, CmpOp::Gt);
        assert!(cs.single_fd().is_none());
    }

    #[test]
    fn rejects_bad_constraints() {
        let e = |s: &str| parse_constraints(s, &emp()).unwrap_err();
        assert!(matches!(e("denial: s > s2"), CqaError::Syntax { .. }));
        assert!(e("denial: s > s2").to_string().contains("relation literal"));
        assert!(e("denial:").to_string().contains("empty"));
        assert!(e("denial: Emp(n,s,m), n < m").to_string().contains("order"));
        assert!(e("denial: Emp(n,s,m), Emp(s,n,m)").to_string().contains("occupies"));
        assert!(e("denial: Emp(n,s,m), k = n").to_string().contains("unsafe"));
        assert!(e("denial: Foo(n,s,m)").to_string().contains("unknown relation"));
        assert!(e("fd: Q -> S").to_string().contains("unknown attribute"));
        assert!(e("fd: N -> N").to_string().contains("both sides"));
        assert!(e("fd: N ->").to_string().contains("empty"));
        match e("\n\nfd: N -> Zed") {
            CqaError::Syntax { at, .. } => assert_eq!((at.line, at.column), (3, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fd_compiles_one_denial_per_rhs_attribute() {
        let s = Schema::new(
            "R",
            [("A", AttrType::Sym), ("B", AttrType::Sym), ("C", AttrType::Sym)],
        )
        .unwrap();
        let fd = Fd::by_names(&s, &["A"], &["B", "C"]).unwrap();
        let ds = fd_to_denial(&fd, &s);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[0].display(&s).to_string(), "R(x0,x1,x2), R(x0,y1,y2), x1 != y1");
        assert_eq!(ds[1].display(&s).to_string(), "R(x0,x1,x2), R(x0,y1,y2), x2 != y2");
    }

    #[test]
    fn person_fd_violation_is_the_brown_pair() {
        let r = person_instance();
        let cs = parse_constraints("fd: Name -> City, Street", &person()).unwrap();
        let mut all = BTreeSet::new();
        for d in cs.denials() {
            all.extend(violations(&r, d));
        }
        let expected = vec![
            t(&["Brown", "Amherst", "115 Klein"]),
            t(&["Brown", "Amherst", "120 Maple"]),
        ];
        assert_eq!(all, BTreeSet::from([expected]));
        assert!(!is_consistent(&r, &cs));
        let without_first = Instance::new(person(), r.tuples()[1..].to_vec()).unwrap();
        assert!(is_consistent(&without_first, &cs));
        assert!(is_consistent(&Instance::empty(person()), &cs));
    }

    #[test]
    fn salary_violation() {
        let cs = parse_constraints("denial: Emp(n,s,m), Emp(m,s2,m2), s > s2", &emp()).unwrap();
        let row = |n: &str, s: i64, m: &str| Tuple::new(vec![n.into(), s.into(), m.into()]);
        let r = Instance::new(emp(), [row("a", 10, "b"), row("b", 5, "c")]).unwrap();
        let v = violations(&r, &cs.denials()[0]);
        assert_eq!(v, vec![vec![row("a", 10, "b"), row("b", 5, "c")]]);
    }

    #[test]
    fn non_injective_substitution_gives_singleton_edge() {
        let s = Schema::new(
            "R",
            [("A", AttrType::Sym), ("B", AttrType::Sym), ("C", AttrType::Sym)],
        )
        .unwrap();
        let cs = parse_constraints("denial: R(x,y,z), x = y", &s).unwrap();
        let r = Instance::new(s.clone(), [t(&["a", "a", "b"]), t(&["a", "b", "b"])]).unwrap();
        assert_eq!(violations(&r, &cs.denials()[0]), vec![vec![t(&["a", "a", "b"])]]);
    }

    #[test]
    fn constants_inside_literals() {
        let s = Schema::new("R", [("A", AttrType::Sym), ("B", AttrType::Num)]).unwrap();
        let cs = parse_constraints("denial: R('a', n), R(x, m), n < m", &s).unwrap();
        let row = |a: &str, n: i64| Tuple::new(vec![a.into(), n.into()]);
        let r = Instance::new(s, [row("a", 1), row("b", 2), row("b", 0)]).unwrap();
        assert_eq!(
            violations(&r, &cs.denials()[0]),
            vec![vec![row("a", 1), row("b", 2)]]
        );
    }

    #[test]
    fn display_round_trips() {
        let text = "fd: N -> S\ndenial: Emp(n,s,'boss'), Emp(m,s2,n), s > s2, m != 'x'\n";
        let cs = parse_constraints(text, &emp()).unwrap();
        assert_eq!(cs.to_string(), text);
        assert_eq!(parse_constraints(&cs.to_string(), &emp()).unwrap(), cs);
    }
}
