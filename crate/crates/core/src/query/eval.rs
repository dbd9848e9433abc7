//! Kleene three-valued evaluation under active-domain semantics.
//!
//! Formulas are compiled to negation normal form, quantifiers are pushed
//! inward where that is sound, and each quantifier enumerates bindings from a
//! guarding relation atom when one is available (positive for `exists`,
//! negative for `forall`), falling back to the typed domain otherwise.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::ControlFlow;

use serde::Serialize;

use super::{Formula, Query};
use crate::constraints::Term;
use crate::error::{CqaError, Result};
use crate::model::{AttrType, Instance, Tuple, Value};
use crate::syntax::CmpOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    False,
    Unknown,
    True,
}

impl Truth {
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Truth {
        match self {
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
            Truth::True => Truth::False,
        }
    }
}

impl From<bool> for Truth {
    fn from(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Membership<'a> {
    All,
    Members(&'a [bool]),
    Partial(&'a [Truth]),
}

/// A sub-instance of `instance`, possibly only partly decided. Tuples outside
/// the instance are always absent.
#[derive(Debug, Clone, Copy)]
pub struct World<'a> {
    instance: &'a Instance,
    membership: Membership<'a>,
}

impl<'a> World<'a> {
    pub fn full(instance: &'a Instance) -> World<'a> {
        World {
            instance,
            membership: Membership::All,
        }
    }

    /// `members[v]` says whether vertex `v` is present.
    pub fn subset(instance: &'a Instance, members: &'a [bool]) -> World<'a> {
        assert_eq!(members.len(), instance.len());
        World {
            instance,
            membership: Membership::Members(members),
        }
    }

    pub fn partial(instance: &'a Instance, status: &'a [Truth]) -> World<'a> {
        assert_eq!(status.len(), instance.len());
        World {
            instance,
            membership: Membership::Partial(status),
        }
    }

    fn status_at(&self, v: usize) -> Truth {
        match self.membership {
            Membership::All => Truth::True,
            Membership::Members(m) => m[v].into(),
            Membership::Partial(p) => p[v],
        }
    }

    pub fn status(&self, t: &Tuple) -> Truth {
        match self.instance.vertex_of(t) {
            Some(v) => self.status_at(v as usize),
            None => Truth::False,
        }
    }

    fn status_of(&self, values: &[&Value]) -> Truth {
        let found = self
            .instance
            .tuples()
            .binary_search_by(|t| t.values().iter().cmp(values.iter().copied()));
        match found {
            Ok(v) => self.status_at(v),
            Err(_) => Truth::False,
        }
    }

    fn live(&self) -> impl Iterator<Item = &'a Tuple> + '_ {
        self.instance
            .tuples()
            .iter()
            .enumerate()
            .filter(move |(v, _)| self.status_at(*v) != Truth::False)
            .map(|(_, t)| t)
    }
}

#[derive(Debug, Clone)]
enum Slot {
    Var(usize),
    Const(Value),
}

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Atom { terms: Vec<Slot>, positive: bool },
    Cmp { op: CmpOp, lhs: Slot, rhs: Slot },
    And(Vec<Node>),
    Or(Vec<Node>),
    Exists(Vec<usize>, Box<Node>),
    Forall(Vec<usize>, Box<Node>),
}

fn mk_and(parts: Vec<Node>) -> Node {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Node::Const(true) => {}
            Node::Const(false) => return Node::Const(false),
            Node::And(cs) => out.extend(cs),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Node::Const(true),
        1 => out.pop().unwrap(),
        _ => Node::And(out),
    }
}

fn mk_or(parts: Vec<Node>) -> Node {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Node::Const(false) => {}
            Node::Const(true) => return Node::Const(true),
            Node::Or(cs) => out.extend(cs),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Node::Const(false),
        1 => out.pop().unwrap(),
        _ => Node::Or(out),
    }
}

fn free_vars(n: &Node, out: &mut BTreeSet<usize>) {
    let slot = |s: &Slot, out: &mut BTreeSet<usize>| {
        if let Slot::Var(v) = s {
            out.insert(*v);
        }
    };
    match n {
        Node::Const(_) => {}
        Node::Atom { terms, .. } => terms.iter().for_each(|s| slot(s, out)),
        Node::Cmp { lhs, rhs, .. } => {
            slot(lhs, out);
            slot(rhs, out);
        }
        Node::And(cs) | Node::Or(cs) => cs.iter().for_each(|c| free_vars(c, out)),
        Node::Exists(vs, b) | Node::Forall(vs, b) => {
            let mut inner = BTreeSet::new();
            free_vars(b, &mut inner);
            for v in vs {
                inner.remove(v);
            }
            out.extend(inner);
        }
    }
}

fn fv(n: &Node) -> BTreeSet<usize> {
    let mut s = BTreeSet::new();
    free_vars(n, &mut s);
    s
}

struct Compiler {
    index: HashMap<String, usize>,
    types: Vec<AttrType>,
}

impl Compiler {
    fn var(&mut self, name: &str, ty: AttrType) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.index.insert(name.to_string(), self.types.len());
        self.types.push(ty);
        self.types.len() - 1
    }

    fn slot(&self, t: &Term) -> Slot {
        match t {
            Term::Var(v) => Slot::Var(self.index[v]),
            Term::Const(c) => Slot::Const(c.clone()),
        }
    }

    fn nnf(&mut self, f: &Formula, positive: bool, query: &Query) -> Node {
        match f {
            Formula::True => Node::Const(positive),
            Formula::False => Node::Const(!positive),
            Formula::Rel(ts) => Node::Atom {
                terms: ts.iter().map(|t| self.slot(t)).collect(),
                positive,
            },
            Formula::Builtin(b) => {
                let (lhs, rhs) = (self.slot(&b.lhs), self.slot(&b.rhs));
                if let (Slot::Const(l), Slot::Const(r)) = (&lhs, &rhs) {
                    return Node::Const(b.op.eval(l, r).unwrap_or(false) == positive);
                }
                let op = if positive { b.op } else { b.op.negated() };
                Node::Cmp { op, lhs, rhs }
            }
            Formula::Not(x) => self.nnf(x, !positive, query),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let parts = vec![self.nnf(a, positive, query), self.nnf(b, positive, query)];
                if matches!(f, Formula::And(..)) == positive {
                    mk_and(parts)
                } else {
                    mk_or(parts)
                }
            }
            Formula::Implies(a, b) => {
                let parts = vec![self.nnf(a, !positive, query), self.nnf(b, positive, query)];
                if positive {
                    mk_or(parts)
                } else {
                    mk_and(parts)
                }
            }
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let vars: Vec<usize> = vs
                    .iter()
                    .map(|v| self.var(v, query.var_type(v).expect("typed variable")))
                    .collect();
                let body = Box::new(self.nnf(body, positive, query));
                if matches!(f, Formula::Exists(..)) == positive {
                    Node::Exists(vars, body)
                } else {
                    Node::Forall(vars, body)
                }
            }
        }
    }
}

/// Quantified variables of a group and the conjuncts or disjuncts using them.
type VarGroup = (BTreeSet<usize>, Vec<Node>);

/// Splits `children` into those independent of `vars` and groups connected
/// through shared variables of `vars`.
fn split_components(children: Vec<Node>, vars: &BTreeSet<usize>) -> (Vec<Node>, Vec<VarGroup>) {
    let mut independent = Vec::new();
    let mut groups: Vec<VarGroup> = Vec::new();
    for c in children {
        let cv: BTreeSet<usize> = fv(&c).intersection(vars).copied().collect();
        if cv.is_empty() {
            independent.push(c);
            continue;
        }
        let mut merged = (cv, vec![c]);
        let mut rest = Vec::new();
        for g in groups {
            if g.0.is_disjoint(&merged.0) {
                rest.push(g);
            } else {
                merged.0.extend(g.0);
                merged.1.extend(g.1);
            }
        }
        rest.push(merged);
        groups = rest;
    }
    (independent, groups)
}

fn push_quantifier(existential: bool, vars: BTreeSet<usize>, body: Node) -> Node {
    let vars: BTreeSet<usize> = fv(&body).intersection(&vars).copied().collect();
    if vars.is_empty() {
        return body;
    }
    let wrap = |vars: BTreeSet<usize>, body: Node| {
        let vs = vars.into_iter().collect();
        if existential {
            Node::Exists(vs, Box::new(body))
        } else {
            Node::Forall(vs, Box::new(body))
        }
    };
    match body {
        // exists distributes over |, forall over &.
        Node::Or(cs) if existential => mk_or(
            cs.into_iter()
                .map(|c| push_quantifier(true, vars.clone(), c))
                .collect(),
        ),
        Node::And(cs) if !existential => mk_and(
            cs.into_iter()
                .map(|c| push_quantifier(false, vars.clone(), c))
                .collect(),
        ),
        Node::And(cs) | Node::Or(cs) => {
            let conjunctive = existential;
            let (independent, mut groups) = split_components(cs, &vars);
            if independent.is_empty() && groups.len() == 1 {
                let (_, children) = groups.pop().unwrap();
                let inner = if conjunctive {
                    Node::And(children)
                } else {
                    Node::Or(children)
                };
                return wrap(vars, inner);
            }
            let mut parts = independent;
            for (gv, children) in groups {
                let inner = if conjunctive {
                    mk_and(children)
                } else {
                    mk_or(children)
                };
                parts.push(push_quantifier(existential, gv, inner));
            }
            if conjunctive {
                mk_and(parts)
            } else {
                mk_or(parts)
            }
        }
        Node::Exists(inner, b) if existential => {
            push_quantifier(true, vars.into_iter().chain(inner).collect(), *b)
        }
        Node::Forall(inner, b) if !existential => {
            push_quantifier(false, vars.into_iter().chain(inner).collect(), *b)
        }
        other => wrap(vars, other),
    }
}

fn miniscope(n: Node) -> Node {
    match n {
        Node::And(cs) => mk_and(cs.into_iter().map(miniscope).collect()),
        Node::Or(cs) => mk_or(cs.into_iter().map(miniscope).collect()),
        Node::Exists(vs, b) => push_quantifier(true, vs.into_iter().collect(), miniscope(*b)),
        Node::Forall(vs, b) => push_quantifier(false, vs.into_iter().collect(), miniscope(*b)),
        leaf => leaf,
    }
}

fn quantified_types(n: &Node, out: &mut BTreeSet<AttrType>, types: &[AttrType]) {
    match n {
        Node::And(cs) | Node::Or(cs) => cs.iter().for_each(|c| quantified_types(c, out, types)),
        Node::Exists(vs, b) | Node::Forall(vs, b) => {
            out.extend(vs.iter().map(|&v| types[v]));
            quantified_types(b, out, types);
        }
        _ => {}
    }
}

#[derive(Debug, Clone, Default)]
struct TypedDomain {
    sym: Vec<Value>,
    num: Vec<Value>,
}

impl TypedDomain {
    fn new(values: impl IntoIterator<Item = Value>) -> TypedDomain {
        let set: BTreeSet<Value> = values.into_iter().collect();
        let mut d = TypedDomain::default();
        for v in set {
            match v.ty() {
                AttrType::Sym => d.sym.push(v),
                AttrType::Num => d.num.push(v),
            }
        }
        d
    }

    fn of(&self, ty: AttrType) -> &[Value] {
        match ty {
            AttrType::Sym => &self.sym,
            AttrType::Num => &self.num,
        }
    }
}

type Env = Vec<Option<Value>>;
type Visit<'v> = dyn FnMut(Truth, &Env) -> ControlFlow<()> + 'v;

struct Evaluator<'e> {
    world: &'e World<'e>,
    domain: &'e TypedDomain,
    types: &'e [AttrType],
}

fn value<'x>(s: &'x Slot, env: &'x Env) -> &'x Value {
    match s {
        Slot::Const(c) => c,
        Slot::Var(v) => env[*v].as_ref().expect("bound variable"),
    }
}

/// Picks a relation atom among the top-level conjuncts (`positive`) or
/// disjuncts (negated atoms) of `body` that mentions an unbound variable.
fn guard<'n>(body: &'n Node, env: &Env, positive: bool) -> Option<&'n [Slot]> {
    let children: &[Node] = match body {
        Node::And(cs) if positive => cs,
        Node::Or(cs) if !positive => cs,
        other => std::slice::from_ref(other),
    };
    children
        .iter()
        .filter_map(|c| match c {
            Node::Atom { terms, positive: p } if *p == positive => Some(terms.as_slice()),
            _ => None,
        })
        .filter(|terms| {
            terms
                .iter()
                .any(|s| matches!(s, Slot::Var(v) if env[*v].is_none()))
        })
        .max_by_key(|terms| {
            let determined = terms
                .iter()
                .filter(|s| match s {
                    Slot::Const(_) => true,
                    Slot::Var(v) => env[*v].is_some(),
                })
                .count();
            (determined, std::cmp::Reverse(terms.as_ptr() as usize))
        })
}

impl Evaluator<'_> {
    fn eval(&self, n: &Node, env: &mut Env) -> Truth {
        match n {
            Node::Const(b) => (*b).into(),
            Node::Atom { terms, positive } => {
                let values: Vec<&Value> = terms.iter().map(|s| value(s, env)).collect();
                let t = self.world.status_of(&values);
                if *positive {
                    t
                } else {
                    t.not()
                }
            }
            Node::Cmp { op, lhs, rhs } => op
                .eval(value(lhs, env), value(rhs, env))
                .unwrap_or(false)
                .into(),
            Node::And(cs) => {
                let mut acc = Truth::True;
                for c in cs {
                    acc = acc.and(self.eval(c, env));
                    if acc == Truth::False {
                        break;
                    }
                }
                acc
            }
            Node::Or(cs) => {
                let mut acc = Truth::False;
                for c in cs {
                    acc = acc.or(self.eval(c, env));
                    if acc == Truth::True {
                        break;
                    }
                }
                acc
            }
            Node::Exists(vs, body) => {
                let mut acc = Truth::False;
                let _ = self.bindings(vs, body, true, env, &mut |t, _| {
                    acc = acc.or(t);
                    if acc == Truth::True {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                });
                acc
            }
            Node::Forall(vs, body) => {
                let mut acc = Truth::True;
                let _ = self.bindings(vs, body, false, env, &mut |t, _| {
                    acc = acc.and(t);
                    if acc == Truth::False {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                });
                acc
            }
        }
    }

    /// Enumerates bindings of `vars` and reports the body's value for each.
    /// Bindings skipped by a guard make the body false (`guard_positive`) or
    /// true (otherwise), so they never affect an `exists` or `forall` fold.
    fn bindings(
        &self,
        vars: &[usize],
        body: &Node,
        guard_positive: bool,
        env: &mut Env,
        visit: &mut Visit<'_>,
    ) -> ControlFlow<()> {
        let Some(&next) = vars.iter().find(|&&v| env[v].is_none()) else {
            let t = self.eval(body, env);
            return visit(t, env);
        };
        if let Some(terms) = guard(body, env, guard_positive) {
            for tuple in self.world.live() {
                let mut fresh = Vec::new();
                let mut ok = true;
                for (s, val) in terms.iter().zip(tuple.values()) {
                    match s {
                        Slot::Const(c) => ok = c == val,
                        Slot::Var(v) => match &env[*v] {
                            Some(b) => ok = b == val,
                            None => {
                                env[*v] = Some(val.clone());
                                fresh.push(*v);
                            }
                        },
                    }
                    if !ok {
                        break;
                    }
                }
                let flow = if ok {
                    self.bindings(vars, body, guard_positive, env, visit)
                } else {
                    ControlFlow::Continue(())
                };
                for v in fresh {
                    env[v] = None;
                }
                flow?;
            }
            return ControlFlow::Continue(());
        }
        for val in self.domain.of(self.types[next]) {
            env[next] = Some(val.clone());
            let flow = self.bindings(vars, body, guard_positive, env, visit);
            env[next] = None;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// A query compiled for repeated evaluation against sub-instances of one
/// instance. The domain is the active domain of that instance plus the
/// query's constants.
#[derive(Debug, Clone)]
pub struct PreparedQuery {
    root: Node,
    types: Vec<AttrType>,
    free_vars: Vec<String>,
    domain: TypedDomain,
}

impl PreparedQuery {
    pub fn new(instance: &Instance, query: &Query) -> PreparedQuery {
        let mut compiler = Compiler {
            index: HashMap::new(),
            types: Vec::new(),
        };
        for v in query.free_vars() {
            compiler.var(v, query.var_type(v).expect("typed variable"));
        }
        let root = compiler.nnf(query.formula(), true, query);
        let domain = TypedDomain::new(
            instance
                .active_domain()
                .into_iter()
                .chain(query.formula().constants()),
        );
        let mut needed = BTreeSet::new();
        quantified_types(&root, &mut needed, &compiler.types);
        // Pushing quantifiers is only sound over nonempty domains.
        let root = if needed.iter().all(|&ty| !domain.of(ty).is_empty()) {
            miniscope(root)
        } else {
            root
        };
        PreparedQuery {
            root,
            types: compiler.types,
            free_vars: query.free_vars().to_vec(),
            domain,
        }
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free_vars
    }

    /// Domain values of type `ty`.
    pub fn domain(&self, ty: AttrType) -> &[Value] {
        self.domain.of(ty)
    }

    fn env(&self, binding: &[Value]) -> Env {
        assert_eq!(binding.len(), self.free_vars.len(), "one value per free variable");
        let mut env = vec![None; self.types.len()];
        for (i, v) in binding.iter().enumerate() {
            env[i] = Some(v.clone());
        }
        env
    }

    /// Value under `binding` (listed in free-variable order).
    pub fn eval(&self, world: &World<'_>, binding: &[Value]) -> Truth {
        let mut env = self.env(binding);
        Evaluator {
            world,
            domain: &self.domain,
            types: &self.types,
        }
        .eval(&self.root, &mut env)
    }

    /// Every binding of the free variables whose value in `world` is not
    /// false, together with that value.
    pub fn possible_bindings(&self, world: &World<'_>) -> Vec<(Vec<Value>, Truth)> {
        let mut out = Vec::new();
        let mut env = vec![None; self.types.len()];
        let free: Vec<usize> = (0..self.free_vars.len()).collect();
        let ev = Evaluator {
            world,
            domain: &self.domain,
            types: &self.types,
        };
        let _ = ev.bindings(&free, &self.root, true, &mut env, &mut |t, env| {
            if t != Truth::False {
                let values = free.iter().map(|&v| env[v].clone().expect("bound")).collect();
                out.push((values, t));
            }
            ControlFlow::Continue(())
        });
        out.sort();
        out.dedup_by(|a, b| a.0 == b.0);
        out
    }
}

impl PartialOrd for Truth {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Truth {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

/// Evaluates `query` on `instance` (two-valued). Every free variable must be
/// bound in `binding` with a value of its type.
pub fn eval_fo(instance: &Instance, query: &Query, binding: &BTreeMap<String, Value>) -> Result<bool> {
    let mut values = Vec::with_capacity(query.free_vars().len());
    for v in query.free_vars() {
        let value = binding
            .get(v)
            .ok_or_else(|| CqaError::UnboundVariable(v.clone()))?;
        let want = query.var_type(v).expect("typed variable");
        if value.ty() != want {
            return Err(CqaError::Type(format!(
                "variable `{v}` is {want} but was given {}",
                value.to_dsl()
            )));
        }
        values.push(value.clone());
    }
    let prepared = PreparedQuery::new(instance, query);
    Ok(prepared.eval(&World::full(instance), &values) == Truth::True)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Schema;
    use crate::query::parse_query;

    fn schema() -> Schema {
        Schema::new("R", [("A", AttrType::Sym), ("B", AttrType::Num)]).unwrap()
    }

    fn inst(rows: &[(&str, i64)]) -> Instance {
        Instance::new(
            schema(),
            rows.iter().map(|(a, b)| Tuple::new(vec![Value::sym(a), Value::num(*b)])),
        )
        .unwrap()
    }

    fn holds(i: &Instance, q: &str) -> bool {
        eval_fo(i, &parse_query(q, &schema()).unwrap(), &BTreeMap::new()).unwrap()
    }

    #[test]
    fn quantifiers_and_connectives() {
        let i = inst(&[("a", 1), ("a", 2), ("b", 1)]);
        assert!(holds(&i, "exists x. R(x, 2)"));
        assert!(!holds(&i, "exists x. R(x, 3)"));
        assert!(holds(&i, "forall x,n. R(x,n) -> n <= 2"));
        assert!(!holds(&i, "forall x. exists n. R(x, n) & n > 1"));
        assert!(holds(&i, "forall x,n. R(x,n) -> (exists m. R(x,m) & m != n) | x = 'b'"));
        assert!(holds(&i, "exists x. !R(x, 2) & R(x, 1)"));
        assert!(holds(&i, "forall x. !R(x, 7)"));
        // 'c' only occurs as a query constant but is still in the domain.
        assert!(holds(&i, "exists x. !R(x, 1) & x = 'c'"));
    }

    #[test]
    fn empty_instance_uses_plain_semantics() {
        let i = inst(&[]);
        assert!(!holds(&i, "exists x,n. R(x, n) | x = x & n = n"));
        assert!(holds(&i, "forall x. exists n. R(x, n)"));
        assert!(holds(&i, "exists n. n = 0 & forall x. R(x, n) & n = 1"));
        assert!(holds(&i, "exists n. n = 0 & forall x. R(x, n)"));
    }

    #[test]
    fn partial_worlds_are_kleene() {
        let i = inst(&[("a", 1), ("b", 1)]);
        let status = [Truth::True, Truth::Unknown];
        let w = World::partial(&i, &status);
        let p = |q: &str| PreparedQuery::new(&i, &parse_query(q, &schema()).unwrap()).eval(&w, &[]);
        assert_eq!(p("R('a', 1)"), Truth::True);
        assert_eq!(p("R('b', 1)"), Truth::Unknown);
        assert_eq!(p("R('c', 1)"), Truth::False);
        assert_eq!(p("R('a', 1) | R('b', 1)"), Truth::True);
        assert_eq!(p("exists x. R(x, 1) & x != 'a'"), Truth::Unknown);
        assert_eq!(p("forall x. R(x, 1)"), Truth::Unknown);
        assert_eq!(p("forall x. R(x, 1) | x = 'b'"), Truth::True);
    }

    #[test]
    fn possible_bindings_follow_guards() {
        let i = inst(&[("a", 1), ("a", 2), ("b", 1)]);
        let q = parse_query("R(x, n) & n > 1", &schema()).unwrap();
        let p = PreparedQuery::new(&i, &q);
        let got = p.possible_bindings(&World::full(&i));
        assert_eq!(got, vec![(vec![Value::sym("a"), Value::num(2)], Truth::True)]);
        let q = parse_query("!R(x, 1)", &schema()).unwrap();
        let got: Vec<_> = PreparedQuery::new(&i, &q)
            .possible_bindings(&World::full(&i))
            .into_iter()
            .map(|(v, _)| v)
            .collect();
        assert!(got.is_empty());
    }

    #[test]
    fn binding_errors() {
        let i = inst(&[("a", 1)]);
        let q = parse_query("R(x, 1)", &schema()).unwrap();
        assert!(matches!(eval_fo(&i, &q, &BTreeMap::new()), Err(CqaError::UnboundVariable(_))));
        let b = BTreeMap::from([("x".to_string(), Value::num(1))]);
        assert!(matches!(eval_fo(&i, &q, &b), Err(CqaError::Type(_))));
        let b = BTreeMap::from([("x".to_string(), Value::sym("a"))]);
        assert!(eval_fo(&i, &q, &b).unwrap());
    }
}
