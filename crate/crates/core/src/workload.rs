//! Seeded random inputs for the differential suites and benchmarks.
//!
//! Every generator takes an explicit RNG, and `case_rng` derives a per-case
//! stream from a suite seed, so results do not depend on thread scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{BuiltinAtom, ConstraintSet, DenialConstraint, Fd, Term};
use crate::model::{AttrType, Instance, Schema, Tuple, Value};
use crate::query::{Formula, Query};
use crate::reductions::{CnfFormula, Graph};
use crate::syntax::CmpOp;

/// Independent RNG for case `index` of a suite run with `seed`.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `R(A:sym, B:sym, C:num)`, the schema of the random denial cases.
pub fn mixed_schema() -> Schema {
    Schema::new(
        "R",
        [("A", AttrType::Sym), ("B", AttrType::Sym), ("C", AttrType::Num)],
    )
    .expect("fixed schema")
}

/// Values each attribute draws from: the first `size` of `a,b,c,d` or `0..size`.
#[derive(Debug, Clone)]
pub struct Domain {
    size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Domain {
        assert!((1..=4).contains(&size));
        Domain { size }
    }

    pub fn values(&self, ty: AttrType) -> Vec<Value> {
        match ty {
            AttrType::Sym => ["a", "b", "c", "d"][..self.size]
                .iter()
                .map(|s| Value::sym(s))
                .collect(),
            AttrType::Num => (0..self.size as u64).map(Value::num).collect(),
        }
    }

    pub fn pick(&self, ty: AttrType, rng: &mut impl Rng) -> Value {
        self.values(ty).choose(rng).expect("nonempty").clone()
    }

    pub fn tuple(&self, schema: &Schema, rng: &mut impl Rng) -> Tuple {
        Tuple::new(
            (0..schema.arity())
                .map(|p| self.pick(schema.attr_type(p), rng))
                .collect(),
        )
    }
}

pub fn random_instance(
    schema: &Schema,
    domain: &Domain,
    max_tuples: usize,
    rng: &mut impl Rng,
) -> Instance {
    let n = rng.gen_range(max_tuples / 2..=max_tuples);
    let tuples: Vec<Tuple> = (0..n).map(|_| domain.tuple(schema, rng)).collect();
    Instance::new(schema.clone(), tuples).expect("generated tuples are well-typed")
}

fn random_op(ty: AttrType, rng: &mut impl Rng) -> CmpOp {
    let ops: &[CmpOp] = match ty {
        AttrType::Sym => &[CmpOp::Eq, CmpOp::Ne],
        AttrType::Num => &[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge],
    };
    *ops.choose(rng).expect("nonempty")
}

/// A denial with 1 to `max_literals` literals over a small variable pool,
/// occasional constants, and up to two typed comparisons.
pub fn random_denial(
    schema: &Schema,
    domain: &Domain,
    max_literals: usize,
    rng: &mut impl Rng,
) -> DenialConstraint {
    loop {
        let n = rng.gen_range(1..=max_literals);
        let mut by_type: Vec<(String, AttrType)> = Vec::new();
        let literals: Vec<Vec<Term>> = (0..n)
            .map(|_| {
                (0..schema.arity())
                    .map(|p| {
                        let ty = schema.attr_type(p);
                        if rng.gen_bool(0.15) {
                            return Term::Const(domain.pick(ty, rng));
                        }
                        // Small pools force shared variables, i.e. joins.
                        let name = format!("v{}_{}", p, rng.gen_range(0..n.max(2)));
                        if !by_type.iter().any(|(v, _)| *v == name) {
                            by_type.push((name.clone(), ty));
                        }
                        Term::Var(name)
                    })
                    .collect()
            })
            .collect();
        let mut builtins = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let Some((lhs, ty)) = by_type.choose(rng).cloned() else {
                break;
            };
            let same: Vec<&String> = by_type
                .iter()
                .filter(|(v, t)| *t == ty && *v != lhs)
                .map(|(v, _)| v)
                .collect();
            let rhs = match same.choose(rng) {
                Some(v) if rng.gen_bool(0.6) => Term::Var((*v).clone()),
                _ => Term::Const(domain.pick(ty, rng)),
            };
            builtins.push(BuiltinAtom::new(Term::Var(lhs), random_op(ty, rng), rhs));
        }
        if let Ok(d) = DenialConstraint::new(schema, literals, builtins) {
            return d;
        }
    }
}

/// A ground CNF sentence with 1..=3 clauses of 1..=3 relation literals.
/// Most atoms come from the instance.
pub fn random_ground_cnf(instance: &Instance, domain: &Domain, rng: &mut impl Rng) -> Query {
    let schema = instance.schema();
    let clauses = (0..rng.gen_range(1..=3)).map(|_| {
        Formula::disj((0..rng.gen_range(1..=3)).map(|_| {
            let t = match instance.tuples().choose(rng) {
                Some(t) if rng.gen_bool(0.85) => t.clone(),
                _ => domain.tuple(schema, rng),
            };
            let atom = Formula::rel(t.values().iter().cloned().map(Term::Const).collect());
            if rng.gen_bool(0.5) {
                Formula::not(atom)
            } else {
                atom
            }
        }))
    });
    Query::new(schema, Formula::conj(clauses.collect::<Vec<_>>())).expect("ground and well-typed")
}

/// One case of the quantifier-free differential suite.
#[derive(Debug, Clone)]
pub struct DenialCase {
    pub instance: Instance,
    pub constraints: ConstraintSet,
    pub query: Query,
}

/// Instance of at most `max_tuples` tuples, 1 or 2 denials of at most 3
/// literals, and a ground CNF query.
pub fn denial_case(max_tuples: usize, rng: &mut impl Rng) -> DenialCase {
    let schema = mixed_schema();
    let domain = Domain::new(*[2, 2, 3, 4].choose(rng).expect("nonempty"));
    let instance = random_instance(&schema, &domain, max_tuples, rng);
    let mut constraints = ConstraintSet::new(schema.clone());
    for _ in 0..rng.gen_range(1..=2) {
        constraints.add_denial(random_denial(&schema, &domain, 3, rng));
    }
    let query = random_ground_cnf(&instance, &domain, rng);
    DenialCase {
        instance,
        constraints,
        query,
    }
}

/// A random nontrivial FD over `schema` (possibly with empty left side).
pub fn random_fd(schema: &Schema, rng: &mut impl Rng) -> Fd {
    loop {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for p in 0..schema.arity() {
            match rng.gen_range(0..3) {
                0 => lhs.push(p),
                1 => rhs.push(p),
                _ => {}
            }
        }
        if let Ok(fd) = Fd::new(schema, lhs, rhs) {
            return fd;
        }
    }
}

/// A comparison-only formula over the attribute names of `schema`.
pub fn random_phi(schema: &Schema, domain: &Domain, rng: &mut impl Rng) -> Formula {
    fn go(schema: &Schema, domain: &Domain, depth: u32, rng: &mut impl Rng) -> Formula {
        if depth == 0 || rng.gen_bool(0.4) {
            let p = rng.gen_range(0..schema.arity());
            let ty = schema.attr_type(p);
            let lhs = Term::var(&schema.attributes()[p].name);
            let peers: Vec<usize> = (0..schema.arity())
                .filter(|&q| q != p && schema.attr_type(q) == ty)
                .collect();
            let rhs = match peers.choose(rng) {
                Some(&q) if rng.gen_bool(0.4) => Term::var(&schema.attributes()[q].name),
                _ => Term::Const(domain.pick(ty, rng)),
            };
            return Formula::cmp(lhs, random_op(ty, rng), rhs);
        }
        match rng.gen_range(0..5) {
            0 => Formula::not(go(schema, domain, depth - 1, rng)),
            1 | 2 => Formula::and(go(schema, domain, depth - 1, rng), go(schema, domain, depth - 1, rng)),
            _ => Formula::or(go(schema, domain, depth - 1, rng), go(schema, domain, depth - 1, rng)),
        }
    }
    if rng.gen_bool(0.1) {
        return Formula::True;
    }
    go(schema, domain, 2, rng)
}

/// One case of the rewriting differential suite.
#[derive(Debug, Clone)]
pub struct FdCase {
    pub instance: Instance,
    pub fd: Fd,
    pub constraints: ConstraintSet,
    pub phi: Formula,
    /// `exists A,B,C. R(A,B,C) & phi`.
    pub query: Query,
}

pub fn fd_case(max_tuples: usize, rng: &mut impl Rng) -> FdCase {
    let schema = mixed_schema();
    let domain = Domain::new(rng.gen_range(2..=3));
    let instance = random_instance(&schema, &domain, max_tuples, rng);
    let fd = random_fd(&schema, rng);
    let constraints = ConstraintSet::with_fds(schema.clone(), [fd.clone()]);
    let phi = random_phi(&schema, &domain, rng);
    let names: Vec<String> = schema.attributes().iter().map(|a| a.name.clone()).collect();
    let atom = Formula::rel(names.iter().map(|n| Term::var(n)).collect());
    let query = Query::new(&schema, Formula::exists(names, Formula::and(atom, phi.clone())))
        .expect("phi is typed over the schema");
    FdCase {
        instance,
        fd,
        constraints,
        phi,
        query,
    }
}

fn random_clause(vars: u32, rng: &mut impl Rng, sign: Option<bool>) -> Vec<i32> {
    let len = rng.gen_range(1..=3.min(vars as usize));
    let mut pool: Vec<i32> = (1..=vars as i32).collect();
    pool.shuffle(rng);
    pool.truncate(len);
    pool.into_iter()
        .map(|v| {
            let positive = sign.unwrap_or_else(|| rng.gen_bool(0.5));
            if positive {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Monotone formula on 1..=`max_vars` variables with 1..=`max_clauses` clauses.
pub fn random_monotone(max_vars: u32, max_clauses: usize, rng: &mut impl Rng) -> CnfFormula {
    let vars = rng.gen_range(1..=max_vars);
    let clauses = (0..rng.gen_range(1..=max_clauses))
        .map(|_| {
            let sign = rng.gen_bool(0.5);
            random_clause(vars, rng, Some(sign))
        })
        .collect();
    CnfFormula::new(vars, clauses).expect("literals in range")
}

/// Formula with clauses of 1 to 3 literals of mixed sign.
pub fn random_3sat(max_vars: u32, max_clauses: usize, rng: &mut impl Rng) -> CnfFormula {
    let vars = rng.gen_range(1..=max_vars);
    let clauses = (0..rng.gen_range(1..=max_clauses))
        .map(|_| random_clause(vars, rng, None))
        .collect();
    CnfFormula::new(vars, clauses).expect("literals in range")
}

/// Every labeled simple graph on nodes `v1..vn`.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let mut g = Graph::new();
            for i in 1..=n {
                g.add_node(&format!("v{i}"));
            }
            for (k, (i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    g.add_edge(&format!("v{i}"), &format!("v{j}")).expect("i < j");
                }
            }
            g
        })
        .collect()
}

/// Large instance under FD `A -> B` over `R(A:num, B:num)`: `pairs` keys carry
/// two clashing tuples and the remaining keys one tuple each, for `size`
/// tuples in total. Returns the FD set and one clashing pair.
pub fn conflict_pairs_instance(
    size: usize,
    pairs: usize,
    rng: &mut impl Rng,
) -> (Instance, ConstraintSet, (Tuple, Tuple)) {
    assert!(2 * pairs <= size && pairs > 0);
    let schema = Schema::new("R", [("A", AttrType::Num), ("B", AttrType::Num)]).expect("fixed schema");
    let mut keys: Vec<u64> = (0..(size - pairs) as u64).collect();
    keys.shuffle(rng);
    let mut tuples = Vec::with_capacity(size);
    for (i, &k) in keys.iter().enumerate() {
        let v = rng.gen_range(0..1_000_000u64);
        tuples.push(Tuple::new(vec![Value::num(k), Value::num(v)]));
        if i < pairs {
            tuples.push(Tuple::new(vec![Value::num(k), Value::num(v + 1)]));
        }
    }
    let pair = (tuples[0].clone(), tuples[1].clone());
    let instance = Instance::new(schema.clone(), tuples).expect("well-typed");
    let fd = Fd::by_names(&schema, &["A"], &["B"]).expect("attributes exist");
    (instance, ConstraintSet::with_fds(schema, [fd]), pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_cases_repeat() {
        let a = denial_case(10, &mut case_rng(7, 3));
        let b = denial_case(10, &mut case_rng(7, 3));
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.query.to_string(), b.query.to_string());
        assert!(a.instance.len() <= 10);
    }

    #[test]
    fn graph_family_sizes() {
        assert_eq!(all_graphs(3).len(), 8);
        assert_eq!(all_graphs(0).len(), 1);
    }

    #[test]
    fn conflict_pairs_sizes() {
        let (r, cs, (s, t)) = conflict_pairs_instance(1000, 50, &mut case_rng(1, 0));
        assert_eq!(r.len(), 1000);
        assert!(r.contains(&s) && r.contains(&t));
        assert!(!crate::constraints::is_consistent(&r, &cs));
    }

    #[test]
    fn fd_case_query_shape() {
        for i in 0..20 {
            let c = fd_case(6, &mut case_rng(11, i));
            assert!(c.query.existential_shape().is_some(), "{}", c.query);
        }
    }
}
