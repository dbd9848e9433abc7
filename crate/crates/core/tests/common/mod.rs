//! Test-side reference implementations. Nothing here calls the library's
//! matching, hypergraph, evaluation or search code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cqa_core::query::Formula;
use cqa_core::{CmpOp, ConstraintSet, DenialConstraint, Instance, Term, Tuple, Value};

pub fn compare(l: &Value, op: CmpOp, r: &Value) -> bool {
    match op {
        CmpOp::Eq => l == r,
        CmpOp::Ne => l != r,
        CmpOp::Lt => l < r,
        CmpOp::Gt => l > r,
        CmpOp::Le => l <= r,
        CmpOp::Ge => l >= r,
    }
}

fn bind(term: &Term, v: &Value, env: &mut BTreeMap<String, Value>) -> bool {
    match term {
        Term::Const(c) => c == v,
        Term::Var(x) => match env.get(x) {
            Some(prev) => prev == v,
            None => {
                env.insert(x.clone(), v.clone());
                true
            }
        },
    }
}

fn term_value(t: &Term, env: &BTreeMap<String, Value>) -> Value {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(x) => env[x].clone(),
    }
}

/// Whether some choice of (not necessarily distinct) tuples from `set`
/// satisfies the body of `d`.
pub fn violated(set: &[&Tuple], d: &DenialConstraint) -> bool {
    let k = d.literals().len();
    if set.is_empty() {
        return false;
    }
    let mut idx = vec![0usize; k];
    loop {
        let mut env = BTreeMap::new();
        let matched = d.literals().iter().zip(&idx).all(|(lit, &i)| {
            lit.iter()
                .zip(set[i].values())
                .all(|(t, v)| bind(t, v, &mut env))
        });
        if matched
            && d.builtins()
                .iter()
                .all(|b| compare(&term_value(&b.lhs, &env), b.op, &term_value(&b.rhs, &env)))
        {
            return true;
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return false;
            }
            idx[pos] += 1;
            if idx[pos] < set.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn consistent(set: &[&Tuple], cs: &ConstraintSet) -> bool {
    cs.denials().iter().all(|d| !violated(set, d))
}

fn subset(instance: &Instance, mask: u32) -> Vec<&Tuple> {
    instance
        .tuples()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, t)| t)
        .collect()
}

/// Bitmask of every consistent subset.
pub fn consistent_masks(instance: &Instance, cs: &ConstraintSet) -> Vec<bool> {
    assert!(instance.len() <= 16, "powerset oracle is for tiny instances");
    (0u32..1 << instance.len())
        .map(|m| consistent(&subset(instance, m), cs))
        .collect()
}

/// Maximal consistent subsets, as bitmasks, by powerset search.
pub fn brute_repairs(instance: &Instance, cs: &ConstraintSet) -> Vec<u32> {
    let ok = consistent_masks(instance, cs);
    let n = instance.len();
    (0u32..1 << n)
        .filter(|&m| ok[m as usize] && (0..n).all(|i| m >> i & 1 == 1 || !ok[(m | 1 << i) as usize]))
        .collect()
}

pub fn repair_sets(instance: &Instance, masks: &[u32]) -> BTreeSet<BTreeSet<Tuple>> {
    masks
        .iter()
        .map(|&m| subset(instance, m).into_iter().cloned().collect())
        .collect()
}

/// Truth of a quantifier-free formula in the world `members`, with the
/// given variable binding.
pub fn eval_qf(f: &Formula, members: &BTreeSet<Tuple>, env: &BTreeMap<String, Value>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Rel(terms) => {
            members.contains(&Tuple::new(terms.iter().map(|t| term_value(t, env)).collect()))
        }
        Formula::Builtin(b) => compare(&term_value(&b.lhs, env), b.op, &term_value(&b.rhs, env)),
        Formula::Not(g) => !eval_qf(g, members, env),
        Formula::And(a, b) => eval_qf(a, members, env) && eval_qf(b, members, env),
        Formula::Or(a, b) => eval_qf(a, members, env) || eval_qf(b, members, env),
        Formula::Implies(a, b) => !eval_qf(a, members, env) || eval_qf(b, members, env),
        Formula::Exists(..) | Formula::Forall(..) => panic!("quantifier in eval_qf"),
    }
}

/// `exists t. R(t) & phi(t)` where `phi` names attributes.
pub fn holds_somewhere(
    phi: &Formula,
    names: &[String],
    members: &BTreeSet<Tuple>,
) -> bool {
    members.iter().any(|t| {
        let env: BTreeMap<String, Value> = names.iter().cloned().zip(t.values().iter().cloned()).collect();
        eval_qf(phi, members, &env)
    })
}

/// Whether `holds` is true in every repair.
pub fn certain(repairs: &BTreeSet<BTreeSet<Tuple>>, holds: impl Fn(&BTreeSet<Tuple>) -> bool) -> bool {
    repairs.iter().all(holds)
}

/// A plain DPLL solver for cross-checking the exhaustive SAT verifier.
pub fn dpll(clauses: &[Vec<i32>]) -> bool {
    fn go(clauses: Vec<Vec<i32>>) -> bool {
        if clauses.is_empty() {
            return true;
        }
        if clauses.iter().any(|c| c.is_empty()) {
            return false;
        }
        let lit = clauses
            .iter()
            .find(|c| c.len() == 1)
            .map(|c| c[0])
            .unwrap_or(clauses[0][0]);
        let assign = |l: i32| -> Vec<Vec<i32>> {
            clauses
                .iter()
                .filter(|c| !c.contains(&l))
                .map(|c| c.iter().copied().filter(|&x| x != -l).collect())
                .collect()
        };
        go(assign(lit)) || go(assign(-lit))
    }
    go(clauses.to_vec())
}
