//! Substitution search for denial-constraint bodies.
//!
//! A denial body is a conjunctive pattern over a single relation. We match it
//! with a left-deep join: literals are visited in a fixed order, each step
//! probes a hash index on the positions already determined by constants or
//! earlier bindings, and every builtin is checked as soon as its variables are
//! bound. Distinct literals may bind to the same tuple.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::ops::ControlFlow;

use crate::constraints::{DenialConstraint, Term};
use crate::model::{Tuple, Value, VertexId};
use crate::syntax::CmpOp;

#[derive(Debug, Clone)]
enum Slot {
    Var(usize),
    Const(Value),
}

#[derive(Debug, Clone)]
struct Step {
    literal: usize,
    key: Vec<usize>,
    /// Builtins whose variables are all bound once this step has matched.
    checks: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct JoinPlan {
    steps: Vec<Step>,
    /// Builtins with no variables, checked once up front.
    ground_checks: Vec<usize>,
}

/// A denial constraint with variables numbered and one join plan per pinned
/// literal (plus one unpinned plan).
#[derive(Debug, Clone)]
pub(crate) struct CompiledDenial {
    literals: Vec<Vec<Slot>>,
    builtins: Vec<(CmpOp, Slot, Slot)>,
    num_vars: usize,
    unpinned: JoinPlan,
    pinned: Vec<JoinPlan>,
}

fn to_slot<'t>(t: &'t Term, names: &mut HashMap<&'t str, usize>) -> Slot {
    match t {
        Term::Const(v) => Slot::Const(v.clone()),
        Term::Var(name) => {
            let next = names.len();
            Slot::Var(*names.entry(name.as_str()).or_insert(next))
        }
    }
}

fn slot_vars(slot: &Slot) -> Option<usize> {
    match slot {
        Slot::Var(v) => Some(*v),
        Slot::Const(_) => None,
    }
}

impl CompiledDenial {
    pub fn new(c: &DenialConstraint) -> CompiledDenial {
        let mut names: HashMap<&str, usize> = HashMap::new();
        let literals: Vec<Vec<Slot>> = c
            .literals()
            .iter()
            .map(|lit| lit.iter().map(|t| to_slot(t, &mut names)).collect())
            .collect();
        let builtins: Vec<(CmpOp, Slot, Slot)> = c
            .builtins()
            .iter()
            .map(|b| (b.op, to_slot(&b.lhs, &mut names), to_slot(&b.rhs, &mut names)))
            .collect();
        let num_vars = names.len();
        let mut compiled = CompiledDenial {
            literals,
            builtins,
            num_vars,
            unpinned: JoinPlan {
                steps: Vec::new(),
                ground_checks: Vec::new(),
            },
            pinned: Vec::new(),
        };
        compiled.unpinned = compiled.plan(None);
        compiled.pinned = (0..compiled.literals.len())
            .map(|p| compiled.plan(Some(p)))
            .collect();
        compiled
    }

    pub fn literal_count(&self) -> usize {
        self.literals.len()
    }

    fn plan(&self, pinned: Option<usize>) -> JoinPlan {
        let n = self.literals.len();
        let mut bound = vec![false; self.num_vars];
        let mut used = vec![false; n];
        let mut steps = Vec::with_capacity(n);
        let builtin_vars: Vec<Vec<usize>> = self
            .builtins
            .iter()
            .map(|(_, l, r)| [l, r].into_iter().filter_map(slot_vars).collect())
            .collect();
        let ground_checks: Vec<usize> = (0..self.builtins.len())
            .filter(|&b| builtin_vars[b].is_empty())
            .collect();
        let mut checked: Vec<bool> = builtin_vars.iter().map(|v| v.is_empty()).collect();
        for k in 0..n {
            let literal = match (k, pinned) {
                (0, Some(p)) => p,
                _ => (0..n)
                    .filter(|&l| !used[l])
                    .max_by_key(|&l| {
                        let determined = self.literals[l]
                            .iter()
                            .filter(|s| match s {
                                Slot::Const(_) => true,
                                Slot::Var(v) => bound[*v],
                            })
                            .count();
                        (determined, std::cmp::Reverse(l))
                    })
                    .expect("unused literal"),
            };
            used[literal] = true;
            let key = if k == 0 && pinned.is_some() {
                Vec::new()
            } else {
                self.literals[literal]
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| match s {
                        Slot::Const(_) => true,
                        Slot::Var(v) => bound[*v],
                    })
                    .map(|(i, _)| i)
                    .collect()
            };
            for s in &self.literals[literal] {
                if let Slot::Var(v) = s {
                    bound[*v] = true;
                }
            }
            let checks: Vec<usize> = (0..self.builtins.len())
                .filter(|&b| !checked[b] && builtin_vars[b].iter().all(|&v| bound[v]))
                .collect();
            for &b in &checks {
                checked[b] = true;
            }
            steps.push(Step {
                literal,
                key,
                checks,
            });
        }
        JoinPlan {
            steps,
            ground_checks,
        }
    }

    /// Position sets that stores must index to run every plan of this constraint.
    pub fn index_keys(&self) -> impl Iterator<Item = &[usize]> + '_ {
        std::iter::once(&self.unpinned)
            .chain(self.pinned.iter())
            .flat_map(|p| p.steps.iter())
            .map(|s| s.key.as_slice())
            .filter(|k| !k.is_empty())
    }
}

fn hash_values<'v>(values: impl Iterator<Item = &'v Value>) -> u64 {
    let mut h = DefaultHasher::new();
    for v in values {
        v.hash(&mut h);
    }
    h.finish()
}

/// Below this many members a store skips indexing and scans.
const SCAN_THRESHOLD: usize = 24;

/// A set of instance tuples with hash indexes on selected position lists.
pub(crate) struct TupleStore<'a> {
    tuples: &'a [Tuple],
    members: Vec<VertexId>,
    indexes: HashMap<Vec<usize>, HashMap<u64, Vec<VertexId>>>,
}

impl<'a> TupleStore<'a> {
    pub fn new<'k>(
        tuples: &'a [Tuple],
        members: Vec<VertexId>,
        keys: impl IntoIterator<Item = &'k [usize]>,
    ) -> TupleStore<'a> {
        let mut indexes = HashMap::new();
        if members.len() > SCAN_THRESHOLD {
            let wanted: HashSet<Vec<usize>> = keys.into_iter().map(<[usize]>::to_vec).collect();
            for key in wanted {
                let mut index: HashMap<u64, Vec<VertexId>> = HashMap::new();
                for &m in &members {
                    let t = &tuples[m as usize];
                    let h = hash_values(key.iter().map(|&p| &t[p]));
                    index.entry(h).or_default().push(m);
                }
                indexes.insert(key, index);
            }
        }
        TupleStore {
            tuples,
            members,
            indexes,
        }
    }

    pub fn full(tuples: &'a [Tuple], compiled: &[CompiledDenial]) -> TupleStore<'a> {
        let members = (0..tuples.len() as VertexId).collect();
        TupleStore::new(tuples, members, compiled.iter().flat_map(|c| c.index_keys()))
    }

    pub fn tuple(&self, v: VertexId) -> &'a Tuple {
        &self.tuples[v as usize]
    }

    /// Number of index entries held (a proxy for memory beyond the tuples).
    pub fn index_entries(&self) -> usize {
        self.indexes
            .values()
            .map(|ix| ix.values().map(Vec::len).sum::<usize>())
            .sum()
    }

    fn candidates(&self, key: &[usize], hash: u64) -> &[VertexId] {
        if key.is_empty() {
            return &self.members;
        }
        match self.indexes.get(key) {
            Some(ix) => ix.get(&hash).map(Vec::as_slice).unwrap_or(&[]),
            None => &self.members,
        }
    }
}

struct Search<'c, 's, 'a, F> {
    c: &'c CompiledDenial,
    plan: &'c JoinPlan,
    store: &'s TupleStore<'a>,
    bindings: Vec<Option<&'c Value>>,
    chosen: Vec<VertexId>,
    visit: F,
}

impl<'c, 's, 'a: 'c, F> Search<'c, 's, 'a, F>
where
    F: FnMut(&[VertexId]) -> ControlFlow<()>,
{
    fn value<'x>(&'x self, s: &'x Slot) -> &'x Value {
        match s {
            Slot::Const(v) => v,
            Slot::Var(v) => self.bindings[*v].expect("bound"),
        }
    }

    fn check(&self, b: usize) -> bool {
        let (op, l, r) = &self.c.builtins[b];
        op.eval(self.value(l), self.value(r)).unwrap_or(false)
    }

    /// Binds the literal's slots against `t`; returns the newly bound vars, or
    /// `None` on a clash (after undoing partial bindings).
    fn unify(&mut self, literal: usize, t: &'a Tuple) -> Option<Vec<usize>> {
        let mut fresh = Vec::new();
        for (pos, s) in self.c.literals[literal].iter().enumerate() {
            let ok = match s {
                Slot::Const(v) => &t[pos] == v,
                Slot::Var(v) => match self.bindings[*v] {
                    Some(b) => b == &t[pos],
                    None => {
                        self.bindings[*v] = Some(&t[pos]);
                        fresh.push(*v);
                        true
                    }
                },
            };
            if !ok {
                for v in fresh {
                    self.bindings[v] = None;
                }
                return None;
            }
        }
        Some(fresh)
    }

    fn step(&mut self, k: usize, pinned: Option<VertexId>) -> ControlFlow<()> {
        if k == self.plan.steps.len() {
            return (self.visit)(&self.chosen);
        }
        let step = &self.plan.steps[k];
        let literal = step.literal;
        let store = self.store;
        let pinned_slot;
        let candidates: &[VertexId] = match (k, pinned) {
            (0, Some(v)) => {
                pinned_slot = [v];
                &pinned_slot
            }
            _ => {
                let hash = hash_values(
                    step.key
                        .iter()
                        .map(|&p| self.value(&self.c.literals[literal][p])),
                );
                store.candidates(&step.key, hash)
            }
        };
        for &v in candidates {
            let t = self.store.tuple(v);
            let Some(fresh) = self.unify(literal, t) else {
                continue;
            };
            let ok = step.checks.iter().all(|&b| self.check(b));
            if ok {
                self.chosen[literal] = v;
                let flow = self.step(k + 1, pinned);
                if flow.is_break() {
                    for var in fresh {
                        self.bindings[var] = None;
                    }
                    return flow;
                }
            }
            for var in fresh {
                self.bindings[var] = None;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Enumerates substitutions of `c` into `store`. With `pinned = Some((p, v))`
/// literal `p` is forced onto vertex `v` (which must belong to the store's
/// tuple array, not necessarily to its members). `visit` receives the vertex
/// matched by each literal, in literal order.
pub(crate) fn for_each_match<F>(
    c: &CompiledDenial,
    store: &TupleStore<'_>,
    pinned: Option<(usize, VertexId)>,
    visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&[VertexId]) -> ControlFlow<()>,
{
    let plan = match pinned {
        Some((p, _)) => &c.pinned[p],
        None => &c.unpinned,
    };
    let mut search = Search {
        c,
        plan,
        store,
        bindings: vec![None; c.num_vars],
        chosen: vec![0; c.literals.len()],
        visit,
    };
    if !plan.ground_checks.iter().all(|&b| search.check(b)) {
        return ControlFlow::Continue(());
    }
    search.step(0, pinned.map(|(_, v)| v))
}

/// Canonical edge from a match: the sorted, de-duplicated vertex set.
pub(crate) fn edge_of(chosen: &[VertexId]) -> Vec<VertexId> {
    let mut e = chosen.to_vec();
    e.sort_unstable();
    e.dedup();
    e
}
