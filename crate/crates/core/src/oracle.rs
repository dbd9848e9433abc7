//! Exact, exponential-time repair enumeration.
//!
//! All searches share one backtracking core that decides vertices in
//! canonical order, trying inclusion first. A branch dies when an excluded
//! vertex can no longer be blocked by any future inclusion, so every leaf is a
//! maximal independent set and each is reached once.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::conflict::{ConflictHypergraph, DEFAULT_EDGE_BUDGET};
use crate::constraints::ConstraintSet;
use crate::error::{CqaError, Result};
use crate::model::{Instance, Value, VertexId};
use crate::query::{PreparedQuery, Query, Truth, World};

/// Search nodes a single oracle call may visit by default.
pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AnswerStatus {
    ConsistentlyTrue,
    ConsistentlyFalse,
    Undetermined,
}

impl std::fmt::Display for AnswerStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AnswerStatus::ConsistentlyTrue => "ConsistentlyTrue",
            AnswerStatus::ConsistentlyFalse => "ConsistentlyFalse",
            AnswerStatus::Undetermined => "Undetermined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Undecided,
    In,
    Out,
}

struct Search<'o> {
    edges: &'o [Vec<VertexId>],
    incidence: &'o [Vec<usize>],
    order: Vec<VertexId>,
    state: Vec<State>,
    visited: u64,
    budget: u64,
}

impl<'o> Search<'o> {
    fn new(oracle: &'o RepairOracle<'_>, order: Vec<VertexId>) -> Self {
        Search {
            edges: &oracle.edges,
            incidence: &oracle.incidence,
            order,
            state: vec![State::Undecided; oracle.incidence.len()],
            visited: 0,
            budget: oracle.budget,
        }
    }

    /// Some edge through `v` has every other member included.
    fn blocked(&self, v: VertexId) -> bool {
        self.incidence[v as usize].iter().any(|&e| {
            self.edges[e]
                .iter()
                .all(|&u| u == v || self.state[u as usize] == State::In)
        })
    }

    /// An excluded, unblocked vertex is dead when every edge through it has
    /// another member that is excluded or can no longer be included.
    fn dead(&self, v: VertexId) -> bool {
        self.incidence[v as usize].iter().all(|&e| {
            self.edges[e].iter().any(|&u| {
                u != v
                    && match self.state[u as usize] {
                        State::Out => true,
                        State::Undecided => self.blocked(u),
                        State::In => false,
                    }
            })
        })
    }

    fn viable(&self, upto: usize) -> bool {
        self.order[..=upto].iter().all(|&v| {
            self.state[v as usize] != State::Out || self.blocked(v) || !self.dead(v)
        })
    }

    /// Kleene view of the current node: undecided vertices that are already
    /// blocked can only end up excluded.
    fn partial_world(&self) -> Vec<Truth> {
        (0..self.state.len() as VertexId)
            .map(|v| match self.state[v as usize] {
                State::In => Truth::True,
                State::Out => Truth::False,
                State::Undecided if self.blocked(v) => Truth::False,
                State::Undecided => Truth::Unknown,
            })
            .collect()
    }

    fn run(
        &mut self,
        k: usize,
        prune: &mut dyn FnMut(&Self) -> bool,
        visit: &mut dyn FnMut(&[VertexId]) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(CqaError::Budget {
                what: "repair search node",
                limit: self.budget,
                hint: "; raise --oracle-budget or use a polynomial strategy",
            });
        }
        if prune(self) {
            return Ok(ControlFlow::Continue(()));
        }
        if k == self.order.len() {
            let maximal = self
                .order
                .iter()
                .all(|&v| self.state[v as usize] == State::In || self.blocked(v));
            if !maximal {
                return Ok(ControlFlow::Continue(()));
            }
            let repair: Vec<VertexId> = self
                .order
                .iter()
                .copied()
                .filter(|&v| self.state[v as usize] == State::In)
                .collect();
            return Ok(visit(&repair));
        }
        let v = self.order[k];
        if !self.blocked(v) {
            self.state[v as usize] = State::In;
            if self.viable(k) {
                let flow = self.run(k + 1, prune, visit)?;
                if flow.is_break() {
                    self.state[v as usize] = State::Undecided;
                    return Ok(flow);
                }
            }
        }
        self.state[v as usize] = State::Out;
        let flow = if self.viable(k) {
            self.run(k + 1, prune, visit)?
        } else {
            ControlFlow::Continue(())
        };
        self.state[v as usize] = State::Undecided;
        Ok(flow)
    }
}

/// Exact repair computations over one instance and constraint set.
pub struct RepairOracle<'a> {
    graph: ConflictHypergraph<'a>,
    edges: Vec<Vec<VertexId>>,
    incidence: Vec<Vec<usize>>,
    budget: u64,
}

impl<'a> RepairOracle<'a> {
    pub fn new(instance: &'a Instance, cs: &ConstraintSet) -> Result<RepairOracle<'a>> {
        Self::with_edge_budget(instance, cs, DEFAULT_EDGE_BUDGET)
    }

    pub fn with_edge_budget(
        instance: &'a Instance,
        cs: &ConstraintSet,
        edge_budget: u64,
    ) -> Result<RepairOracle<'a>> {
        let graph = ConflictHypergraph::materialize_with_budget(instance, cs, edge_budget)?;
        let edges = graph.edges();
        let mut incidence = vec![Vec::new(); graph.vertex_count()];
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v as usize].push(i);
            }
        }
        Ok(RepairOracle {
            graph,
            edges,
            incidence,
            budget: DEFAULT_ORACLE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn graph(&self) -> &ConflictHypergraph<'a> {
        &self.graph
    }

    fn instance(&self) -> &'a Instance {
        self.graph.instance()
    }

    fn all_vertices(&self) -> Vec<VertexId> {
        (0..self.graph.vertex_count() as VertexId).collect()
    }

    /// Calls `visit` with each repair (sorted vertex ids) in canonical order.
    pub fn for_each_repair(
        &self,
        mut visit: impl FnMut(&[VertexId]) -> ControlFlow<()>,
    ) -> Result<()> {
        let mut search = Search::new(self, self.all_vertices());
        let _ = search.run(0, &mut |_| false, &mut visit)?;
        Ok(())
    }

    pub fn repairs(&self) -> Result<Vec<Vec<VertexId>>> {
        let mut out = Vec::new();
        self.for_each_repair(|r| {
            out.push(r.to_vec());
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    /// Number of repairs, as the product of per-component counts. The budget
    /// applies to each component separately.
    pub fn count(&self) -> Result<BigUint> {
        let mut total = BigUint::one();
        for component in self.graph.components() {
            if component.len() == 1 && self.incidence[component[0] as usize].is_empty() {
                continue;
            }
            let mut search = Search::new(self, component);
            let mut n = BigUint::default();
            let _ = search.run(0, &mut |_| false, &mut |_| {
                n += 1u32;
                ControlFlow::Continue(())
            })?;
            total *= n;
        }
        Ok(total)
    }

    /// A repair in which the sentence `query` is false, if any. Branches
    /// where the query is already true under every completion are cut.
    pub fn falsifying_repair(&self, query: &Query) -> Result<Option<Vec<VertexId>>> {
        if !query.is_sentence() {
            return Err(CqaError::Query("expected a sentence".into()));
        }
        let instance = self.instance();
        let prepared = PreparedQuery::new(instance, query);
        let mut search = Search::new(self, self.all_vertices());
        let mut found = None;
        let _ = search.run(
            0,
            &mut |s| {
                let status = s.partial_world();
                prepared.eval(&World::partial(instance, &status), &[]) == Truth::True
            },
            &mut |repair| {
                let mut members = vec![false; instance.len()];
                for &v in repair {
                    members[v as usize] = true;
                }
                if prepared.eval(&World::subset(instance, &members), &[]) == Truth::False {
                    found = Some(repair.to_vec());
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        )?;
        Ok(found)
    }

    /// Status of a sentence, by evaluating it in every repair.
    pub fn status(&self, query: &Query) -> Result<AnswerStatus> {
        self.status_with(query, &[])
    }

    /// Status of `query` under `binding` (values in free-variable order).
    pub fn status_with(&self, query: &Query, binding: &[Value]) -> Result<AnswerStatus> {
        let instance = self.instance();
        let prepared = PreparedQuery::new(instance, query);
        let (mut any_true, mut any_false) = (false, false);
        self.for_each_repair(|repair| {
            let mut members = vec![false; instance.len()];
            for &v in repair {
                members[v as usize] = true;
            }
            match prepared.eval(&World::subset(instance, &members), binding) {
                Truth::True => any_true = true,
                _ => any_false = true,
            }
            if any_true && any_false {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        Ok(match (any_true, any_false) {
            (true, false) => AnswerStatus::ConsistentlyTrue,
            (false, true) => AnswerStatus::ConsistentlyFalse,
            _ => AnswerStatus::Undetermined,
        })
    }

    /// Consistent answers of an open query: every binding over the typed
    /// domain (active domain plus query constants) that holds in all repairs.
    pub fn answers(&self, query: &Query) -> Result<Vec<Vec<Value>>> {
        let instance = self.instance();
        let prepared = PreparedQuery::new(instance, query);
        let domains: Vec<&[Value]> = query
            .free_vars()
            .iter()
            .map(|v| prepared.domain(query.var_type(v).expect("typed variable")))
            .collect();
        let mut candidates: Vec<Vec<Value>> = vec![Vec::new()];
        for d in &domains {
            candidates = candidates
                .into_iter()
                .flat_map(|prefix| {
                    d.iter().map(move |v| {
                        let mut next = prefix.clone();
                        next.push(v.clone());
                        next
                    })
                })
                .collect();
        }
        let mut alive = vec![true; candidates.len()];
        self.for_each_repair(|repair| {
            let mut members = vec![false; instance.len()];
            for &v in repair {
                members[v as usize] = true;
            }
            let world = World::subset(instance, &members);
            for (c, ok) in candidates.iter().zip(alive.iter_mut()) {
                if *ok && prepared.eval(&world, c) != Truth::True {
                    *ok = false;
                }
            }
            if alive.iter().any(|a| *a) {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        })?;
        Ok(candidates
            .into_iter()
            .zip(alive)
            .filter_map(|(c, ok)| ok.then_some(c))
            .collect())
    }
}

/// Every repair as a sub-instance, in canonical order.
pub fn enumerate_repairs(instance: &Instance, cs: &ConstraintSet) -> Result<Vec<Instance>> {
    let oracle = RepairOracle::new(instance, cs)?;
    Ok(oracle
        .repairs()?
        .into_iter()
        .map(|r| instance.restrict(r))
        .collect())
}

pub fn count_repairs(instance: &Instance, cs: &ConstraintSet) -> Result<BigUint> {
    RepairOracle::new(instance, cs)?.count()
}

/// Whether some repair falsifies the sentence `query`.
pub fn exists_falsifying_repair(instance: &Instance, cs: &ConstraintSet, query: &Query) -> Result<bool> {
    Ok(RepairOracle::new(instance, cs)?
        .falsifying_repair(query)?
        .is_some())
}

pub fn oracle_status(instance: &Instance, cs: &ConstraintSet, query: &Query) -> Result<AnswerStatus> {
    RepairOracle::new(instance, cs)?.status(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_constraints;
    use crate::csv::parse_instance;
    use crate::model::{AttrType, Schema};
    use crate::query::parse_query;

    fn schema() -> Schema {
        Schema::new("R", [("A", AttrType::Sym), ("B", AttrType::Num)]).unwrap()
    }

    #[test]
    fn key_violations_multiply() {
        let s = schema();
        let i = parse_instance("A,B\na,1\na,2\na,3\nb,1\nb,2\nc,1\n", &s).unwrap();
        let cs = parse_constraints("fd: A -> B", &s).unwrap();
        let o = RepairOracle::new(&i, &cs).unwrap();
        assert_eq!(o.repairs().unwrap().len(), 6);
        assert_eq!(o.count().unwrap(), BigUint::from(6u32));
        let q = parse_query("exists n. R('a', n) & n <= 2", &s).unwrap();
        assert_eq!(o.status(&q).unwrap(), AnswerStatus::Undetermined);
        assert!(o.falsifying_repair(&q).unwrap().is_some());
        let q = parse_query("exists n. R('a', n)", &s).unwrap();
        assert_eq!(o.status(&q).unwrap(), AnswerStatus::ConsistentlyTrue);
        assert!(o.falsifying_repair(&q).unwrap().is_none());
        let q = parse_query("R('c', 2)", &s).unwrap();
        assert_eq!(o.status(&q).unwrap(), AnswerStatus::ConsistentlyFalse);
        let q = parse_query("R(x, 1)", &s).unwrap();
        assert_eq!(o.answers(&q).unwrap(), vec![vec![Value::sym("c")]]);
    }

    #[test]
    fn singleton_edges_exclude_tuples() {
        let s = schema();
        let i = parse_instance("A,B\na,1\nb,9\n", &s).unwrap();
        let cs = parse_constraints("denial: R(x, n), n > 5", &s).unwrap();
        let reps = enumerate_repairs(&i, &cs).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].len(), 1);
    }

    #[test]
    fn ternary_edges() {
        // Any three tuples with the same B conflict; four such tuples give
        // C(4,2) = 6 repairs of size two.
        let s = schema();
        let i = parse_instance("A,B\na,1\nb,1\nc,1\nd,1\n", &s).unwrap();
        let cs = parse_constraints("denial: R(x,n), R(y,n), R(z,n), x < y, y < z", &s);
        assert!(cs.is_err());
        let cs = parse_constraints("denial: R(x,n), R(y,n), R(z,n), x != y, y != z, x != z", &s).unwrap();
        let reps = RepairOracle::new(&i, &cs).unwrap().repairs().unwrap();
        assert_eq!(reps.len(), 6);
        assert!(reps.iter().all(|r| r.len() == 2));
    }

    #[test]
    fn budget_is_reported() {
        let s = schema();
        let rows: String = (0..12).map(|k| format!("k{k},1\nk{k},2\n")).collect();
        let i = parse_instance(&format!("A,B\n{rows}"), &s).unwrap();
        let cs = parse_constraints("fd: A -> B", &s).unwrap();
        let err = RepairOracle::new(&i, &cs).unwrap().with_budget(100).repairs().unwrap_err();
        assert!(err.is_budget());
        // Per-component counting stays within the same budget.
        let n = RepairOracle::new(&i, &cs).unwrap().with_budget(100).count().unwrap();
        assert_eq!(n, BigUint::from(4096u32));
    }
}
