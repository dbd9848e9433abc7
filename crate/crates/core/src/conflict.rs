//! The conflict hypergraph: one vertex per tuple, one edge per set of tuples
//! that jointly violates a constraint. Repairs are its maximal independent
//! sets.
//!
//! Edges can be materialized up front or discovered on demand. The lazy mode
//! keeps only hash indexes over the instance, so memory stays linear in the
//! number of tuples.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::constraints::ConstraintSet;
use crate::error::{CqaError, Result};
use crate::matching::{edge_of, for_each_match, CompiledDenial, TupleStore};
use crate::model::{Instance, Tuple, VertexId};

pub const DEFAULT_EDGE_BUDGET: u64 = 10_000_000;

struct Materialized {
    edges: Vec<Vec<VertexId>>,
    incidence: Vec<Vec<u32>>,
}

pub struct ConflictHypergraph<'a> {
    instance: &'a Instance,
    compiled: Vec<CompiledDenial>,
    store: TupleStore<'a>,
    materialized: Option<Materialized>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypergraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    /// Edge size to number of edges of that size.
    pub edge_size_histogram: BTreeMap<usize, usize>,
    pub isolated_vertex_count: usize,
}

fn check_schema(instance: &Instance, cs: &ConstraintSet) -> Result<()> {
    if instance.schema() != cs.schema() {
        return Err(CqaError::Schema(format!(
            "instance schema {} does not match constraint schema {}",
            instance.schema(),
            cs.schema()
        )));
    }
    Ok(())
}

impl<'a> ConflictHypergraph<'a> {
    /// Indexes the instance without enumerating edges.
    pub fn lazy(instance: &'a Instance, cs: &ConstraintSet) -> Result<ConflictHypergraph<'a>> {
        check_schema(instance, cs)?;
        let compiled = cs.compile();
        let store = TupleStore::full(instance.tuples(), &compiled);
        Ok(ConflictHypergraph {
            instance,
            compiled,
            store,
            materialized: None,
        })
    }

    pub fn materialize(instance: &'a Instance, cs: &ConstraintSet) -> Result<ConflictHypergraph<'a>> {
        Self::materialize_with_budget(instance, cs, DEFAULT_EDGE_BUDGET)
    }

    /// Enumerates every edge, failing once more than `budget` distinct edges
    /// have been found.
    pub fn materialize_with_budget(
        instance: &'a Instance,
        cs: &ConstraintSet,
        budget: u64,
    ) -> Result<ConflictHypergraph<'a>> {
        let mut g = Self::lazy(instance, cs)?;
        let edges = g.enumerate_edges(Some(budget))?;
        let mut incidence = vec![Vec::new(); instance.len()];
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v as usize].push(i as u32);
            }
        }
        g.materialized = Some(Materialized { edges, incidence });
        Ok(g)
    }

    fn enumerate_edges(&self, budget: Option<u64>) -> Result<Vec<Vec<VertexId>>> {
        let mut seen: HashSet<Vec<VertexId>> = HashSet::new();
        let mut over = false;
        for c in &self.compiled {
            let flow = for_each_match(c, &self.store, None, |chosen| {
                seen.insert(edge_of(chosen));
                if budget.is_some_and(|b| seen.len() as u64 > b) {
                    over = true;
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if flow.is_break() {
                break;
            }
        }
        if over {
            return Err(CqaError::Budget {
                what: "conflict edge",
                limit: budget.unwrap_or(0),
                hint: "; use the lazy hypergraph (qfree strategy) or raise --edge-budget",
            });
        }
        let mut edges: Vec<Vec<VertexId>> = seen.into_iter().collect();
        edges.sort_unstable();
        Ok(edges)
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn vertex_count(&self) -> usize {
        self.instance.len()
    }

    pub fn is_materialized(&self) -> bool {
        self.materialized.is_some()
    }

    /// Index entries held by the lazy store, in vertex ids.
    pub fn index_footprint(&self) -> usize {
        self.store.index_entries()
    }

    pub fn vertex(&self, t: &Tuple) -> Result<VertexId> {
        self.instance
            .vertex_of(t)
            .ok_or_else(|| CqaError::NotAVertex(t.to_string()))
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.instance.len() {
            Ok(())
        } else {
            Err(CqaError::NotAVertex(format!("#{v}")))
        }
    }

    /// Every edge, sorted. Lazy graphs enumerate them on each call.
    pub fn edges(&self) -> Vec<Vec<VertexId>> {
        match &self.materialized {
            Some(m) => m.edges.clone(),
            None => self.enumerate_edges(None).expect("no budget"),
        }
    }

    /// Distinct edges containing vertex `v`, sorted.
    pub fn edges_containing_id(&self, v: VertexId) -> Vec<Vec<VertexId>> {
        if let Some(m) = &self.materialized {
            return m.incidence[v as usize]
                .iter()
                .map(|&e| m.edges[e as usize].clone())
                .collect();
        }
        let mut found: Vec<Vec<VertexId>> = Vec::new();
        for c in &self.compiled {
            for p in 0..c.literal_count() {
                let _ = for_each_match(c, &self.store, Some((p, v)), |chosen| {
                    found.push(edge_of(chosen));
                    ControlFlow::Continue(())
                });
            }
        }
        found.sort_unstable();
        found.dedup();
        found
    }

    pub fn edges_containing(&self, t: &Tuple) -> Result<Vec<Vec<Tuple>>> {
        let v = self.vertex(t)?;
        Ok(self
            .edges_containing_id(v)
            .into_iter()
            .map(|e| e.into_iter().map(|u| self.instance.tuple(u).clone()).collect())
            .collect())
    }

    /// Whether adding `v` to a set (described by `member`) closes some edge.
    pub fn closes_edge(&self, v: VertexId, member: impl Fn(VertexId) -> bool) -> bool {
        let closes = |e: &[VertexId]| e.iter().all(|&u| u == v || member(u));
        match &self.materialized {
            Some(m) => m.incidence[v as usize]
                .iter()
                .any(|&e| closes(&m.edges[e as usize])),
            None => self.compiled.iter().any(|c| {
                (0..c.literal_count()).any(|p| {
                    for_each_match(c, &self.store, Some((p, v)), |chosen| {
                        if closes(chosen) {
                            ControlFlow::Break(())
                        } else {
                            ControlFlow::Continue(())
                        }
                    })
                    .is_break()
                })
            }),
        }
    }

    /// Whether the vertex set contains no edge.
    pub fn is_independent_ids(&self, set: &[VertexId]) -> Result<bool> {
        for &v in set {
            self.check_vertex(v)?;
        }
        let mut members = vec![false; self.instance.len()];
        for &v in set {
            members[v as usize] = true;
        }
        Ok(!set.iter().any(|&v| self.closes_edge(v, |u| members[u as usize])))
    }

    pub fn is_independent(&self, tuples: &[Tuple]) -> Result<bool> {
        let ids = tuples.iter().map(|t| self.vertex(t)).collect::<Result<Vec<_>>>()?;
        self.is_independent_ids(&ids)
    }

    /// Greedily extends an independent set to a maximal one, scanning the
    /// remaining vertices in canonical order.
    pub fn extend_to_maximal_ids(&self, seed: &[VertexId]) -> Result<Vec<VertexId>> {
        if !self.is_independent_ids(seed)? {
            return Err(CqaError::NotIndependent);
        }
        let mut members = vec![false; self.instance.len()];
        for &v in seed {
            members[v as usize] = true;
        }
        for v in 0..self.instance.len() as VertexId {
            if !members[v as usize] && !self.closes_edge(v, |u| members[u as usize]) {
                members[v as usize] = true;
            }
        }
        Ok((0..self.instance.len() as VertexId)
            .filter(|&v| members[v as usize])
            .collect())
    }

    pub fn extend_to_maximal(&self, seed: &[Tuple]) -> Result<Vec<Tuple>> {
        let ids = seed.iter().map(|t| self.vertex(t)).collect::<Result<Vec<_>>>()?;
        Ok(self
            .extend_to_maximal_ids(&ids)?
            .into_iter()
            .map(|v| self.instance.tuple(v).clone())
            .collect())
    }

    /// Connected components over the edges, each sorted; isolated vertices
    /// form singleton components.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.instance.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.edges() {
            for w in e.windows(2) {
                let (a, b) = (find(&mut parent, w[0] as usize), find(&mut parent, w[1] as usize));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for v in 0..n {
            let root = find(&mut parent, v);
            groups.entry(root).or_default().push(v as VertexId);
        }
        groups.into_values().collect()
    }

    pub fn stats(&self) -> HypergraphStats {
        stats_of(self.instance.len(), &self.edges())
    }

    /// Stats after dropping edges that strictly contain another edge.
    pub fn minimized_stats(&self) -> HypergraphStats {
        stats_of(self.instance.len(), &minimize_edges(self.edges()))
    }
}

fn stats_of(vertex_count: usize, edges: &[Vec<VertexId>]) -> HypergraphStats {
    let mut histogram = BTreeMap::new();
    let mut touched = vec![false; vertex_count];
    for e in edges {
        *histogram.entry(e.len()).or_insert(0) += 1;
        for &v in e {
            touched[v as usize] = true;
        }
    }
    HypergraphStats {
        vertex_count,
        edge_count: edges.len(),
        edge_size_histogram: histogram,
        isolated_vertex_count: touched.iter().filter(|t| !**t).count(),
    }
}

/// Drops every edge that is a strict superset of another edge. Such edges
/// never change which sets are independent.
pub fn minimize_edges(mut edges: Vec<Vec<VertexId>>) -> Vec<Vec<VertexId>> {
    edges.sort_by_key(Vec::len);
    let mut kept: Vec<Vec<VertexId>> = Vec::new();
    for e in edges {
        let subsumed = kept
            .iter()
            .any(|k| k.len() < e.len() && k.iter().all(|v| e.binary_search(v).is_ok()));
        if !subsumed {
            kept.push(e);
        }
    }
    kept.sort_unstable();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_constraints;
    use crate::csv::parse_instance;
    use crate::model::{AttrType, Schema, Value};

    fn setup() -> (Instance, ConstraintSet) {
        let s = Schema::new("R", [("A", AttrType::Sym), ("B", AttrType::Num)]).unwrap();
        let i = parse_instance("A,B\na,1\na,2\na,3\nb,1\nc,5\n", &s).unwrap();
        let cs = parse_constraints("fd: A -> B\ndenial: R(x,n), n > 4", &s).unwrap();
        (i, cs)
    }

    #[test]
    fn lazy_and_materialized_agree() {
        let (i, cs) = setup();
        let m = ConflictHypergraph::materialize(&i, &cs).unwrap();
        let l = ConflictHypergraph::lazy(&i, &cs).unwrap();
        assert_eq!(m.edges(), l.edges());
        assert_eq!(m.edges(), vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![4]]);
        for v in 0..i.len() as VertexId {
            assert_eq!(m.edges_containing_id(v), l.edges_containing_id(v));
        }
        let stats = m.stats();
        assert_eq!(stats.edge_count, 4);
        assert_eq!(stats.isolated_vertex_count, 1);
        assert_eq!(stats.edge_size_histogram[&2], 3);
        assert_eq!(m.components(), vec![vec![0, 1, 2], vec![3], vec![4]]);
    }

    #[test]
    fn independence_and_extension() {
        let (i, cs) = setup();
        let g = ConflictHypergraph::lazy(&i, &cs).unwrap();
        assert!(g.is_independent_ids(&[0, 3]).unwrap());
        assert!(!g.is_independent_ids(&[0, 1]).unwrap());
        assert!(!g.is_independent_ids(&[4]).unwrap());
        assert_eq!(g.extend_to_maximal_ids(&[1]).unwrap(), vec![1, 3]);
        assert!(matches!(g.extend_to_maximal_ids(&[0, 2]), Err(CqaError::NotIndependent)));
        let ghost = Tuple::new(vec![Value::sym("z"), Value::num(0)]);
        assert!(matches!(g.edges_containing(&ghost), Err(CqaError::NotAVertex(_))));
    }

    #[test]
    fn edge_budget() {
        let (i, cs) = setup();
        let err = ConflictHypergraph::materialize_with_budget(&i, &cs, 2).err().unwrap();
        assert!(err.is_budget());
        assert!(err.to_string().contains("lazy"));
    }

    #[test]
    fn minimize_drops_supersets() {
        let kept = minimize_edges(vec![vec![1, 2, 3], vec![2, 3], vec![4], vec![4, 5]]);
        assert_eq!(kept, vec![vec![2, 3], vec![4]]);
    }
}
