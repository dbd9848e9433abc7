//! Consistent answers to quantifier-free queries without enumerating repairs.
//!
//! A ground clause fails in some repair exactly when its negation
//! `R(p1) & .. & R(pm) & !R(n1) & .. & !R(nk)` can be made true: the `p`s must
//! be tuples of the instance, and each `n` that is in the instance needs an
//! edge whose other members, together with the `p`s, stay independent.
//! Any such independent set extends to a repair that excludes every `n`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::conflict::ConflictHypergraph;
use crate::error::Result;
use crate::model::{Value, VertexId};
use crate::query::{to_cnf, GroundClause, PreparedQuery, Query, Truth, World};

struct Witness<'g, 'a> {
    graph: &'g ConflictHypergraph<'a>,
    /// Multiplicity of each vertex in the candidate set.
    members: HashMap<VertexId, u32>,
}

impl Witness<'_, '_> {
    fn contains(&self, v: VertexId) -> bool {
        self.members.contains_key(&v)
    }

    /// Adds `vs`, returning false (and leaving the set unchanged) if that
    /// closes an edge.
    fn try_add(&mut self, vs: &[VertexId]) -> bool {
        let mut added = Vec::new();
        for &v in vs {
            if let Some(n) = self.members.get_mut(&v) {
                *n += 1;
                added.push(v);
                continue;
            }
            let closes = self.graph.closes_edge(v, |u| self.members.contains_key(&u));
            if closes {
                self.remove(&added);
                return false;
            }
            self.members.insert(v, 1);
            added.push(v);
        }
        true
    }

    fn remove(&mut self, vs: &[VertexId]) {
        for v in vs {
            let n = self.members.get_mut(v).expect("member");
            *n -= 1;
            if *n == 0 {
                self.members.remove(v);
            }
        }
    }

    fn search(&mut self, blockers: &[(VertexId, Vec<Vec<VertexId>>)]) -> bool {
        let Some(((target, edges), rest)) = blockers.split_first() else {
            return true;
        };
        if self.contains(*target) {
            return false;
        }
        for e in edges {
            let others: Vec<VertexId> = e.iter().copied().filter(|u| u != target).collect();
            if self.try_add(&others) {
                if !self.contains(*target) && self.search(rest) {
                    return true;
                }
                self.remove(&others);
            }
        }
        false
    }
}

/// Whether some repair falsifies `clause`.
pub fn clause_refutable(graph: &ConflictHypergraph<'_>, clause: &GroundClause) -> bool {
    let instance = graph.instance();
    // Tuples the repair must contain: the clause's negative atoms.
    let mut keep = Vec::with_capacity(clause.negative.len());
    for t in &clause.negative {
        match instance.vertex_of(t) {
            Some(v) => keep.push(v),
            None => return false,
        }
    }
    if clause.positive.iter().any(|t| clause.negative.contains(t)) {
        return false;
    }
    // Tuples the repair must leave out; those outside the instance are out already.
    let mut blockers: Vec<(VertexId, Vec<Vec<VertexId>>)> = clause
        .positive
        .iter()
        .filter_map(|t| instance.vertex_of(t))
        .map(|v| (v, graph.edges_containing_id(v)))
        .collect();
    if blockers.iter().any(|(_, edges)| edges.is_empty()) {
        return false;
    }
    blockers.sort_by_key(|(v, edges)| (edges.len(), *v));
    let mut witness = Witness {
        graph,
        members: HashMap::new(),
    };
    witness.try_add(&keep) && witness.search(&blockers)
}

/// Runs `check` over the clauses, on `threads` workers when more than one.
fn any_clause(
    clauses: &[GroundClause],
    threads: usize,
    check: impl Fn(&GroundClause) -> bool + Sync,
) -> bool {
    if threads <= 1 || clauses.len() < 2 {
        return clauses.iter().any(check);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| clauses.par_iter().any(&check)),
        Err(_) => clauses.iter().any(check),
    }
}

/// `true` is a consistent answer to the ground quantifier-free sentence.
pub fn qfree_consistent_true(graph: &ConflictHypergraph<'_>, sentence: &Query) -> Result<bool> {
    qfree_consistent_true_with(graph, sentence, 1)
}

pub fn qfree_consistent_true_with(
    graph: &ConflictHypergraph<'_>,
    sentence: &Query,
    threads: usize,
) -> Result<bool> {
    let clauses = to_cnf(sentence)?;
    Ok(!any_clause(&clauses, threads, |c| clause_refutable(graph, c)))
}

/// Consistent answers to an open quantifier-free query: candidate bindings
/// that are not false when every tuple's membership is unknown, kept when
/// their grounding is true in every repair.
pub fn qfree_consistent_answers(graph: &ConflictHypergraph<'_>, query: &Query) -> Result<Vec<Vec<Value>>> {
    let (answers, _) = qfree_answers_counted(graph, query, 1)?;
    Ok(answers)
}

pub(crate) fn qfree_answers_counted(
    graph: &ConflictHypergraph<'_>,
    query: &Query,
    threads: usize,
) -> Result<(Vec<Vec<Value>>, usize)> {
    let instance = graph.instance();
    let prepared = PreparedQuery::new(instance, query);
    let unknown = vec![Truth::Unknown; instance.len()];
    let candidates = prepared.possible_bindings(&World::partial(instance, &unknown));
    let mut answers = Vec::new();
    for (binding, _) in &candidates {
        let ground = query.ground_values(binding)?;
        if qfree_consistent_true_with(graph, &ground, threads)? {
            answers.push(binding.clone());
        }
    }
    Ok((answers, candidates.len()))
}
