//! Polynomial-time strategies and the dispatcher that picks among them.

mod qfree;
mod rewrite;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::conflict::{ConflictHypergraph, DEFAULT_EDGE_BUDGET};
use crate::constraints::ConstraintSet;
use crate::error::{CqaError, Result};
use crate::model::{Instance, Value};
use crate::oracle::{AnswerStatus, RepairOracle, DEFAULT_ORACLE_BUDGET};
use crate::query::{eval_fo, FragmentTag, PreparedQuery, Query, World, Truth};

pub use qfree::{
    clause_refutable, qfree_consistent_answers, qfree_consistent_true, qfree_consistent_true_with,
};
pub use rewrite::{rewrite_existential, rewrite_single_fd, selection_of};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Auto,
    Qfree,
    Rewrite,
    Oracle,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::Qfree => "qfree",
            Strategy::Rewrite => "rewrite",
            Strategy::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "qfree" => Ok(Strategy::Qfree),
            "rewrite" => Ok(Strategy::Rewrite),
            "oracle" => Ok(Strategy::Oracle),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub oracle_budget: u64,
    pub edge_budget: u64,
    /// Worker threads for independent clause checks; 1 runs inline.
    pub threads: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            oracle_budget: DEFAULT_ORACLE_BUDGET,
            edge_budget: DEFAULT_EDGE_BUDGET,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    /// For sentences.
    Status(AnswerStatus),
    /// For open queries: the consistent bindings, in free-variable order.
    Answers(Vec<Vec<Value>>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub tuples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clauses: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repairs: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    #[serde(flatten)]
    pub answer: Answer,
    pub strategy: Strategy,
    pub free_vars: Vec<String>,
    pub stats: RunStats,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// The strategy `auto` resolves to for this query and constraint set.
pub fn choose_strategy(cs: &ConstraintSet, query: &Query) -> Strategy {
    match query.fragment() {
        FragmentTag::GroundQuantifierFree | FragmentTag::OpenQuantifierFree => Strategy::Qfree,
        FragmentTag::SingleLiteralExistential if cs.single_fd().is_some() => Strategy::Rewrite,
        _ => Strategy::Oracle,
    }
}

fn mismatch(strategy: Strategy, reason: impl Into<String>) -> CqaError {
    CqaError::StrategyMismatch {
        strategy: strategy.as_str(),
        reason: reason.into(),
    }
}

/// Answers `query` on `instance` under `cs` with the requested strategy.
pub fn cqa_answer(
    instance: &Instance,
    cs: &ConstraintSet,
    query: &Query,
    strategy: Strategy,
    options: &EngineOptions,
) -> Result<Outcome> {
    let start = Instant::now();
    if instance.schema() != query.schema() {
        return Err(CqaError::Schema(format!(
            "query is over {} but the instance is {}",
            query.schema(),
            instance.schema()
        )));
    }
    let strategy = match strategy {
        Strategy::Auto => choose_strategy(cs, query),
        s => s,
    };
    let mut stats = RunStats {
        tuples: instance.len(),
        ..RunStats::default()
    };
    let answer = match strategy {
        Strategy::Qfree => {
            if !query.formula().is_quantifier_free() {
                return Err(mismatch(strategy, "the query has quantifiers"));
            }
            let graph = ConflictHypergraph::lazy(instance, cs)?;
            if query.is_sentence() {
                stats.clauses = Some(crate::query::to_cnf(query)?.len());
                if qfree_consistent_true_with(&graph, query, options.threads)? {
                    Answer::Status(AnswerStatus::ConsistentlyTrue)
                } else if qfree_consistent_true_with(&graph, &query.negated(), options.threads)? {
                    Answer::Status(AnswerStatus::ConsistentlyFalse)
                } else {
                    Answer::Status(AnswerStatus::Undetermined)
                }
            } else {
                let (answers, candidates) = qfree::qfree_answers_counted(&graph, query, options.threads)?;
                stats.candidates = Some(candidates);
                Answer::Answers(answers)
            }
        }
        Strategy::Rewrite => {
            let fd = cs
                .single_fd()
                .ok_or_else(|| mismatch(strategy, "the constraints are not exactly one FD"))?;
            if query.fragment() != FragmentTag::SingleLiteralExistential {
                return Err(mismatch(
                    strategy,
                    "the query is not of the form exists t. R(t) & phi(t)",
                ));
            }
            let rewritten = rewrite_existential(fd, query)?;
            let none = Default::default();
            if eval_fo(instance, &rewritten, &none)? {
                Answer::Status(AnswerStatus::ConsistentlyTrue)
            } else if eval_fo(instance, query, &none)? {
                Answer::Status(AnswerStatus::Undetermined)
            } else {
                // Under one FD every tuple lies in some repair, so a query
                // false on the whole instance is false in every repair.
                Answer::Status(AnswerStatus::ConsistentlyFalse)
            }
        }
        Strategy::Oracle => {
            let oracle = RepairOracle::with_edge_budget(instance, cs, options.edge_budget)?
                .with_budget(options.oracle_budget);
            stats.edges = Some(oracle.graph().edges().len());
            if let Ok(n) = oracle.count() {
                stats.repairs = Some(n.to_string());
            }
            if query.is_sentence() {
                Answer::Status(oracle.status(query)?)
            } else {
                Answer::Answers(oracle.answers(query)?)
            }
        }
        Strategy::Auto => unreachable!("resolved above"),
    };
    Ok(Outcome {
        answer,
        strategy,
        free_vars: query.free_vars().to_vec(),
        stats,
        elapsed: start.elapsed(),
    })
}

/// Evaluates `query` on a consistent instance (its only repair).
pub fn plain_answer(instance: &Instance, query: &Query) -> Answer {
    let prepared = PreparedQuery::new(instance, query);
    let world = World::full(instance);
    if query.is_sentence() {
        Answer::Status(match prepared.eval(&world, &[]) {
            Truth::True => AnswerStatus::ConsistentlyTrue,
            _ => AnswerStatus::ConsistentlyFalse,
        })
    } else {
        Answer::Answers(
            prepared
                .possible_bindings(&world)
                .into_iter()
                .map(|(b, _)| b)
                .collect(),
        )
    }
}
