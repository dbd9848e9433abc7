//! Differential suites comparing the polynomial strategies and the reduction
//! verifiers against the repair oracle.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::conflict::ConflictHypergraph;
use crate::engine::{cqa_answer, qfree_consistent_true, rewrite_single_fd, Answer, EngineOptions, Strategy};
use crate::error::Result;
use crate::oracle::{exists_falsifying_repair, oracle_status, AnswerStatus};
use crate::query::eval_fo;
use crate::reductions::{brute_3col, brute_sat, gen_3col, gen_3sat_yfree, gen_monotone3sat};
use crate::workload::{all_graphs, case_rng, denial_case, fd_case, random_3sat, random_monotone};

/// How many mismatch descriptions a report keeps.
const KEPT_MISMATCHES: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub agreed: usize,
    /// Cases the oracle gave up on; neither agreement nor disagreement.
    pub over_budget: usize,
    pub mismatches: Vec<String>,
    #[serde(serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.agreed + self.over_budget == self.cases && self.mismatches.is_empty()
    }
}

enum Verdict {
    Agree,
    OverBudget,
    Mismatch(String),
}

fn verdict(outcome: Result<Option<String>>) -> Verdict {
    match outcome {
        Ok(None) => Verdict::Agree,
        Ok(Some(m)) => Verdict::Mismatch(m),
        Err(e) if e.is_budget() => Verdict::OverBudget,
        Err(e) => Verdict::Mismatch(format!("error: {e}")),
    }
}

fn run_suite<F>(name: &str, cases: usize, threads: usize, check: F) -> SuiteReport
where
    F: Fn(usize) -> Result<Option<String>> + Sync,
{
    let start = Instant::now();
    let run = || -> Vec<Verdict> {
        (0..cases)
            .into_par_iter()
            .map(|i| verdict(check(i)))
            .collect()
    };
    let verdicts = if threads > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..cases).map(|i| verdict(check(i))).collect(),
        }
    } else {
        (0..cases).map(|i| verdict(check(i))).collect()
    };
    let mut report = SuiteReport {
        name: name.to_string(),
        cases,
        agreed: 0,
        over_budget: 0,
        mismatches: Vec::new(),
        elapsed: Duration::ZERO,
    };
    let mut mismatch_total = 0;
    for (i, v) in verdicts.into_iter().enumerate() {
        match v {
            Verdict::Agree => report.agreed += 1,
            Verdict::OverBudget => report.over_budget += 1,
            Verdict::Mismatch(m) => {
                mismatch_total += 1;
                if report.mismatches.len() < KEPT_MISMATCHES {
                    report.mismatches.push(format!("case {i}: {m}"));
                }
            }
        }
    }
    if mismatch_total > KEPT_MISMATCHES {
        report
            .mismatches
            .push(format!("... {} more", mismatch_total - KEPT_MISMATCHES));
    }
    report.elapsed = start.elapsed();
    report
}

/// Ground CNF queries under random denials: the clause-refutation test and
/// the full three-valued qfree status against the oracle.
pub fn qfree_suite(seed: u64, cases: usize, threads: usize) -> SuiteReport {
    run_suite("qfree vs oracle", cases, threads, |i| {
        let case = denial_case(10, &mut case_rng(seed, i as u64));
        let expected = oracle_status(&case.instance, &case.constraints, &case.query)?;
        let graph = ConflictHypergraph::lazy(&case.instance, &case.constraints)?;
        let certain = qfree_consistent_true(&graph, &case.query)?;
        if certain != (expected == AnswerStatus::ConsistentlyTrue) {
            return Ok(Some(format!(
                "query {} on {} tuples: qfree says {certain}, oracle says {expected}",
                case.query,
                case.instance.len()
            )));
        }
        let outcome = cqa_answer(
            &case.instance,
            &case.constraints,
            &case.query,
            Strategy::Qfree,
            &EngineOptions::default(),
        )?;
        Ok(match outcome.answer {
            Answer::Status(s) if s == expected => None,
            other => Some(format!("query {}: engine {other:?}, oracle {expected}", case.query)),
        })
    })
}

/// Random FD and selection: the rewritten sentence against the oracle.
pub fn rewrite_suite(seed: u64, cases: usize, threads: usize) -> SuiteReport {
    run_suite("rewrite vs oracle", cases, threads, |i| {
        let case = fd_case(8, &mut case_rng(seed, i as u64));
        let schema = case.instance.schema();
        let rewritten = rewrite_single_fd(&case.fd, schema, &case.phi)?;
        let got = eval_fo(&case.instance, &rewritten, &Default::default())?;
        let expected = oracle_status(&case.instance, &case.constraints, &case.query)?;
        if got != (expected == AnswerStatus::ConsistentlyTrue) {
            return Ok(Some(format!(
                "fd {} phi {}: rewriting says {got}, oracle says {expected}",
                case.fd.display(schema),
                case.phi.display(schema.relation())
            )));
        }
        let outcome = cqa_answer(
            &case.instance,
            &case.constraints,
            &case.query,
            Strategy::Rewrite,
            &EngineOptions::default(),
        )?;
        Ok(match outcome.answer {
            Answer::Status(s) if s == expected => None,
            other => Some(format!("query {}: engine {other:?}, oracle {expected}", case.query)),
        })
    })
}

/// Monotone formulas through the one-FD reduction.
pub fn monotone_suite(seed: u64, cases: usize, threads: usize) -> SuiteReport {
    run_suite("monotone 3SAT reduction", cases, threads, |i| {
        let f = random_monotone(5, 6, &mut case_rng(seed, i as u64));
        let r = gen_monotone3sat(&f)?;
        let sat = brute_sat(&f)?;
        let falsified = exists_falsifying_repair(&r.instance, &r.constraints, &r.query)?;
        Ok((sat != falsified).then(|| format!("{f}: satisfiable {sat}, falsifying repair {falsified}")))
    })
}

/// 3SAT formulas through the single-denial reduction.
pub fn yfree_suite(seed: u64, cases: usize, threads: usize) -> SuiteReport {
    run_suite("3SAT single-denial reduction", cases, threads, |i| {
        let f = random_3sat(5, 6, &mut case_rng(seed, i as u64));
        let r = gen_3sat_yfree(&f)?;
        let sat = brute_sat(&f)?;
        let falsified = exists_falsifying_repair(&r.instance, &r.constraints, &r.query)?;
        Ok((sat != falsified).then(|| format!("{f}: satisfiable {sat}, falsifying repair {falsified}")))
    })
}

/// Every labeled graph on up to `max_nodes` nodes through the two-FD reduction.
pub fn threecol_suite(max_nodes: usize, threads: usize) -> SuiteReport {
    let graphs: Vec<_> = (0..=max_nodes).flat_map(all_graphs).collect();
    run_suite("3-coloring reduction", graphs.len(), threads, |i| {
        let g = &graphs[i];
        let r = gen_3col(g)?;
        let colorable = brute_3col(g)?;
        let falsified = exists_falsifying_repair(&r.instance, &r.constraints, &r.query)?;
        Ok((colorable != falsified).then(|| {
            format!(
                "graph with {} nodes, {} edges: colorable {colorable}, falsifying repair {falsified}",
                g.nodes().len(),
                g.edge_count()
            )
        }))
    })
}

/// The suites behind the `selftest` command, `cases` random cases each.
pub fn run_all(seed: u64, cases: usize, threads: usize) -> Vec<SuiteReport> {
    vec![
        qfree_suite(seed, cases, threads),
        rewrite_suite(seed, cases, threads),
        monotone_suite(seed, cases, threads),
        yfree_suite(seed, cases, threads),
        threecol_suite(3, threads),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for r in run_all(5, 30, 2) {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let a = qfree_suite(9, 20, 1);
        let b = qfree_suite(9, 20, 4);
        assert_eq!((a.agreed, a.mismatches), (b.agreed, b.mismatches));
    }
}
