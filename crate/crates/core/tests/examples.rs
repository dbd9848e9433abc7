use std::collections::BTreeMap;

use cqa_core::conflict::ConflictHypergraph;
use cqa_core::engine::{cqa_answer, qfree_consistent_answers, rewrite_single_fd, Answer, EngineOptions, Strategy};
use cqa_core::oracle::{count_repairs, enumerate_repairs, oracle_status, AnswerStatus, RepairOracle};
use cqa_core::query::{eval_fo, parse_phi, parse_query, FragmentTag};
use cqa_core::reductions::example3_family;
use cqa_core::{parse_constraints, read_instance, ConstraintSet, Instance, Tuple, Value};

fn person() -> (Instance, ConstraintSet) {
    let r = read_instance(include_str!("../../../data/person.csv"), "R").unwrap();
    let cs = parse_constraints(include_str!("../../../data/person.dsl"), r.schema()).unwrap();
    (r, cs)
}

fn tuple(vals: &[&str]) -> Tuple {
    Tuple::new(vals.iter().map(|v| Value::sym(v)).collect())
}

fn answers(r: &Instance, cs: &ConstraintSet, q: &str) -> Answer {
    let q = parse_query(q, r.schema()).unwrap();
    cqa_answer(r, cs, &q, Strategy::Auto, &EngineOptions::default())
        .unwrap()
        .answer
}

#[test]
fn person_has_two_repairs() {
    let (r, cs) = person();
    let repairs = enumerate_repairs(&r, &cs).unwrap();
    assert_eq!(repairs.len(), 2);
    for rep in &repairs {
        assert!(rep.contains(&tuple(&["Green", "Clarence", "4000 Transit"])));
        assert_eq!(rep.len(), 2);
    }
}

#[test]
fn person_consistent_answers() {
    let (r, cs) = person();
    assert_eq!(
        answers(&r, &cs, "Person(n,c,s)"),
        Answer::Answers(vec![vec!["Green".into(), "Clarence".into(), "4000 Transit".into()]])
    );
    assert_eq!(
        answers(&r, &cs, "exists s. Person(n,c,s)"),
        Answer::Answers(vec![
            vec!["Brown".into(), "Amherst".into()],
            vec!["Green".into(), "Clarence".into()],
        ])
    );
    let brown = "Person('Brown','Amherst','115 Klein') | Person('Brown','Amherst','120 Maple')";
    assert_eq!(
        parse_query(brown, r.schema()).unwrap().fragment(),
        FragmentTag::GroundQuantifierFree
    );
    assert_eq!(answers(&r, &cs, brown), Answer::Status(AnswerStatus::ConsistentlyTrue));
    assert_eq!(
        answers(&r, &cs, "Person('Brown','Amherst','115 Klein')"),
        Answer::Status(AnswerStatus::Undetermined)
    );
}

#[test]
fn person_qfree_matches_oracle_on_open_query() {
    let (r, cs) = person();
    let q = parse_query("Person(n,c,s)", r.schema()).unwrap();
    let g = ConflictHypergraph::lazy(&r, &cs).unwrap();
    let fast = qfree_consistent_answers(&g, &q).unwrap();
    let slow = RepairOracle::new(&r, &cs).unwrap().answers(&q).unwrap();
    assert_eq!(fast, slow);
}

#[test]
fn person_edges() {
    let (r, cs) = person();
    let g = ConflictHypergraph::materialize(&r, &cs).unwrap();
    assert_eq!(g.edges_containing(&tuple(&["Brown", "Amherst", "115 Klein"])).unwrap().len(), 1);
    assert!(g.edges_containing(&tuple(&["Green", "Clarence", "4000 Transit"])).unwrap().is_empty());
}

#[test]
fn person_rewriting_amherst() {
    let (r, cs) = person();
    let fd = cs.single_fd().unwrap();
    let phi = parse_phi("City = 'Amherst'", r.schema()).unwrap();
    let q = rewrite_single_fd(fd, r.schema(), &phi).unwrap();
    assert!(eval_fo(&r, &q, &BTreeMap::new()).unwrap());
    let phi = parse_phi("Street = '115 Klein'", r.schema()).unwrap();
    let q = rewrite_single_fd(fd, r.schema(), &phi).unwrap();
    assert!(!eval_fo(&r, &q, &BTreeMap::new()).unwrap());
    let q = parse_query("exists n,c,s. Person(n,c,s) & s = '115 Klein'", r.schema()).unwrap();
    assert_eq!(oracle_status(&r, &cs, &q).unwrap(), AnswerStatus::Undetermined);
    let outcome = cqa_answer(&r, &cs, &q, Strategy::Auto, &EngineOptions::default()).unwrap();
    assert_eq!(outcome.strategy, Strategy::Rewrite);
    assert_eq!(outcome.answer, Answer::Status(AnswerStatus::Undetermined));
}

#[test]
fn example3_counts() {
    for n in 1..=4 {
        let (r, cs) = example3_family(n);
        assert_eq!(enumerate_repairs(&r, &cs).unwrap().len(), 1 << n);
    }
    for n in 1..=10 {
        let (r, cs) = example3_family(n);
        assert_eq!(count_repairs(&r, &cs).unwrap(), (1u64 << n).into());
    }
}

#[test]
fn example3_ground_queries_on_r20() {
    let (r, cs) = example3_family(20);
    let q = |s: &str| parse_query(s, r.schema()).unwrap();
    let opts = EngineOptions::default();
    let status = |s: &str| cqa_answer(&r, &cs, &q(s), Strategy::Qfree, &opts).unwrap().answer;
    assert_eq!(
        status("R('a7','b0') | R('a7','b1')"),
        Answer::Status(AnswerStatus::ConsistentlyTrue)
    );
    assert_eq!(status("R('a7','b0')"), Answer::Status(AnswerStatus::Undetermined));
    assert_eq!(
        status("R('a7','b0') & R('a7','b1')"),
        Answer::Status(AnswerStatus::ConsistentlyFalse)
    );
}

#[test]
fn strategy_mismatch_is_reported() {
    let (r, cs) = person();
    let q = parse_query("exists s. Person(n,c,s)", r.schema()).unwrap();
    let err = cqa_answer(&r, &cs, &q, Strategy::Qfree, &EngineOptions::default()).unwrap_err();
    assert!(matches!(err, cqa_core::CqaError::StrategyMismatch { .. }));
    let q = parse_query("Person(n,c,s)", r.schema()).unwrap();
    let err = cqa_answer(&r, &cs, &q, Strategy::Rewrite, &EngineOptions::default()).unwrap_err();
    assert!(matches!(err, cqa_core::CqaError::StrategyMismatch { .. }));
}
