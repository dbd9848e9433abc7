mod common;

use std::collections::BTreeSet;

use cqa_core::oracle::exists_falsifying_repair;
use cqa_core::reductions::*;
use cqa_core::workload::{all_graphs, case_rng, random_3sat, random_monotone};
use cqa_core::{parse_constraints, read_instance, serialize_instance};

use common::dpll;

#[test]
fn brute_sat_agrees_with_dpll() {
    for i in 0..300 {
        let f = random_3sat(5, 6, &mut case_rng(21, i));
        assert_eq!(brute_sat(&f).unwrap(), dpll(f.clauses()), "{f}");
    }
}

#[test]
fn monotone_fact_count_is_sum_of_clause_sizes() {
    for i in 0..100 {
        let f = random_monotone(5, 6, &mut case_rng(22, i));
        let r = gen_monotone3sat(&f).unwrap();
        let total: usize = f.clauses().iter().map(Vec::len).sum();
        assert_eq!(r.instance.len(), total, "{f}");
    }
}

#[test]
fn yfree_fact_count_closed_form() {
    for i in 0..100 {
        let f = random_3sat(5, 6, &mut case_rng(23, i));
        let r = gen_3sat_yfree(&f).unwrap();
        let occurrences: usize = f
            .clauses()
            .iter()
            .map(|c| c.iter().collect::<BTreeSet<_>>().len())
            .sum();
        let expected = 3 * f.occurring_vars().len() + 2 * f.clauses().len() + occurrences;
        assert_eq!(r.instance.len(), expected, "{f}");
    }
}

#[test]
fn threecol_fact_count_closed_form() {
    for n in 0..=4 {
        for g in all_graphs(n) {
            let r = gen_3col(&g).unwrap();
            assert_eq!(r.instance.len(), 14 * n + 6 * g.edge_count());
        }
    }
}

#[test]
fn generated_files_round_trip() {
    let f = random_3sat(4, 4, &mut case_rng(24, 0));
    for r in [gen_3sat_yfree(&f).unwrap(), gen_3col(&all_graphs(3)[5]).unwrap()] {
        let back = read_instance(&serialize_instance(&r.instance), "R").unwrap();
        assert_eq!(back, r.instance);
        let cs = parse_constraints(&r.constraints.to_string(), back.schema()).unwrap();
        assert_eq!(cs, r.constraints);
        let q = cqa_core::query::parse_query(&r.query.to_string(), back.schema()).unwrap();
        assert_eq!(q.to_string(), r.query.to_string());
    }
}

#[test]
fn biconditionals_small_sample() {
    for i in 0..25 {
        let f = random_monotone(4, 5, &mut case_rng(25, i));
        let r = gen_monotone3sat(&f).unwrap();
        assert_eq!(
            brute_sat(&f).unwrap(),
            exists_falsifying_repair(&r.instance, &r.constraints, &r.query).unwrap(),
            "{f}"
        );
        let f = random_3sat(4, 5, &mut case_rng(26, i));
        let r = gen_3sat_yfree(&f).unwrap();
        assert_eq!(
            brute_sat(&f).unwrap(),
            exists_falsifying_repair(&r.instance, &r.constraints, &r.query).unwrap(),
            "{f}"
        );
    }
    for g in all_graphs(2) {
        let r = gen_3col(&g).unwrap();
        assert!(exists_falsifying_repair(&r.instance, &r.constraints, &r.query).unwrap());
    }
}

#[test]
fn edge_list_and_dimacs_inputs() {
    let g = Graph::parse_edge_list("1 2\n2 3 # path\n\n4\n").unwrap();
    assert_eq!((g.nodes().len(), g.edge_count()), (4, 2));
    let f = CnfFormula::parse_dimacs("c x\n1 2 0 -1 -2 0\n").unwrap();
    assert!(f.is_monotone());
    assert_eq!(f.num_vars(), 2);
}
