//! Generators that turn SAT and 3-coloring inputs into CQA instances whose
//! query has a falsifying repair exactly when the input is a yes-instance.

mod formula;
mod graph;

use std::collections::BTreeSet;

use crate::constraints::{ConstraintSet, DenialConstraint, Fd, Term};
use crate::error::{CqaError, Result};
use crate::model::{AttrType, Instance, Schema, Tuple, Value};
use crate::query::{parse_query, Query};
use crate::syntax::CmpOp;
use crate::BuiltinAtom;

pub use formula::{brute_sat, CnfFormula, BRUTE_SAT_LIMIT};
pub use graph::{brute_3col, Graph, BRUTE_3COL_LIMIT};

/// Tag for clauses of negative literals in the monotone reduction.
pub const TAG_NEGATIVE: &str = "c";
/// Tag for clauses of positive literals in the monotone reduction.
pub const TAG_POSITIVE: &str = "c_prime";

/// An instance, its constraints and the query whose consistent truth encodes
/// the negation of the source problem.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub instance: Instance,
    pub constraints: ConstraintSet,
    pub query: Query,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeColor {
    P,
    G,
    B,
}

impl EdgeColor {
    /// The symbol stored in the third column.
    pub fn tag(self) -> &'static str {
        match self {
            EdgeColor::P => "p",
            EdgeColor::G => "g",
            EdgeColor::B => "b",
        }
    }
}

/// Undirected bipartite graph whose edges are colored B or G. Edges run from
/// the left part to the right part.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipartiteColoredGraph {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub edges: BTreeSet<(String, String, EdgeColor)>,
}

impl BipartiteColoredGraph {
    pub fn vertex_count(&self) -> usize {
        self.left.len() + self.right.len()
    }

    fn add(&mut self, from: String, to: String, color: EdgeColor) {
        debug_assert!(color != EdgeColor::P);
        self.edges.insert((from, to, color));
    }

    /// The two-colored graph built from `h` for the 3-coloring reduction.
    pub fn from_graph(h: &Graph) -> BipartiteColoredGraph {
        let left = |v: &str, e: &str| format!("{v}_{e}");
        let right = |v: &str, e: &str| format!("{v}_{e}_prime");
        let mut g = BipartiteColoredGraph::default();
        for v in h.nodes() {
            for e in ["m", "n", "r", "g", "b"] {
                g.left.push(left(v, e));
                g.right.push(right(v, e));
            }
            for (a, b) in [
                ("m", "r"),
                ("m", "b"),
                ("n", "b"),
                ("n", "g"),
                ("r", "m"),
                ("b", "m"),
                ("b", "n"),
                ("g", "n"),
            ] {
                g.add(left(v, a), right(v, b), EdgeColor::G);
            }
            for a in ["r", "g", "b"] {
                for b in ["r", "g", "b"] {
                    if a != b {
                        g.add(left(v, a), right(v, b), EdgeColor::B);
                    }
                }
            }
        }
        for (u, v) in h.edges() {
            for e in ["r", "g", "b"] {
                g.add(left(v, e), right(u, e), EdgeColor::B);
                g.add(left(u, e), right(v, e), EdgeColor::B);
            }
        }
        g
    }
}

/// Directed graph with P, G and B colored edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectedColoredGraph {
    pub vertices: Vec<String>,
    pub edges: BTreeSet<(String, String, EdgeColor)>,
}

impl DirectedColoredGraph {
    /// The graph built from `f` for the single-denial reduction. Only
    /// variables occurring in `f` get nodes.
    pub fn from_formula(f: &CnfFormula) -> Result<DirectedColoredGraph> {
        for (j, c) in f.clauses().iter().enumerate() {
            if c.is_empty() || c.len() > 3 {
                return Err(CqaError::Reduction(format!(
                    "clause {} has {} literals; expected 1 to 3",
                    j + 1,
                    c.len()
                )));
            }
        }
        let mut g = DirectedColoredGraph::default();
        let mut edge = |a: String, b: String, c: EdgeColor| {
            g.edges.insert((a, b, c));
        };
        for i in f.occurring_vars() {
            edge(format!("a{i}"), format!("b{i}"), EdgeColor::P);
            edge(format!("b{i}"), format!("d{i}"), EdgeColor::G);
            edge(format!("b{i}"), format!("c{i}"), EdgeColor::B);
        }
        for (j, clause) in f.clauses().iter().enumerate() {
            let j = j + 1;
            edge(format!("e{j}"), format!("f{j}"), EdgeColor::P);
            edge(format!("e{j}"), format!("g{j}"), EdgeColor::G);
            for &lit in clause {
                let color = if lit > 0 { EdgeColor::G } else { EdgeColor::B };
                edge(format!("d{}", lit.unsigned_abs()), format!("e{j}"), color);
            }
        }
        for i in f.occurring_vars() {
            g.vertices.extend(["a", "b", "c", "d"].map(|p| format!("{p}{i}")));
        }
        for j in 1..=f.clauses().len() {
            g.vertices.extend(["e", "f", "g"].map(|p| format!("{p}{j}")));
        }
        Ok(g)
    }
}

fn sym3_schema() -> Schema {
    Schema::new(
        "R",
        [("A", AttrType::Sym), ("B", AttrType::Sym), ("C", AttrType::Sym)],
    )
    .expect("fixed schema")
}

fn edge_instance(
    schema: &Schema,
    edges: &BTreeSet<(String, String, EdgeColor)>,
) -> Result<Instance> {
    Instance::new(
        schema.clone(),
        edges.iter().map(|(a, b, c)| {
            Tuple::new(vec![Value::sym(a), Value::sym(b), Value::sym(c.tag())])
        }),
    )
}

/// Monotone 3SAT to one key FD and `exists x,y,z. R(x,y,'c') & R(z,y,'c_prime')`.
/// Positive clauses are numbered first, then negative ones.
pub fn gen_monotone3sat(f: &CnfFormula) -> Result<Reduction> {
    if !f.is_monotone() {
        return Err(CqaError::Reduction(
            "every clause must be all-positive or all-negative".into(),
        ));
    }
    if f.clauses().iter().any(|c| c.is_empty()) {
        return Err(CqaError::Reduction("empty clause".into()));
    }
    let schema = Schema::new(
        "R",
        [("A", AttrType::Num), ("B", AttrType::Sym), ("C", AttrType::Sym)],
    )?;
    let (positive, negative): (Vec<&Vec<i32>>, Vec<&Vec<i32>>) =
        f.clauses().iter().partition(|c| c[0] > 0);
    let mut tuples = Vec::new();
    for (i, clause) in positive.iter().chain(&negative).enumerate() {
        let tag = if clause[0] > 0 { TAG_POSITIVE } else { TAG_NEGATIVE };
        for lit in clause.iter() {
            tuples.push(Tuple::new(vec![
                Value::num(i as u64 + 1),
                Value::sym(&format!("p{}", lit.unsigned_abs())),
                Value::sym(tag),
            ]));
        }
    }
    let instance = Instance::new(schema.clone(), tuples)?;
    let constraints = ConstraintSet::with_fds(
        schema.clone(),
        [Fd::by_names(&schema, &["A"], &["B", "C"])?],
    );
    let query = parse_query(
        &format!("exists x,y,z. R(x, y, '{TAG_NEGATIVE}') & R(z, y, '{TAG_POSITIVE}')"),
        &schema,
    )?;
    Ok(Reduction {
        instance,
        constraints,
        query,
    })
}

/// 3-coloring to two key FDs and `exists x,y. R(x,y,'b')`.
pub fn gen_3col(h: &Graph) -> Result<Reduction> {
    let schema = sym3_schema();
    let g = BipartiteColoredGraph::from_graph(h);
    let instance = edge_instance(&schema, &g.edges)?;
    let constraints = ConstraintSet::with_fds(
        schema.clone(),
        [
            Fd::by_names(&schema, &["A"], &["B", "C"])?,
            Fd::by_names(&schema, &["B"], &["A", "C"])?,
        ],
    );
    let query = parse_query("exists x,y. R(x, y, 'b')", &schema)?;
    Ok(Reduction {
        instance,
        constraints,
        query,
    })
}

/// The denial forbidding an edge into `y` together with two edges of
/// different colors leaving `y`.
pub fn y_shape_denial(schema: &Schema) -> Result<DenialConstraint> {
    let v = Term::var;
    DenialConstraint::new(
        schema,
        vec![
            vec![v("x"), v("y"), v("s")],
            vec![v("y"), v("z"), v("s1")],
            vec![v("y"), v("w"), v("s2")],
        ],
        vec![BuiltinAtom::new(v("s1"), CmpOp::Ne, v("s2"))],
    )
}

/// 3SAT (at most 3 literals per clause) to one denial and `exists x,y. R(x,y,'p')`.
pub fn gen_3sat_yfree(f: &CnfFormula) -> Result<Reduction> {
    let schema = sym3_schema();
    let g = DirectedColoredGraph::from_formula(f)?;
    let instance = edge_instance(&schema, &g.edges)?;
    let mut constraints = ConstraintSet::new(schema.clone());
    constraints.add_denial(y_shape_denial(&schema)?);
    let query = parse_query("exists x,y. R(x, y, 'p')", &schema)?;
    Ok(Reduction {
        instance,
        constraints,
        query,
    })
}

/// Example 3's instance `{(a_i,b0), (a_i,b1) : i = 1..n}` with FD `A -> B`,
/// which has 2^n repairs.
pub fn example3_family(n: usize) -> (Instance, ConstraintSet) {
    let schema = Schema::new("R", [("A", AttrType::Sym), ("B", AttrType::Sym)])
        .expect("fixed schema");
    let tuples = (1..=n).flat_map(|i| {
        ["b0", "b1"].map(|b| Tuple::new(vec![Value::sym(&format!("a{i}")), Value::sym(b)]))
    });
    let instance = Instance::new(schema.clone(), tuples).expect("well-typed");
    let fd = Fd::by_names(&schema, &["A"], &["B"]).expect("attributes exist");
    (instance, ConstraintSet::with_fds(schema, [fd]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_constraints;
    use crate::oracle::{exists_falsifying_repair, oracle_status, AnswerStatus};

    fn cnf(n: u32, clauses: &[&[i32]]) -> CnfFormula {
        CnfFormula::new(n, clauses.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn holds(r: &Reduction) -> bool {
        exists_falsifying_repair(&r.instance, &r.constraints, &r.query).unwrap()
    }

    #[test]
    fn monotone_examples() {
        let r = gen_monotone3sat(&cnf(3, &[&[1, 2, 3], &[-1, -2, -3]])).unwrap();
        assert_eq!(r.instance.len(), 6);
        assert!(holds(&r));
        let r = gen_monotone3sat(&cnf(1, &[&[-1], &[1]])).unwrap();
        let facts: Vec<String> = r.instance.tuples().iter().map(|t| t.to_string()).collect();
        assert_eq!(facts, ["(1, p1, c_prime)", "(2, p1, c)"]);
        assert_eq!(
            oracle_status(&r.instance, &r.constraints, &r.query).unwrap(),
            AnswerStatus::ConsistentlyTrue
        );
        let r = gen_monotone3sat(&cnf(0, &[])).unwrap();
        assert!(r.instance.is_empty());
        assert_eq!(
            oracle_status(&r.instance, &r.constraints, &r.query).unwrap(),
            AnswerStatus::ConsistentlyFalse
        );
        assert!(gen_monotone3sat(&cnf(2, &[&[1, -2]])).is_err());
        assert!(gen_monotone3sat(&cnf(2, &[&[]])).is_err());
    }

    #[test]
    fn threecol_counts() {
        let mut h = Graph::new();
        h.add_node("v");
        let r = gen_3col(&h).unwrap();
        assert_eq!(r.instance.len(), 14);
        assert!(holds(&r));
        let h = Graph::parse_edge_list("u v").unwrap();
        let r = gen_3col(&h).unwrap();
        assert_eq!(r.instance.len(), 34);
        assert!(holds(&r));
        assert_eq!(BipartiteColoredGraph::from_graph(&h).vertex_count(), 20);
    }

    #[test]
    fn yfree_examples() {
        let f = cnf(1, &[&[1]]);
        assert_eq!(DirectedColoredGraph::from_formula(&f).unwrap().vertices.len(), 7);
        let r = gen_3sat_yfree(&f).unwrap();
        assert_eq!(r.instance.len(), 6);
        assert!(holds(&r));
        let r = gen_3sat_yfree(&cnf(1, &[&[1], &[-1]])).unwrap();
        assert_eq!(
            oracle_status(&r.instance, &r.constraints, &r.query).unwrap(),
            AnswerStatus::ConsistentlyTrue
        );
        assert!(holds(&gen_3sat_yfree(&cnf(3, &[&[1, 2, 3]])).unwrap()));
        assert!(gen_3sat_yfree(&cnf(4, &[&[1, 2, 3, 4]])).is_err());
        assert!(gen_3sat_yfree(&cnf(1, &[&[]])).is_err());
    }

    #[test]
    fn constraints_round_trip() {
        for r in [
            gen_monotone3sat(&cnf(2, &[&[1, 2]])).unwrap(),
            gen_3col(&Graph::complete(2)).unwrap(),
            gen_3sat_yfree(&cnf(2, &[&[1, -2]])).unwrap(),
        ] {
            let text = r.constraints.to_string();
            let back = parse_constraints(&text, r.instance.schema()).unwrap();
            assert_eq!(back, r.constraints, "{text}");
        }
    }

    #[test]
    fn example3_sizes() {
        let (r, cs) = example3_family(3);
        assert_eq!(r.len(), 6);
        assert_eq!(crate::oracle::count_repairs(&r, &cs).unwrap(), 8u32.into());
    }
}
