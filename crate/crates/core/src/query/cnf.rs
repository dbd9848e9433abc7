use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{Formula, Query};
use crate::constraints::Term;
use crate::error::{CqaError, Result};
use crate::model::Tuple;

/// A disjunction of ground relation literals. The empty clause is false.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundClause {
    pub positive: Vec<Tuple>,
    pub negative: Vec<Tuple>,
}

impl GroundClause {
    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    /// Truth of the clause in the world described by `member`.
    pub fn holds(&self, member: impl Fn(&Tuple) -> bool) -> bool {
        self.positive.iter().any(&member) || self.negative.iter().any(|t| !member(t))
    }
}

impl fmt::Display for GroundClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("false");
        }
        let lits = self
            .positive
            .iter()
            .map(|t| t.to_string())
            .chain(self.negative.iter().map(|t| format!("!{t}")));
        f.write_str(&lits.collect::<Vec<_>>().join(" | "))
    }
}

type Lit = (Tuple, bool);
type Clauses = BTreeSet<BTreeSet<Lit>>;

fn ground_tuple(terms: &[Term]) -> Tuple {
    Tuple::new(
        terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => unreachable!("variable `{v}` in a ground query"),
            })
            .collect(),
    )
}

fn add_clause(out: &mut Clauses, clause: BTreeSet<Lit>) {
    let tautology = clause.iter().any(|(t, p)| *p && clause.contains(&(t.clone(), false)));
    if !tautology {
        out.insert(clause);
    }
}

fn cnf(f: &Formula, positive: bool) -> Clauses {
    let mut out = Clauses::new();
    match (f, positive) {
        (Formula::True, true) | (Formula::False, false) => {}
        (Formula::False, true) | (Formula::True, false) => {
            out.insert(BTreeSet::new());
        }
        (Formula::Rel(ts), p) => {
            out.insert(BTreeSet::from([(ground_tuple(ts), p)]));
        }
        (Formula::Builtin(b), p) => {
            let (Term::Const(l), Term::Const(r)) = (&b.lhs, &b.rhs) else {
                unreachable!("ground comparison")
            };
            let value = b.op.eval(l, r).expect("type-checked comparison");
            if value != p {
                out.insert(BTreeSet::new());
            }
        }
        (Formula::Not(x), p) => return cnf(x, !p),
        (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
            out = cnf(a, positive);
            out.extend(cnf(b, positive));
        }
        (Formula::Or(a, b), true) | (Formula::And(a, b), false) => {
            let (ca, cb) = (cnf(a, positive), cnf(b, positive));
            for x in &ca {
                for y in &cb {
                    add_clause(&mut out, x.union(y).cloned().collect());
                }
            }
        }
        (Formula::Implies(a, b), true) => {
            let (ca, cb) = (cnf(a, false), cnf(b, true));
            for x in &ca {
                for y in &cb {
                    add_clause(&mut out, x.union(y).cloned().collect());
                }
            }
        }
        (Formula::Implies(a, b), false) => {
            out = cnf(a, true);
            out.extend(cnf(b, false));
        }
        (Formula::Exists(..) | Formula::Forall(..), _) => unreachable!("quantifier-free input"),
    }
    if out.iter().any(BTreeSet::is_empty) {
        return Clauses::from([BTreeSet::new()]);
    }
    out
}

/// Converts a ground quantifier-free query to an equivalent set of clauses.
/// Comparisons are evaluated away, tautologies dropped and duplicate literals
/// merged. No clauses means `true`; a single empty clause means `false`.
pub fn to_cnf(query: &Query) -> Result<Vec<GroundClause>> {
    let f = query.formula();
    if !f.is_quantifier_free() || !query.is_sentence() {
        return Err(CqaError::Query(
            "CNF conversion needs a ground quantifier-free query".into(),
        ));
    }
    Ok(cnf(f, true)
        .into_iter()
        .map(|c| {
            let mut clause = GroundClause {
                positive: Vec::new(),
                negative: Vec::new(),
            };
            for (t, p) in c {
                if p {
                    clause.positive.push(t);
                } else {
                    clause.negative.push(t);
                }
            }
            clause
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AttrType, Schema};
    use crate::query::parse_query;

    fn s() -> Schema {
        Schema::new("R", [("A", AttrType::Sym)]).unwrap()
    }

    fn clauses(text: &str) -> Vec<String> {
        to_cnf(&parse_query(text, &s()).unwrap())
            .unwrap()
            .iter()
            .map(|c| c.to_string())
            .collect()
    }

    #[test]
    fn distributes_and_simplifies() {
        assert_eq!(clauses("R('a') & 'x' = 'x'"), ["(a)"]);
        assert_eq!(clauses("R('a') | 'x' = 'y'"), ["(a)"]);
        assert_eq!(clauses("R('a') | !R('a')"), Vec::<String>::new());
        assert_eq!(clauses("R('a') & !R('a')"), ["!(a)", "(a)"]);
        assert_eq!(clauses("'x' != 'x' | false"), ["false"]);
        assert_eq!(clauses("R('a') -> R('b')"), ["(b) | !(a)"]);
        assert_eq!(clauses("(R('a') & R('b')) | R('c')"), ["(a) | (c)", "(b) | (c)"]);
        assert_eq!(clauses("!(R('a') | R('b') | R('a'))"), ["!(a)", "!(b)"]);
        assert_eq!(clauses("!(R('a') -> R('b'))"), ["(a)", "!(b)"]);
    }

    #[test]
    fn rejects_open_queries() {
        assert!(to_cnf(&parse_query("R(x)", &s()).unwrap()).is_err());
    }
}
