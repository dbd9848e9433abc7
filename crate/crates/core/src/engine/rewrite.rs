//! First-order rewriting for `exists t. R(t) & phi(t)` under one FD.
//!
//! With FD `X -> Y` and the remaining attributes `Z`, the query holds in every
//! repair iff some tuple satisfies `phi` and every tuple agreeing with it on
//! `X` has, for its own `Y` values, some tuple satisfying `phi`:
//!
//! ```text
//! exists x,y,z. forall y1,z1. exists z2.
//!     R(x,y,z) & phi(x,y,z) & (R(x,y1,z1) -> R(x,y1,z2) & phi(x,y1,z2))
//! ```

use std::collections::BTreeMap;

use crate::constraints::{BuiltinAtom, Fd, Term};
use crate::error::{CqaError, Result};
use crate::model::Schema;
use crate::query::{Formula, Query};
use crate::syntax::CmpOp;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Part {
    Key,
    Dependent,
    Rest,
}

/// Which copy of the tuple variables to use.
#[derive(Clone, Copy)]
enum Copy {
    Witness,
    Rival,
    Support,
}

fn var(schema: &Schema, part: Part, copy: Copy, pos: usize) -> String {
    let name = &schema.attributes()[pos].name;
    let prefix = match (part, copy) {
        (Part::Key, _) => "x",
        (Part::Dependent, Copy::Witness) => "y",
        (Part::Dependent, _) => "y1",
        (Part::Rest, Copy::Witness) => "z",
        (Part::Rest, Copy::Rival) => "z1",
        (Part::Rest, Copy::Support) => "z2",
    };
    format!("{prefix}_{name}")
}

/// Builds the rewriting of `exists t. R(t) & phi(t)`, where `phi` is a
/// comparison-only formula over the attribute names of `schema`.
pub fn rewrite_single_fd(fd: &Fd, schema: &Schema, phi: &Formula) -> Result<Query> {
    if phi.mentions_relation() || !phi.is_quantifier_free() {
        return Err(CqaError::Rewrite(
            "the selection formula may only combine comparisons".into(),
        ));
    }
    for v in phi.free_vars() {
        if schema.position(&v).is_none() {
            return Err(CqaError::Rewrite(format!(
                "`{v}` is not an attribute of {}",
                schema.relation()
            )));
        }
    }
    let part = |pos: usize| {
        if fd.lhs().contains(&pos) {
            Part::Key
        } else if fd.rhs().contains(&pos) {
            Part::Dependent
        } else {
            Part::Rest
        }
    };
    let atom = |copy: Copy| {
        Formula::Rel(
            (0..schema.arity())
                .map(|p| Term::Var(var(schema, part(p), copy, p)))
                .collect(),
        )
    };
    let selection = |copy: Copy| {
        phi.rename_vars(&|name: &str| {
            let p = schema.position(name).expect("checked attribute");
            var(schema, part(p), copy, p)
        })
    };
    let vars_of = |parts: &[Part], copy: Copy| -> Vec<String> {
        (0..schema.arity())
            .filter(|&p| parts.contains(&part(p)))
            .map(|p| var(schema, part(p), copy, p))
            .collect()
    };
    let support = Formula::exists(
        vars_of(&[Part::Rest], Copy::Support),
        Formula::and(atom(Copy::Support), selection(Copy::Support)),
    );
    let body = Formula::conj([
        atom(Copy::Witness),
        selection(Copy::Witness),
        Formula::implies(atom(Copy::Rival), support),
    ]);
    let rival_vars = vars_of(&[Part::Dependent, Part::Rest], Copy::Rival);
    let formula = Formula::exists(
        vars_of(&[Part::Key, Part::Dependent, Part::Rest], Copy::Witness),
        Formula::forall(rival_vars, body),
    );
    Query::new(schema, formula).map_err(|e| CqaError::Rewrite(e.to_string()))
}

/// Turns the relation atom and comparisons of a single-literal existential
/// query into a selection over attribute names: constants and repeated
/// variables in the atom become equalities.
pub fn selection_of(query: &Query) -> Result<Formula> {
    let shape = query.existential_shape().ok_or_else(|| {
        CqaError::Rewrite("query is not of the form exists t. R(t) & phi(t)".into())
    })?;
    let schema = query.schema();
    let attr = |p: usize| Term::Var(schema.attributes()[p].name.clone());
    let mut renaming: BTreeMap<String, String> = BTreeMap::new();
    let mut parts = Vec::new();
    for (p, t) in shape.atom.iter().enumerate() {
        match t {
            Term::Const(c) => {
                parts.push(Formula::Builtin(BuiltinAtom::new(attr(p), CmpOp::Eq, Term::Const(c.clone()))))
            }
            Term::Var(v) => match renaming.get(v) {
                Some(first) => parts.push(Formula::Builtin(BuiltinAtom::new(
                    Term::Var(first.clone()),
                    CmpOp::Eq,
                    attr(p),
                ))),
                None => {
                    renaming.insert(v.clone(), schema.attributes()[p].name.clone());
                }
            },
        }
    }
    for f in &shape.phi {
        parts.push(f.rename_vars(&|v: &str| renaming[v].clone()));
    }
    Ok(Formula::conj(parts))
}

/// Rewriting of a single-literal existential sentence under one FD.
pub fn rewrite_existential(fd: &Fd, query: &Query) -> Result<Query> {
    rewrite_single_fd(fd, query.schema(), &selection_of(query)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AttrType;
    use crate::query::{parse_phi, parse_query};

    #[test]
    fn degenerate_two_column_shape() {
        let s = Schema::new("R", [("A", AttrType::Sym), ("B", AttrType::Sym)]).unwrap();
        let fd = Fd::parse("A -> B", &s).unwrap();
        let q = rewrite_single_fd(&fd, &s, &parse_phi("B != 'x'", &s).unwrap()).unwrap();
        assert_eq!(
            q.to_string(),
            "exists x_A,y_B. forall y1_B. R(x_A,y_B) & y_B != 'x' & (R(x_A,y1_B) -> R(x_A,y1_B) & y1_B != 'x')"
        );
    }

    #[test]
    fn follows_schema_order() {
        let s = Schema::new(
            "R",
            [("C", AttrType::Num), ("A", AttrType::Sym), ("B", AttrType::Sym)],
        )
        .unwrap();
        let fd = Fd::parse("A -> B", &s).unwrap();
        let q = rewrite_single_fd(&fd, &s, &Formula::True).unwrap();
        let text = q.to_string();
        assert!(text.starts_with("exists z_C,x_A,y_B. forall z1_C,y1_B. R(z_C,x_A,y_B) & true"));
        assert!(text.contains("(exists z2_C. R(z2_C,x_A,y1_B) & true)"));
    }

    #[test]
    fn selection_from_atom() {
        let s = Schema::new(
            "R",
            [("A", AttrType::Sym), ("B", AttrType::Sym), ("C", AttrType::Num)],
        )
        .unwrap();
        let q = parse_query("exists u,n. R(u, 'k', n) & n > 2 & u != 'a'", &s).unwrap();
        let phi = selection_of(&q).unwrap();
        assert_eq!(phi.display("R").to_string(), "B = 'k' & C > 2 & A != 'a'");
        let q = parse_query("exists u,n. R(u, u, n)", &s).unwrap();
        assert_eq!(selection_of(&q).unwrap().display("R").to_string(), "A = B");
    }
}
