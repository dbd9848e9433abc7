use std::collections::BTreeMap;

use super::{Formula, Query};
use crate::constraints::{parse_term, parse_term_list, type_builtin, BuiltinAtom, Term};
use crate::error::{CqaError, Result};
use crate::model::Schema;
use crate::syntax::{tokenize, Cursor, Tok};

const KEYWORDS: [&str; 4] = ["exists", "forall", "true", "false"];

struct Parser<'s> {
    cur: Cursor,
    schema: &'s Schema,
}

impl Parser<'_> {
    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.cur.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.cur.eat(&Tok::Pipe) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.cur.eat(&Tok::Amp) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        let here = self.cur.here().clone();
        match (self.cur.peek().clone(), self.cur.peek_at(1).clone()) {
            (Tok::Bang, _) => {
                self.cur.bump();
                Ok(Formula::not(self.unary()?))
            }
            (Tok::LParen, _) => {
                self.cur.bump();
                let f = self.formula()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(f)
            }
            (Tok::Ident(kw), Tok::Ident(_)) if kw == "exists" || kw == "forall" => {
                self.cur.bump();
                let mut vars = Vec::new();
                loop {
                    let at = self.cur.here().clone();
                    let v = self.cur.expect_ident()?;
                    if KEYWORDS.contains(&v.as_str()) {
                        return Err(CqaError::syntax(at.line, at.column, format!("`{v}` is reserved")));
                    }
                    if vars.contains(&v) {
                        return Err(CqaError::syntax(
                            at.line,
                            at.column,
                            format!("variable `{v}` listed twice"),
                        ));
                    }
                    vars.push(v);
                    if !self.cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.cur.expect(&Tok::Dot)?;
                let body = self.formula()?;
                Ok(if kw == "exists" {
                    Formula::Exists(vars, Box::new(body))
                } else {
                    Formula::Forall(vars, Box::new(body))
                })
            }
            (Tok::Ident(kw), _) if kw == "true" => {
                self.cur.bump();
                Ok(Formula::True)
            }
            (Tok::Ident(kw), _) if kw == "false" => {
                self.cur.bump();
                Ok(Formula::False)
            }
            (Tok::Ident(name), Tok::LParen) => {
                if name != self.schema.relation() {
                    return Err(CqaError::syntax(
                        here.line,
                        here.column,
                        format!("unknown relation `{name}` (schema is {})", self.schema.relation()),
                    ));
                }
                self.cur.bump();
                let terms = parse_term_list(&mut self.cur)?;
                if terms.len() != self.schema.arity() {
                    return Err(CqaError::syntax(
                        here.line,
                        here.column,
                        format!(
                            "{name} has arity {}, found {} terms",
                            self.schema.arity(),
                            terms.len()
                        ),
                    ));
                }
                self.check_terms(&terms, here.line, here.column)?;
                Ok(Formula::Rel(terms))
            }
            _ => {
                let lhs = parse_term(&mut self.cur)?;
                let op = match self.cur.peek().clone() {
                    Tok::Cmp(op) => {
                        self.cur.bump();
                        op
                    }
                    other => {
                        return Err(self.cur.error(format!(
                            "expected a comparison after `{lhs}`, found {}",
                            other.describe()
                        )))
                    }
                };
                let rhs = parse_term(&mut self.cur)?;
                self.check_terms(&[lhs.clone(), rhs.clone()], here.line, here.column)?;
                Ok(Formula::Builtin(BuiltinAtom::new(lhs, op, rhs)))
            }
        }
    }

    fn check_terms(&self, terms: &[Term], line: usize, column: usize) -> Result<()> {
        for t in terms {
            if let Some(v) = t.as_var() {
                if KEYWORDS.contains(&v) {
                    return Err(CqaError::syntax(line, column, format!("`{v}` is reserved")));
                }
            }
        }
        Ok(())
    }
}

/// Parses a formula without type checking.
pub fn parse_formula(text: &str, schema: &Schema) -> Result<Formula> {
    let mut p = Parser {
        cur: Cursor::new(tokenize(text, 1)?),
        schema,
    };
    if p.cur.at_end() {
        return Err(p.cur.error("empty query"));
    }
    let f = p.formula()?;
    if !p.cur.at_end() {
        return Err(p.cur.error(format!("unexpected {}", p.cur.peek().describe())));
    }
    Ok(f)
}

/// Parses and type-checks a query.
pub fn parse_query(text: &str, schema: &Schema) -> Result<Query> {
    Query::new(schema, parse_formula(text, schema)?)
}

/// Parses a quantifier-free comparison formula whose variables are attribute
/// names of `schema`, e.g. `A != 'x' & C > 2`.
pub fn parse_phi(text: &str, schema: &Schema) -> Result<Formula> {
    let f = parse_formula(text, schema)?;
    if !f.is_quantifier_free() || f.mentions_relation() {
        return Err(CqaError::Query(
            "the selection formula may only combine comparisons".into(),
        ));
    }
    let types: BTreeMap<String, _> = schema
        .attributes()
        .iter()
        .map(|a| (a.name.clone(), a.ty))
        .collect();
    for v in f.free_vars() {
        if !types.contains_key(&v) {
            return Err(CqaError::Query(format!(
                "`{v}` is not an attribute of {}",
                schema.relation()
            )));
        }
    }
    let mut err = None;
    super::walk(&f, &mut |g| {
        if let Formula::Builtin(b) = g {
            if let Err(m) = type_builtin(b, &types) {
                err.get_or_insert(CqaError::Type(m));
            }
        }
    });
    err.map_or(Ok(f), Err)
}
