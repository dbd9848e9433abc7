use std::collections::BTreeSet;
use std::fmt;

use crate::error::{CqaError, Result};

/// Largest variable count `brute_sat` will try.
pub const BRUTE_SAT_LIMIT: u32 = 24;

/// A CNF formula over variables `1..=num_vars`. Literals are signed variable
/// numbers as in DIMACS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    /// Builds a formula, dropping repeated literals inside each clause.
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Result<CnfFormula> {
        let mut out = Vec::with_capacity(clauses.len());
        for clause in clauses {
            let mut seen = BTreeSet::new();
            let mut kept = Vec::new();
            for lit in clause {
                if lit == 0 || lit.unsigned_abs() > num_vars {
                    return Err(CqaError::Reduction(format!(
                        "literal {lit} outside variables 1..={num_vars}"
                    )));
                }
                if seen.insert(lit) {
                    kept.push(lit);
                }
            }
            out.push(kept);
        }
        Ok(CnfFormula {
            num_vars,
            clauses: out,
        })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Variables that occur in some clause, ascending.
    pub fn occurring_vars(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self
            .clauses
            .iter()
            .flatten()
            .map(|l| l.unsigned_abs())
            .collect();
        set.into_iter().collect()
    }

    /// Every clause is all-positive or all-negative.
    pub fn is_monotone(&self) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().all(|&l| l > 0) || c.iter().all(|&l| l < 0))
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    /// Parses DIMACS CNF. The `p cnf` header is optional; clauses end with
    /// `0` and may span lines; `c` lines are comments and `%` ends the input.
    pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
        let mut declared: Option<u32> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        let mut max_var = 0u32;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            if trimmed.starts_with('%') {
                break;
            }
            if trimmed.starts_with('p') {
                let parts: Vec<&str> = trimmed.split_whitespace().collect();
                match parts.as_slice() {
                    ["p", "cnf", vars, _clauses] => {
                        declared = Some(vars.parse().map_err(|_| {
                            CqaError::syntax(line_no, 1, format!("bad variable count `{vars}`"))
                        })?);
                    }
                    _ => return Err(CqaError::syntax(line_no, 1, "expected `p cnf <vars> <clauses>`")),
                }
                continue;
            }
            let mut column = 1;
            for word in line.split_whitespace() {
                column = line[column - 1..].find(word).map_or(column, |o| column + o);
                let lit: i32 = word.parse().map_err(|_| {
                    CqaError::syntax(line_no, column, format!("expected an integer literal, found `{word}`"))
                })?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    max_var = max_var.max(lit.unsigned_abs());
                    current.push(lit);
                }
                column += word.len();
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let num_vars = match declared {
            Some(d) if d < max_var => {
                return Err(CqaError::Reduction(format!(
                    "header declares {d} variables but literal {max_var} occurs"
                )))
            }
            Some(d) => d,
            None => max_var,
        };
        CnfFormula::new(num_vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> = c
                    .iter()
                    .map(|&l| {
                        if l > 0 {
                            format!("p{l}")
                        } else {
                            format!("!p{}", -l)
                        }
                    })
                    .collect();
                format!("({})", lits.join(" | "))
            })
            .collect();
        if parts.is_empty() {
            f.write_str("true")
        } else {
            f.write_str(&parts.join(" & "))
        }
    }
}

/// Satisfiability by trying every assignment.
pub fn brute_sat(f: &CnfFormula) -> Result<bool> {
    if f.num_vars > BRUTE_SAT_LIMIT {
        return Err(CqaError::Budget {
            what: "brute-force variable",
            limit: BRUTE_SAT_LIMIT as u64,
            hint: "",
        });
    }
    let n = f.num_vars as usize;
    let mut assignment = vec![false; n];
    for bits in 0u64..(1u64 << n) {
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = bits >> i & 1 == 1;
        }
        if f.satisfied_by(&assignment) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let f = CnfFormula::parse_dimacs("c hi\np cnf 3 2\n1 -2\n 3 0 -1\n0\n%\n0\n").unwrap();
        assert_eq!(f.clauses(), &[vec![1, -2, 3], vec![-1]]);
        assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
        assert!(CnfFormula::parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        match CnfFormula::parse_dimacs("1 x 0") {
            Err(CqaError::Syntax { at, .. }) => assert_eq!(at.column, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn brute_force() {
        let f = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert!(!brute_sat(&f).unwrap());
        let g = CnfFormula::new(3, vec![vec![1, 2, 3], vec![-1, -2, -3]]).unwrap();
        assert!(brute_sat(&g).unwrap());
        assert!(g.is_monotone());
        assert!(brute_sat(&CnfFormula::new(0, vec![]).unwrap()).unwrap());
        assert!(!brute_sat(&CnfFormula::new(0, vec![vec![]]).unwrap()).unwrap());
        assert!(brute_sat(&CnfFormula::new(30, vec![]).unwrap()).unwrap_err().is_budget());
    }
}
