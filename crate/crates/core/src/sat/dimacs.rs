//! DIMACS CNF text format.

use std::fmt::Write;

use thiserror::Error;

use super::{CnfFormula, Lit};

pub fn emit_dimacs(f: &CnfFormula) -> String {
    let mut out = String::with_capacity(16 + f.num_literals() * 6);
    writeln!(out, "p cnf {} {}", f.num_vars(), f.num_clauses()).unwrap();
    for clause in f.clauses() {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("missing 'p cnf' header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("invalid literal {0:?}")]
    BadLiteral(String),
    #[error("literal {0} exceeds declared variable count")]
    LiteralOutOfRange(Lit),
    #[error("empty clause")]
    EmptyClause,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut formula: Option<(CnfFormula, usize)> = None;
    let mut pending: Vec<Lit> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", vars, clauses] => vars.parse::<usize>().ok().zip(clauses.parse::<usize>().ok()),
                _ => None,
            };
            let (vars, clauses) = parsed.ok_or_else(|| DimacsError::BadHeader(line.to_string()))?;
            formula = Some((CnfFormula::new(vars), clauses));
            continue;
        }
        let (f, _) = formula.as_mut().ok_or(DimacsError::MissingHeader)?;
        for token in line.split_whitespace() {
            let lit: Lit = token.parse().map_err(|_| DimacsError::BadLiteral(token.to_string()))?;
            if lit == 0 {
                if pending.is_empty() {
                    return Err(DimacsError::EmptyClause);
                }
                f.add_clause(&pending);
                pending.clear();
            } else if lit.unsigned_abs() as usize > f.num_vars() {
                return Err(DimacsError::LiteralOutOfRange(lit));
            } else {
                pending.push(lit);
            }
        }
    }
    let (mut f, declared) = formula.ok_or(DimacsError::MissingHeader)?;
    if !pending.is_empty() {
        f.add_clause(&pending);
    }
    if f.num_clauses() != declared {
        return Err(DimacsError::ClauseCount { declared, found: f.num_clauses() });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Coord, Puzzle};
    use crate::sat::encode_cnf;

    #[test]
    fn emit_examples() {
        let f = CnfFormula::from_clauses(2, [vec![1], vec![-1, 2]]);
        assert_eq!(emit_dimacs(&f), "p cnf 2 2\n1 0\n-1 2 0\n");
        assert_eq!(emit_dimacs(&CnfFormula::new(5)), "p cnf 5 0\n");
    }

    #[test]
    fn encoded_instance_roundtrips() {
        let p = Puzzle::new(1, 2, [], Coord::new(0, 0)).unwrap();
        let (f, _) = encode_cnf(&p);
        let back = parse_dimacs(&emit_dimacs(&f)).unwrap();
        let sorted = |f: &CnfFormula| {
            let mut v: Vec<Vec<Lit>> = f.clauses().map(<[Lit]>::to_vec).collect();
            v.sort();
            v
        };
        assert_eq!(sorted(&back), sorted(&f));
        assert_eq!(back.num_vars(), f.num_vars());
    }

    #[test]
    fn parse_tolerates_comments_and_wrapped_clauses() {
        let f = parse_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1 0\n").unwrap();
        assert_eq!(f.clauses().collect::<Vec<_>>(), vec![&[1, -2, 3][..], &[-1][..]]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_dimacs("1 0\n"), Err(DimacsError::MissingHeader));
        assert_eq!(parse_dimacs("p cnf 1 1\n2 0\n"), Err(DimacsError::LiteralOutOfRange(2)));
        assert_eq!(parse_dimacs("p cnf 1 2\n1 0\n"), Err(DimacsError::ClauseCount { declared: 2, found: 1 }));
        assert!(matches!(parse_dimacs("p dnf 1 1\n"), Err(DimacsError::BadHeader(_))));
        assert!(matches!(parse_dimacs("p cnf 1 1\nx 0\n"), Err(DimacsError::BadLiteral(_))));
    }
}
