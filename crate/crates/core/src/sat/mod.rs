//! Propositional encoding of the cover-path problem and the solvers behind it.
//!
//! A model assigns every step `t` of the path exactly one free cell. The
//! encoding lives in [`encode`], the hermetic DPLL backend in [`dpll`], and
//! [`external`] shells out to any SAT-competition-compatible solver.

pub mod decode;
pub mod dimacs;
pub mod dpll;
pub mod encode;
pub mod external;

use std::mem::size_of;

use thiserror::Error;

use crate::grid::{verify_solution, Puzzle};
use crate::meter::MemoryMeter;
use crate::solve::{Deadline, SearchLimits, SolveResult, SolveStatus};

pub use decode::{decode_model, DecodeError};
pub use dimacs::{emit_dimacs, parse_dimacs, DimacsError};
pub use dpll::{solve_sat_internal, solve_sat_internal_with_limits};
pub use encode::{encode_cnf, VarMap};
pub use external::solve_sat_external;

/// A DIMACS-style literal: positive for a variable, negative for its negation.
pub type Lit = i32;

/// Conjunctive normal form formula with flat clause storage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    literals: Vec<Lit>,
    ends: Vec<usize>,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> CnfFormula {
        CnfFormula { num_vars, literals: Vec::new(), ends: Vec::new() }
    }

    pub fn from_clauses<C: AsRef<[Lit]>>(num_vars: usize, clauses: impl IntoIterator<Item = C>) -> CnfFormula {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.add_clause(c.as_ref());
        }
        f
    }

    /// Appends a clause. Panics on an empty clause or an out-of-range literal.
    pub fn add_clause(&mut self, clause: &[Lit]) {
        assert!(!clause.is_empty(), "empty clause");
        for &lit in clause {
            assert!(lit != 0 && lit.unsigned_abs() as usize <= self.num_vars, "literal {lit} out of range");
        }
        self.literals.extend_from_slice(clause);
        self.ends.push(self.literals.len());
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.ends.len()
    }

    pub fn num_literals(&self) -> usize {
        self.literals.len()
    }

    pub fn clause(&self, index: usize) -> &[Lit] {
        let start = if index == 0 { 0 } else { self.ends[index - 1] };
        &self.literals[start..self.ends[index]]
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &[Lit]> + '_ {
        (0..self.ends.len()).map(|i| self.clause(i))
    }

    /// True when `assignment` (indexed by variable - 1) satisfies every clause.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self
                .clauses()
                .all(|clause| clause.iter().any(|&lit| assignment[lit.unsigned_abs() as usize - 1] == (lit > 0)))
    }

    /// Bytes held by the clause database.
    pub fn tracked_bytes(&self) -> usize {
        self.literals.len() * size_of::<Lit>() + self.ends.len() * size_of::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// Truth value per variable, indexed by variable - 1.
    Sat(Vec<bool>),
    Unsat,
    Unknown(String),
}

#[derive(Debug, Error)]
pub enum SatError {
    #[error("failed to launch solver: {0}")]
    SolverLaunchFailure(String),
    #[error("could not parse solver output: {0}")]
    OutputParseError(String),
}

/// Work counters reported by the internal solver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DpllStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub peak_tracked_bytes: usize,
}

fn finish(puzzle: &Puzzle, vm: &VarMap, outcome: SatResult) -> SolveStatus {
    match outcome {
        SatResult::Sat(model) => match decode_model(&model, vm, puzzle) {
            Ok(moves) => {
                assert!(verify_solution(puzzle, &moves).is_valid(), "decoded model is not a valid cover");
                SolveStatus::Solved(moves)
            }
            Err(e) => SolveStatus::Error(e.to_string()),
        },
        SatResult::Unsat => SolveStatus::Unsolvable,
        SatResult::Unknown(reason) if reason == external::TIMEOUT_REASON || reason == dpll::LIMIT_REASON => {
            SolveStatus::LimitExceeded
        }
        SatResult::Unknown(reason) => SolveStatus::Error(reason),
    }
}

/// Encodes, solves with the internal DPLL backend and decodes the model.
pub fn solve_sat(puzzle: &Puzzle, limits: SearchLimits) -> SolveResult {
    let deadline = Deadline::start(limits.timeout_ms);
    let mut meter = MemoryMeter::new();
    let (formula, vm) = encode_cnf(puzzle);
    meter.alloc(formula.tracked_bytes());
    let (outcome, stats) = dpll::solve_with_stats(&formula, limits, &deadline);
    meter.alloc(stats.peak_tracked_bytes);
    let mut result = SolveResult::new(finish(puzzle, &vm, outcome));
    result.nodes_expanded = stats.decisions;
    result.peak_tracked_bytes = meter.peak_bytes() as u64;
    result.timing.elapsed_ms = deadline.elapsed_ms();
    result
}

/// Encodes, hands the DIMACS file to an external solver and decodes its model.
pub fn solve_sat_with_command(puzzle: &Puzzle, command: &str, timeout_ms: Option<u64>) -> SolveResult {
    let deadline = Deadline::start(timeout_ms);
    let (formula, vm) = encode_cnf(puzzle);
    let outcome = solve_sat_external(&formula, command, timeout_ms);
    let mut result = SolveResult::new(finish(puzzle, &vm, outcome));
    result.peak_tracked_bytes = formula.tracked_bytes() as u64;
    result.timing.elapsed_ms = deadline.elapsed_ms();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{parse_moves, Coord};

    #[test]
    fn clause_storage() {
        let f = CnfFormula::from_clauses(3, [vec![1], vec![-1, 2], vec![3, -2, 1]]);
        assert_eq!(f.num_clauses(), 3);
        assert_eq!(f.clause(1), &[-1, 2]);
        assert_eq!(f.clauses().map(<[Lit]>::len).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(f.is_satisfied_by(&[true, true, false]));
        assert!(!f.is_satisfied_by(&[true, false, false]));
    }

    #[test]
    #[should_panic(expected = "empty clause")]
    fn empty_clause_rejected() {
        CnfFormula::new(1).add_clause(&[]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn literal_out_of_range_rejected() {
        CnfFormula::new(1).add_clause(&[2]);
    }

    #[test]
    fn end_to_end_small_instances() {
        let p = Puzzle::new(1, 2, [], Coord::new(0, 0)).unwrap();
        assert_eq!(solve_sat(&p, SearchLimits::UNBOUNDED).status, SolveStatus::Solved(parse_moves("R").unwrap()));
        let p = Puzzle::new(1, 3, [], Coord::new(0, 1)).unwrap();
        assert_eq!(solve_sat(&p, SearchLimits::UNBOUNDED).status, SolveStatus::Unsolvable);
        let p = Puzzle::new(3, 3, [], Coord::new(0, 0)).unwrap();
        let r = solve_sat(&p, SearchLimits::UNBOUNDED);
        assert!(verify_solution(&p, r.status.moves().unwrap()).is_valid());
        assert!(r.peak_tracked_bytes > 0);
    }
}
