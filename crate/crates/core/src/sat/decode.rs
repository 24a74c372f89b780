//! Turning a satisfying assignment back into slide moves.

use thiserror::Error;

use crate::grid::{compress_cells, verify_solution, Coord, Direction, Puzzle, VerifyResult};

use super::VarMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("assignment has {found} variables, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("step {step} has {true_cells} cells set, expected exactly one")]
    MalformedModel { step: usize, true_cells: usize },
    #[error("cells at steps {step} and {} are not adjacent", step + 1)]
    NotAdjacent { step: usize },
    #[error("decoded path does not verify: {0}")]
    InvalidPath(VerifyResult),
}

/// Recovers the cell-per-step path from `assignment` and compresses straight
/// runs into slide moves. The result is checked with the verifier.
pub fn decode_model(assignment: &[bool], vm: &VarMap, puzzle: &Puzzle) -> Result<Vec<Direction>, DecodeError> {
    if assignment.len() != vm.num_vars() {
        return Err(DecodeError::WrongLength { expected: vm.num_vars(), found: assignment.len() });
    }
    let steps = vm.steps();
    let mut cells: Vec<Coord> = Vec::with_capacity(steps);
    for t in 0..steps {
        let row = &assignment[t * steps..(t + 1) * steps];
        let true_cells = row.iter().filter(|&&b| b).count();
        if true_cells != 1 {
            return Err(DecodeError::MalformedModel { step: t, true_cells });
        }
        let slot = row.iter().position(|&b| b).expect("one true cell");
        cells.push(vm.cell(slot));
    }
    let moves = compress_cells(&cells).ok_or_else(|| {
        let step =
            cells.windows(2).position(|w| Direction::between(w[0], w[1]).is_none()).expect("some pair is not adjacent");
        DecodeError::NotAdjacent { step }
    })?;
    match verify_solution(puzzle, &moves) {
        VerifyResult::Valid => Ok(moves),
        other => Err(DecodeError::InvalidPath(other)),
    }
}
