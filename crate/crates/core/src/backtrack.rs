//! Exhaustive depth-first search with chronological backtracking.
//!
//! This is the naive baseline: no look-ahead, children tried in canonical
//! direction order, one shared state mutated through apply/undo. It is also
//! the correctness oracle the other solvers are checked against.

use std::mem::size_of;

use crate::grid::{MoveSet, Puzzle, SlideState, UndoToken};
use crate::meter::MemoryMeter;
use crate::solve::{Deadline, SearchLimits, SolveResult, SolveStatus};

const CLOCK_CHECK_INTERVAL: u64 = 1 << 12;

struct Frame {
    remaining: MoveSet,
    entered_by: Option<UndoToken>,
}

pub fn solve_backtrack(puzzle: &Puzzle, limits: SearchLimits) -> SolveResult {
    let deadline = Deadline::start(limits.timeout_ms);
    let mut meter = MemoryMeter::new();
    let mut state = SlideState::new(puzzle);
    meter.alloc(SlideState::footprint(puzzle));

    let mut stack: Vec<Frame> = Vec::with_capacity(puzzle.free_count());
    let mut nodes_expanded = 1u64;

    let status = if state.is_complete() {
        SolveStatus::Solved(Vec::new())
    } else {
        stack.push(Frame { remaining: state.legal_moves(), entered_by: None });
        meter.alloc(size_of::<Frame>());
        loop {
            let Some(top) = stack.last_mut() else {
                break SolveStatus::Unsolvable;
            };
            let Some(d) = top.remaining.first() else {
                let frame = stack.pop().expect("non-empty");
                meter.free(size_of::<Frame>());
                if let Some(token) = frame.entered_by {
                    state.undo_move(token).expect("frames unwind in stack order");
                }
                continue;
            };
            top.remaining.remove(d);
            let token = state.apply_move(d).expect("remaining moves are legal");
            if state.is_complete() {
                break SolveStatus::Solved(state.moves().to_vec());
            }
            nodes_expanded += 1;
            if limits.max_nodes.is_some_and(|max| nodes_expanded > max)
                || (nodes_expanded.is_multiple_of(CLOCK_CHECK_INTERVAL) && deadline.expired())
            {
                break SolveStatus::LimitExceeded;
            }
            stack.push(Frame { remaining: state.legal_moves(), entered_by: Some(token) });
            meter.alloc(size_of::<Frame>());
        }
    };

    let mut result = SolveResult::new(status);
    result.nodes_expanded = nodes_expanded;
    result.peak_tracked_bytes = meter.peak_bytes() as u64;
    result.timing.elapsed_ms = deadline.elapsed_ms();
    result
}
