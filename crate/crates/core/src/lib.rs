//! Solver workbench for Maze Dash: cover every free cell of a grid with a
//! single agent whose moves slide until blocked.
//!
//! * [`grid`]: puzzle format, slide semantics, verifier
//! * [`backtrack`]: exhaustive depth-first baseline
//! * [`mcts`]: Monte-Carlo tree search with blocked-subtree pruning
//! * [`sat`]: CNF encoding, internal DPLL, DIMACS and external solvers
//! * [`generator`]: solvable instances by random-walk carving
//! * [`bench`]: solver × instance matrices and reports

pub mod backtrack;
pub mod bench;
pub mod generator;
pub mod grid;
pub mod mcts;
pub mod meter;
pub mod sat;
pub mod solve;

pub use backtrack::solve_backtrack;
pub use bench::{
    emit_csv, emit_table, parse_csv, run_bench, BenchConfig, BenchError, BenchRecord, SizeSpec, SolverKind,
};
pub use generator::{generate_puzzle, validate_generated, GenConfig, GenError, GeneratedInstance};
pub use grid::{
    expand_to_cells, format_moves, parse_moves, verify_solution, Coord, Direction, MoveError, Puzzle, PuzzleError,
    SlideState, UndoToken, VerifyResult,
};
pub use mcts::{solve_mcts, MctsConfig};
pub use meter::MemoryMeter;
pub use sat::{solve_sat, solve_sat_with_command};
pub use solve::{SearchLimits, SolveResult, SolveStatus, Timing};
