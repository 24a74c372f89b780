mod common;

use mazedash::{
    solve_backtrack, solve_mcts, solve_sat, verify_solution, Coord, MctsConfig, Puzzle, SearchLimits, SolveResult,
    SolveStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solved/Unsolvable verdict of every solver, checked against the oracle.
fn check(p: &Puzzle, seed: u64) {
    let expected = common::has_cover(p);
    let runs: [(&str, SolveResult); 3] = [
        ("backtrack", solve_backtrack(p, SearchLimits::UNBOUNDED)),
        ("mcts", solve_mcts(p, MctsConfig::unbounded(seed))),
        ("sat", solve_sat(p, SearchLimits::UNBOUNDED)),
    ];
    for (name, r) in runs {
        match &r.status {
            SolveStatus::Solved(moves) => {
                assert!(expected, "{name} solved a puzzle with no cover:\n{p}");
                assert!(verify_solution(p, moves).is_valid(), "{name} returned an invalid path on\n{p}");
            }
            SolveStatus::Unsolvable => assert!(!expected, "{name} missed a cover on\n{p}"),
            other => panic!("{name} returned {other} on\n{p}"),
        }
    }
}

#[test]
fn exhaustive_small_grids() {
    let puzzles = common::all_puzzles_with_free_count(10, 10);
    assert!(puzzles.len() > 10_000);
    for (i, p) in puzzles.iter().enumerate() {
        check(p, i as u64);
    }
}

#[test]
fn seeded_random_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..100 {
        let rows = rng.random_range(4..=5);
        let cols = rng.random_range(4..=5);
        let density = rng.random_range(0.0..0.3);
        let start = Coord::new(rng.random_range(0..rows), rng.random_range(0..cols));
        let obstacles: Vec<Coord> = (0..rows * cols)
            .map(|k| Coord::new(k / cols, k % cols))
            .filter(|&c| rng.random_bool(density) && c != start)
            .collect();
        check(&Puzzle::new(rows, cols, obstacles, start).unwrap(), i);
    }
}
