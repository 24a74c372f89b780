//! Solvable instance generation by random-walk carving.
//!
//! An agent walks an empty grid in straight segments. Whenever it turns
//! before reaching a wall or a visited cell, an obstacle is dropped on the
//! cell straight ahead, as if that obstacle had forced the turn. Cells the
//! walk never reaches become obstacles too. The walk itself, one slide per
//! segment, is therefore a valid cover of the resulting puzzle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::backtrack::solve_backtrack;
use crate::grid::{format_moves, verify_solution, Coord, Direction, Puzzle, SlideState};
use crate::solve::{SearchLimits, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub rows: usize,
    pub cols: usize,
    /// Desired obstacle count. Best effort: the walk steers towards it but
    /// the reported count is whatever the walk produced.
    pub target_obstacles: usize,
    pub seed: u64,
    pub max_retries: u32,
    /// Budget for the backtracking check run on each candidate.
    pub validation: SearchLimits,
}

impl GenConfig {
    pub fn new(rows: usize, cols: usize, target_obstacles: usize, seed: u64) -> GenConfig {
        GenConfig { rows, cols, target_obstacles, seed, max_retries: 100, validation: SearchLimits::UNBOUNDED }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub puzzle: Puzzle,
    /// The carving walk as slide moves; a known solution.
    pub witness: Vec<Direction>,
    pub actual_obstacles: usize,
    pub seed: u64,
    /// Attempts consumed, including the successful one.
    pub attempts: u32,
}

impl GeneratedInstance {
    /// Puzzle text preceded by a comment line recording seed, obstacle count and witness.
    pub fn to_text(&self) -> String {
        format!(
            "; seed={} obstacles={} witness={}\n{}",
            self.seed,
            self.actual_obstacles,
            format_moves(&self.witness),
            self.puzzle.serialize()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("no valid instance after {attempts} attempts")]
    GenerationExhausted { attempts: u32 },
}

/// Seed for retry `attempt`; attempt 0 uses the configured seed unchanged.
fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        return seed;
    }
    // splitmix64 finaliser
    let mut z = seed.wrapping_add(u64::from(attempt).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Carving {
    start: Coord,
    obstacles: Vec<bool>,
    witness: Vec<Direction>,
}

fn step_coord(rows: usize, cols: usize, c: Coord, d: Direction) -> Option<Coord> {
    let (dr, dc) = d.delta();
    let row = c.row.checked_add_signed(dr)?;
    let col = c.col.checked_add_signed(dc)?;
    (row < rows && col < cols).then_some(Coord::new(row, col))
}

/// Length of the open run from `at` in direction `d`.
fn open_run(rows: usize, cols: usize, blocked: &[bool], at: Coord, d: Direction) -> usize {
    let (dr, dc) = d.delta();
    let mut len = 0;
    let (mut r, mut c) = (at.row as isize, at.col as isize);
    loop {
        r += dr;
        c += dc;
        if r < 0 || c < 0 || r >= rows as isize || c >= cols as isize || blocked[r as usize * cols + c as usize] {
            return len;
        }
        len += 1;
    }
}

/// True when every open cell is reachable from `at` and at most one open
/// cell is a dead end (a walk can only finish in one of them).
fn keeps_region_connected(rows: usize, cols: usize, blocked: &[bool], at: Coord, scratch: &mut Vec<usize>) -> bool {
    let open_total = blocked.iter().filter(|&&b| !b).count();
    if open_total == 0 {
        return true;
    }
    let mut seen = vec![false; blocked.len()];
    scratch.clear();
    let mut reached = 0;
    let mut dead_ends = 0;
    for d in Direction::ALL {
        if let Some(n) = step_coord(rows, cols, at, d) {
            let i = n.row * cols + n.col;
            if !blocked[i] && !seen[i] {
                seen[i] = true;
                scratch.push(i);
            }
        }
    }
    while let Some(i) = scratch.pop() {
        reached += 1;
        let here = Coord::new(i / cols, i % cols);
        let mut degree = 0;
        for d in Direction::ALL {
            if let Some(n) = step_coord(rows, cols, here, d) {
                let j = n.row * cols + n.col;
                if !blocked[j] {
                    degree += 1;
                    if !seen[j] {
                        seen[j] = true;
                        scratch.push(j);
                    }
                }
            }
        }
        let touches_agent = here.row.abs_diff(at.row) + here.col.abs_diff(at.col) == 1;
        if degree + usize::from(touches_agent) <= 1 {
            dead_ends += 1;
        }
    }
    reached == open_total && dead_ends <= 1
}

/// Segment nodes a single carving search may expand before settling for the
/// best walk seen so far.
const CARVE_NODE_BUDGET: usize = 500;

/// Independent carving searches tried before settling for the closest walk.
const CARVE_RESTARTS: usize = 20;

/// Scales the chance of stopping a segment short. Low values spread the
/// obstacle budget over the whole walk instead of spending it early.
const STOP_SHORT_PACING: f64 = 0.25;

struct Segment {
    direction: Direction,
    len: usize,
    obstacle: Option<usize>,
}

struct CarveFrame {
    options: Vec<(Direction, usize, usize)>,
    next: usize,
    entered_by: Option<Segment>,
    at: Coord,
}

/// Carving walk found by a randomized depth-first search over segments.
///
/// Any prefix of a walk is itself a valid carving: the cells it never
/// reaches become obstacles. The search therefore scores every node by the
/// obstacle count its walk would produce if it ended there, and keeps the
/// walk closest to `target`, preferring turn obstacles over filler on ties. While obstacles remain in the budget, segments
/// that stop short of their run (dropping an obstacle ahead) are tried first
/// with a probability that spreads the budget over the remaining walk.
/// Segments that would split the unvisited region are only explored when
/// nothing else is possible.
fn carve_once(rows: usize, cols: usize, target: usize, rng: &mut ChaCha8Rng) -> ((usize, usize), Carving) {
    let cells = rows * cols;
    let start_index = rng.random_range(0..cells);
    let start = Coord::new(start_index / cols, start_index % cols);
    // visited or obstacle
    let mut blocked = vec![false; cells];
    blocked[start_index] = true;
    let mut visited = blocked.clone();
    let mut open_left = cells - 1;
    let mut placed = 0usize;
    let mut scratch = Vec::with_capacity(cells);
    let mut trial = blocked.clone();

    let mut best_score = (usize::MAX, usize::MAX);
    let mut best: (Vec<Direction>, Vec<bool>) = (Vec::new(), Vec::new());
    let mut witness: Vec<Direction> = Vec::new();
    let mut stack: Vec<CarveFrame> = Vec::new();
    let mut expanded = 0usize;

    let mut at = start;
    let mut heading = None;
    let mut entered_by = None;
    loop {
        // score this node as a finished walk
        // distance from the target first, then filler obstacles
        let score = ((placed + open_left).abs_diff(target), open_left);
        if score < best_score {
            best_score = score;
            best = (witness.clone(), visited.iter().map(|&v| !v).collect());
        }

        let mut options = Vec::new();
        if best_score != (0, 0) && expanded < CARVE_NODE_BUDGET && placed <= target {
            expanded += 1;
            let budget = target - placed;
            let stop_short = (STOP_SHORT_PACING * budget as f64 / open_left.max(1) as f64).min(1.0);
            let mut stranding = Vec::new();
            for d in Direction::ALL.into_iter().filter(|&d| Some(d) != heading) {
                let run = open_run(rows, cols, &blocked, at, d);
                for len in 1..=run {
                    trial.copy_from_slice(&blocked);
                    let mut end = at;
                    for _ in 0..len {
                        end = step_coord(rows, cols, end, d).expect("in run");
                        trial[end.row * cols + end.col] = true;
                    }
                    if len < run {
                        let ahead = step_coord(rows, cols, end, d).expect("run continues");
                        trial[ahead.row * cols + ahead.col] = true;
                    }
                    if keeps_region_connected(rows, cols, &trial, end, &mut scratch) {
                        options.push((d, len, run));
                    } else {
                        stranding.push((d, len, run));
                    }
                }
            }
            // better to strand part of the grid than to stop here
            if options.is_empty() {
                options = stranding;
            }
            // shuffle, then put the preferred kind of segment first
            for i in (1..options.len()).rev() {
                options.swap(i, rng.random_range(0..=i));
            }
            let prefer_short = budget > 0 && rng.random_bool(stop_short);
            options.sort_by_key(|&(_, len, run)| (len < run) != prefer_short);
        }
        stack.push(CarveFrame { options, next: 0, entered_by: entered_by.take(), at });

        // advance to the next unexplored segment, unwinding exhausted frames
        let next = loop {
            let Some(frame) = stack.last_mut() else { break None };
            if frame.next < frame.options.len() && best_score != (0, 0) {
                let option = frame.options[frame.next];
                frame.next += 1;
                break Some((option, frame.at));
            }
            let frame = stack.pop().expect("non-empty");
            if let Some(seg) = frame.entered_by {
                let mut c = frame.at;
                for _ in 0..seg.len {
                    blocked[c.row * cols + c.col] = false;
                    visited[c.row * cols + c.col] = false;
                    c = step_coord(rows, cols, c, seg.direction.opposite()).expect("retrace");
                }
                open_left += seg.len;
                if let Some(i) = seg.obstacle {
                    blocked[i] = false;
                    open_left += 1;
                    placed -= 1;
                }
                witness.pop();
            }
        };
        let Some(((d, len, run), from)) = next else { break };

        let mut end = from;
        for _ in 0..len {
            end = step_coord(rows, cols, end, d).expect("run stays in bounds");
            blocked[end.row * cols + end.col] = true;
            visited[end.row * cols + end.col] = true;
        }
        open_left -= len;
        let obstacle = (len < run).then(|| {
            let ahead = step_coord(rows, cols, end, d).expect("run continues");
            let i = ahead.row * cols + ahead.col;
            blocked[i] = true;
            i
        });
        if obstacle.is_some() {
            open_left -= 1;
            placed += 1;
        }
        witness.push(d);
        at = end;
        heading = Some(d);
        entered_by = Some(Segment { direction: d, len, obstacle });
    }

    let (witness, obstacles) = best;
    (best_score, Carving { start, obstacles, witness })
}

fn carve(rows: usize, cols: usize, target: usize, rng: &mut ChaCha8Rng) -> Carving {
    let mut best = carve_once(rows, cols, target, rng);
    for _ in 1..CARVE_RESTARTS {
        if best.0 == (0, 0) {
            break;
        }
        let next = carve_once(rows, cols, target, rng);
        if next.0 < best.0 {
            best = next;
        }
    }
    best.1
}

fn build(rows: usize, cols: usize, carving: Carving) -> (Puzzle, Vec<Direction>) {
    let obstacles = (0..rows * cols).filter(|&i| carving.obstacles[i]).map(|i| Coord::new(i / cols, i % cols));
    let puzzle = Puzzle::new(rows, cols, obstacles, carving.start).expect("carved layout is well formed");
    (puzzle, carving.witness)
}

pub fn generate_puzzle(cfg: &GenConfig) -> Result<GeneratedInstance, GenError> {
    if cfg.rows == 0 || cfg.cols == 0 {
        return Err(GenError::InvalidConfig("grid dimensions must be positive".into()));
    }
    if cfg.target_obstacles >= cfg.rows * cfg.cols {
        return Err(GenError::InvalidConfig(format!(
            "target of {} obstacles leaves no free cell on a {}x{} grid",
            cfg.target_obstacles, cfg.rows, cfg.cols
        )));
    }
    if cfg.max_retries == 0 {
        return Err(GenError::InvalidConfig("max_retries must be at least 1".into()));
    }
    for attempt in 0..cfg.max_retries {
        let seed = attempt_seed(cfg.seed, attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (puzzle, witness) = build(cfg.rows, cfg.cols, carve(cfg.rows, cfg.cols, cfg.target_obstacles, &mut rng));
        assert!(verify_solution(&puzzle, &witness).is_valid(), "carved walk must cover the puzzle");
        if solve_backtrack(&puzzle, cfg.validation).status.is_solved() {
            let actual_obstacles = puzzle.obstacle_count();
            return Ok(GeneratedInstance { puzzle, witness, actual_obstacles, seed, attempts: attempt + 1 });
        }
    }
    Err(GenError::GenerationExhausted { attempts: cfg.max_retries })
}

/// True when the witness covers the puzzle and backtracking finds a solution
/// within `limits`.
pub fn validate_generated(g: &GeneratedInstance, limits: SearchLimits) -> bool {
    verify_solution(&g.puzzle, &g.witness).is_valid()
        && matches!(solve_backtrack(&g.puzzle, limits).status, SolveStatus::Solved(_))
}

/// Replays `witness` and checks that each slide stops exactly where the
/// carving walk turned: at a wall, an obstacle or a visited cell.
pub fn turns_are_justified(puzzle: &Puzzle, witness: &[Direction]) -> bool {
    let mut state = SlideState::new(puzzle);
    for &d in witness {
        if state.apply_move(d).is_err() {
            return false;
        }
        if let Some(ahead) = puzzle.step(state.agent(), d) {
            if !puzzle.is_obstacle(ahead) && !state.is_visited(ahead) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corridor_without_obstacles() {
        for seed in 0..20 {
            let g = generate_puzzle(&GenConfig::new(1, 5, 0, seed)).unwrap();
            let w = format_moves(&g.witness);
            assert!(w == "R" || w == "L", "{w}");
            assert!(validate_generated(&g, SearchLimits::UNBOUNDED));
        }
    }

    #[test]
    fn five_by_five_is_deterministic_and_valid() {
        let cfg = GenConfig::new(5, 5, 4, 42);
        let a = generate_puzzle(&cfg).unwrap();
        let b = generate_puzzle(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
        assert!(verify_solution(&a.puzzle, &a.witness).is_valid());
        assert!(turns_are_justified(&a.puzzle, &a.witness));
        assert_eq!(a.actual_obstacles, a.puzzle.obstacle_count());
    }

    #[test]
    fn steers_to_the_obstacle_target() {
        for (rows, cols, target) in [(5, 5, 4), (6, 6, 10), (10, 10, 32)] {
            for seed in 0..5 {
                let g = generate_puzzle(&GenConfig::new(rows, cols, target, seed)).unwrap();
                assert_eq!(g.actual_obstacles, target, "{rows}x{cols} seed {seed}");
            }
        }
    }

    #[test]
    fn damaged_witness_fails_validation() {
        let mut g = generate_puzzle(&GenConfig::new(5, 5, 4, 7)).unwrap();
        assert!(validate_generated(&g, SearchLimits::UNBOUNDED));
        g.witness.pop();
        assert!(!validate_generated(&g, SearchLimits::UNBOUNDED));
    }

    #[test]
    fn fake_witness_on_unsolvable_puzzle_fails_validation() {
        let puzzle = Puzzle::parse(".S.").unwrap();
        let fake =
            GeneratedInstance { puzzle, witness: vec![Direction::Left], actual_obstacles: 0, seed: 0, attempts: 1 };
        assert!(!validate_generated(&fake, SearchLimits::UNBOUNDED));
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(generate_puzzle(&GenConfig::new(2, 2, 4, 0)), Err(GenError::InvalidConfig(_))));
        assert!(matches!(generate_puzzle(&GenConfig::new(0, 2, 0, 0)), Err(GenError::InvalidConfig(_))));
    }

    #[test]
    fn exhausted_when_validation_cannot_finish() {
        let mut cfg = GenConfig::new(6, 6, 3, 1);
        cfg.max_retries = 3;
        cfg.validation = SearchLimits { max_nodes: Some(0), timeout_ms: None };
        let result = generate_puzzle(&cfg);
        // a walk that covers the grid in a single slide needs no search at all
        if let Err(e) = result {
            assert_eq!(e, GenError::GenerationExhausted { attempts: 3 });
        }
    }

    #[test]
    fn retry_seeds_differ() {
        let seeds: Vec<u64> = (0..10).map(|a| attempt_seed(5, a)).collect();
        let mut unique = seeds.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), seeds.len());
        assert_eq!(seeds[0], 5);
    }
}
