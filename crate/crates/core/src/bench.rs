//! Solver × instance × repeat matrices with runtime and tracked-memory
//! measurements, reported as CSV or as a markdown table.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backtrack::solve_backtrack;
use crate::generator::{generate_puzzle, GenConfig};
use crate::mcts::{solve_mcts, MctsConfig};
use crate::sat::{solve_sat, solve_sat_with_command};
use crate::solve::{SearchLimits, SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Backtrack,
    Mcts,
    SatInternal,
    SatExternal,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] =
        [SolverKind::Backtrack, SolverKind::Mcts, SolverKind::SatInternal, SolverKind::SatExternal];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Backtrack => "backtrack",
            SolverKind::Mcts => "mcts",
            SolverKind::SatInternal => "sat-internal",
            SolverKind::SatExternal => "sat-external",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = BenchError;

    /// Accepts the report names plus `sat` for the internal SAT solver.
    fn from_str(s: &str) -> Result<SolverKind, BenchError> {
        match s {
            "sat" => Ok(SolverKind::SatInternal),
            _ => SolverKind::ALL
                .into_iter()
                .find(|k| k.name() == s)
                .ok_or_else(|| BenchError::UnknownSolver(s.to_string())),
        }
    }
}

/// Grid dimensions plus the obstacle target handed to the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SizeSpec {
    pub rows: usize,
    pub cols: usize,
    pub obstacles: usize,
}

impl fmt::Display for SizeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}:{}", self.rows, self.cols, self.obstacles)
    }
}

impl FromStr for SizeSpec {
    type Err = BenchError;

    /// Parses `RxC:K`.
    fn from_str(s: &str) -> Result<SizeSpec, BenchError> {
        let bad = || BenchError::BadSize(s.to_string());
        let (dims, k) = s.split_once(':').ok_or_else(bad)?;
        let (r, c) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
        Ok(SizeSpec {
            rows: r.trim().parse().map_err(|_| bad())?,
            cols: c.trim().parse().map_err(|_| bad())?,
            obstacles: k.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Parses a comma-separated list of `RxC:K` sizes.
pub fn parse_sizes(s: &str) -> Result<Vec<SizeSpec>, BenchError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

/// Parses a comma-separated list of solver names.
pub fn parse_solvers(s: &str) -> Result<Vec<SolverKind>, BenchError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| p.trim().parse()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("unknown solver `{0}` (expected backtrack, mcts, sat-internal or sat-external)")]
    UnknownSolver(String),
    #[error("bad size `{0}` (expected RxC:K)")]
    BadSize(String),
    #[error("invalid bench config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<SizeSpec>,
    pub solvers: Vec<SolverKind>,
    pub repeats: u32,
    /// Per-trial budget for every solver.
    pub timeout_ms: u64,
    pub base_seed: u64,
    /// Worker threads; 1 runs everything on the calling thread.
    pub jobs: usize,
    pub exploration_c: f64,
    pub max_iterations: u64,
    /// Command template for `sat-external`, with a `{file}` placeholder.
    pub sat_cmd: Option<String>,
}

impl BenchConfig {
    pub fn new(sizes: Vec<SizeSpec>, solvers: Vec<SolverKind>, repeats: u32) -> BenchConfig {
        let mcts = MctsConfig::default();
        BenchConfig {
            sizes,
            solvers,
            repeats,
            timeout_ms: 60_000,
            base_seed: 0,
            jobs: 1,
            exploration_c: mcts.exploration_c,
            max_iterations: mcts.max_iterations,
            sat_cmd: None,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let invalid = |m: &str| Err(BenchError::InvalidConfig(m.to_string()));
        if self.sizes.is_empty() {
            return invalid("no sizes given");
        }
        if self.solvers.is_empty() {
            return invalid("no solvers given");
        }
        if self.repeats == 0 {
            return invalid("repeats must be at least 1");
        }
        if self.jobs == 0 {
            return invalid("jobs must be at least 1");
        }
        if self.solvers.contains(&SolverKind::SatExternal) && self.sat_cmd.is_none() {
            return invalid("sat-external needs a solver command");
        }
        if let Some(s) = self.sizes.iter().find(|s| s.rows == 0 || s.cols == 0 || s.obstacles >= s.rows * s.cols) {
            return Err(BenchError::InvalidConfig(format!("size {s} leaves no free cell")));
        }
        Ok(())
    }
}

/// One (instance, solver, trial) measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub rows: usize,
    pub cols: usize,
    /// Obstacles in the generated instance (not the target).
    pub obstacles: usize,
    pub solver: SolverKind,
    pub trial: u32,
    pub seed: u64,
    pub status: String,
    pub runtime_ms: f64,
    pub peak_tracked_bytes: u64,
    pub nodes_expanded: u64,
    pub rollout_steps: u64,
    pub free_cells: usize,
    pub iterations: u64,
}

pub const CSV_HEADER: &str = "rows,cols,obstacles,solver,trial,seed,status,runtime_ms,peak_tracked_bytes,nodes_expanded,rollout_steps,free_cells,iterations";

fn run_solver(cfg: &BenchConfig, kind: SolverKind, puzzle: &crate::grid::Puzzle, seed: u64) -> SolveResult {
    let limits = SearchLimits::with_timeout_ms(cfg.timeout_ms);
    match kind {
        SolverKind::Backtrack => solve_backtrack(puzzle, limits),
        SolverKind::Mcts => solve_mcts(
            puzzle,
            MctsConfig {
                exploration_c: cfg.exploration_c,
                max_iterations: cfg.max_iterations,
                timeout_ms: Some(cfg.timeout_ms),
                seed,
            },
        ),
        SolverKind::SatInternal => solve_sat(puzzle, limits),
        SolverKind::SatExternal => {
            solve_sat_with_command(puzzle, cfg.sat_cmd.as_deref().expect("validated"), Some(cfg.timeout_ms))
        }
    }
}

/// All records for one (size, trial): one instance shared by every solver.
fn run_trial(cfg: &BenchConfig, size: SizeSpec, trial: u32) -> Vec<BenchRecord> {
    let seed = cfg.base_seed.wrapping_add(u64::from(trial));
    let mut gen = GenConfig::new(size.rows, size.cols, size.obstacles, seed);
    gen.validation = SearchLimits::with_timeout_ms(cfg.timeout_ms);
    let instance = generate_puzzle(&gen);
    cfg.solvers
        .iter()
        .map(|&solver| {
            let mut record = BenchRecord {
                rows: size.rows,
                cols: size.cols,
                obstacles: 0,
                solver,
                trial,
                seed,
                status: String::new(),
                runtime_ms: 0.0,
                peak_tracked_bytes: 0,
                nodes_expanded: 0,
                rollout_steps: 0,
                free_cells: 0,
                iterations: 0,
            };
            let g = match &instance {
                Ok(g) => g,
                Err(_) => {
                    record.status = SolveStatus::Error(String::new()).label().to_string();
                    return record;
                }
            };
            let start = Instant::now();
            let result = run_solver(cfg, solver, &g.puzzle, seed);
            record.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            record.obstacles = g.actual_obstacles;
            record.free_cells = g.puzzle.free_count();
            record.status = result.status.label().to_string();
            record.peak_tracked_bytes = result.peak_tracked_bytes;
            record.nodes_expanded = result.nodes_expanded;
            record.rollout_steps = result.rollout_steps;
            record.iterations = result.iterations;
            record
        })
        .collect()
}

/// Runs the whole matrix. Records come back ordered by size (config order),
/// trial, then solver (config order), however many jobs ran them.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    cfg.validate()?;
    let units: Vec<(usize, u32)> = (0..cfg.sizes.len()).flat_map(|s| (0..cfg.repeats).map(move |t| (s, t))).collect();
    let run = |&(s, t): &(usize, u32)| ((s, t), run_trial(cfg, cfg.sizes[s], t));
    let mut done: Vec<((usize, u32), Vec<BenchRecord>)> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        pool.install(|| units.par_iter().map(run).collect())
    } else {
        units.iter().map(run).collect()
    };
    done.sort_by_key(|(key, _)| *key);
    Ok(done.into_iter().flat_map(|(_, records)| records).collect())
}

/// CSV with a fixed header, one line per record.
pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("records serialize to CSV");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV is UTF-8");
    format!("{CSV_HEADER}\n{body}")
}

/// Reads back what [`emit_csv`] wrote.
pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

struct Cell {
    trials: usize,
    solved: usize,
    runtime_ms: f64,
    peak_bytes: f64,
}

/// Markdown table: one row per grid size (ascending area), a runtime and a
/// memory column per solver (order of first appearance). Means are over the
/// solved trials; `Failed` when none solved.
pub fn emit_table(records: &[BenchRecord]) -> String {
    let mut solvers: Vec<SolverKind> = Vec::new();
    let mut sizes: Vec<(usize, usize)> = Vec::new();
    for r in records {
        if !solvers.contains(&r.solver) {
            solvers.push(r.solver);
        }
        if !sizes.contains(&(r.rows, r.cols)) {
            sizes.push((r.rows, r.cols));
        }
    }
    sizes.sort_by_key(|&(r, c)| (r * c, r));

    let mut out = String::from("| Grid | Obstacles |");
    for s in &solvers {
        write!(out, " {s} Run-Time(S) | {s} Memory(MB) |").unwrap();
    }
    out.push_str("\n|---|---|");
    out.push_str(&"---|---|".repeat(solvers.len()));
    out.push('\n');

    for &(rows, cols) in &sizes {
        let at_size: Vec<&BenchRecord> = records.iter().filter(|r| (r.rows, r.cols) == (rows, cols)).collect();
        let obstacles = mean(at_size.iter().filter(|r| r.status != "Error").map(|r| r.obstacles as f64));
        write!(out, "| {rows}x{cols} | {} |", trim_float(obstacles)).unwrap();
        for &s in &solvers {
            let mut cell = Cell { trials: 0, solved: 0, runtime_ms: 0.0, peak_bytes: 0.0 };
            for r in at_size.iter().filter(|r| r.solver == s) {
                cell.trials += 1;
                if r.status == "Solved" {
                    cell.solved += 1;
                    cell.runtime_ms += r.runtime_ms;
                    cell.peak_bytes += r.peak_tracked_bytes as f64;
                }
            }
            if cell.solved == 0 {
                out.push_str(" Failed | Failed |");
                continue;
            }
            let n = cell.solved as f64;
            let partial =
                if cell.solved < cell.trials { format!(" ({}/{})", cell.solved, cell.trials) } else { String::new() };
            write!(
                out,
                " {:.6}{partial} | {:.4} |",
                cell.runtime_ms / n / 1e3,
                cell.peak_bytes / n / (1024.0 * 1024.0)
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn trim_float(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(rows: usize, solver: SolverKind, status: &str, runtime_ms: f64) -> BenchRecord {
        BenchRecord {
            rows,
            cols: rows,
            obstacles: 1,
            solver,
            trial: 0,
            seed: 0,
            status: status.to_string(),
            runtime_ms,
            peak_tracked_bytes: 1 << 20,
            nodes_expanded: 3,
            rollout_steps: 0,
            free_cells: rows * rows - 1,
            iterations: 0,
        }
    }

    #[test]
    fn parses_sizes_and_solvers() {
        assert_eq!(
            parse_sizes("5x5:4, 10x12:32").unwrap(),
            vec![SizeSpec { rows: 5, cols: 5, obstacles: 4 }, SizeSpec { rows: 10, cols: 12, obstacles: 32 }]
        );
        assert!(matches!(parse_sizes("5x5"), Err(BenchError::BadSize(_))));
        assert_eq!(
            parse_solvers("backtrack,sat,mcts").unwrap(),
            vec![SolverKind::Backtrack, SolverKind::SatInternal, SolverKind::Mcts]
        );
        assert!(matches!(parse_solvers("bfs"), Err(BenchError::UnknownSolver(_))));
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(emit_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn three_records_four_lines() {
        let records = vec![
            record(5, SolverKind::Backtrack, "Solved", 1.0),
            record(5, SolverKind::Mcts, "Solved", 2.0),
            record(5, SolverKind::SatInternal, "LimitExceeded", 3.0),
        ];
        let text = emit_csv(&records);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(parse_csv(&text).unwrap(), records);
    }

    #[test]
    fn table_orders_by_area_and_marks_failures() {
        let records = vec![
            record(10, SolverKind::Mcts, "Solved", 500.0),
            record(10, SolverKind::Backtrack, "LimitExceeded", 9.0),
            record(5, SolverKind::Mcts, "Solved", 1000.0),
            record(5, SolverKind::Backtrack, "Solved", 2000.0),
        ];
        let table = emit_table(&records);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("| Grid | Obstacles | mcts Run-Time(S) | mcts Memory(MB) | backtrack"));
        assert_eq!(lines[2], "| 5x5 | 1 | 1.000000 | 1.0000 | 2.000000 | 1.0000 |");
        assert_eq!(lines[3], "| 10x10 | 1 | 0.500000 | 1.0000 | Failed | Failed |");
    }

    #[test]
    fn config_validation() {
        let ok = BenchConfig::new(vec![SizeSpec { rows: 3, cols: 3, obstacles: 0 }], vec![SolverKind::Backtrack], 1);
        assert!(ok.validate().is_ok());
        let mut c = ok.clone();
        c.repeats = 0;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.solvers = vec![SolverKind::SatExternal];
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.sizes = vec![SizeSpec { rows: 2, cols: 2, obstacles: 4 }];
        assert!(c.validate().is_err());
        let mut c = ok;
        c.sizes.clear();
        assert!(c.validate().is_err());
    }
}
