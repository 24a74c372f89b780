//! Python bindings: puzzles, the three solvers, the verifier and the generator.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::mazedash as core;
use core::grid::{format_moves, parse_moves, Coord, Direction, SlideState as CoreState};
use core::sat::{emit_dimacs, encode_cnf};
use core::{GenConfig, MctsConfig, SearchLimits};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn moves_arg(moves: &str) -> PyResult<Vec<Direction>> {
    parse_moves(moves).map_err(value_error)
}

fn coord_tuple(c: Coord) -> (usize, usize) {
    (c.row, c.col)
}

#[pyclass(frozen, skip_from_py_object, name = "Puzzle", module = "mazedash")]
#[derive(Clone)]
struct PyPuzzle {
    inner: Arc<core::Puzzle>,
}

#[pymethods]
impl PyPuzzle {
    #[new]
    #[pyo3(signature = (rows, cols, obstacles, start))]
    fn new(rows: usize, cols: usize, obstacles: Vec<(usize, usize)>, start: (usize, usize)) -> PyResult<Self> {
        let obstacles = obstacles.into_iter().map(|(r, c)| Coord::new(r, c));
        let inner = core::Puzzle::new(rows, cols, obstacles, Coord::new(start.0, start.1)).map_err(value_error)?;
        Ok(PyPuzzle { inner: Arc::new(inner) })
    }

    /// Parses the `.`/`#`/`S` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = core::Puzzle::parse(text).map_err(value_error)?;
        Ok(PyPuzzle { inner: Arc::new(inner) })
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    #[getter]
    fn start(&self) -> (usize, usize) {
        coord_tuple(self.inner.start())
    }

    #[getter]
    fn free_count(&self) -> usize {
        self.inner.free_count()
    }

    fn obstacles(&self) -> Vec<(usize, usize)> {
        self.inner.obstacles().map(coord_tuple).collect()
    }

    fn __str__(&self) -> String {
        self.inner.serialize()
    }

    fn __repr__(&self) -> String {
        format!(
            "Puzzle(rows={}, cols={}, obstacles={}, start={})",
            self.inner.rows(),
            self.inner.cols(),
            self.inner.obstacle_count(),
            self.inner.start()
        )
    }
}

/// Exploration state. Holds the move list and replays it on demand, so it
/// can own its puzzle without borrowing.
#[pyclass(name = "SlideState", module = "mazedash")]
struct PySlideState {
    puzzle: Arc<core::Puzzle>,
    moves: Vec<Direction>,
}

impl PySlideState {
    fn with_state<T>(&self, f: impl FnOnce(&CoreState<'_>) -> T) -> T {
        let mut state = CoreState::new(&self.puzzle);
        for &d in &self.moves {
            state.apply_move(d).expect("stored moves replay");
        }
        f(&state)
    }
}

#[pymethods]
impl PySlideState {
    #[new]
    fn new(puzzle: &PyPuzzle) -> Self {
        PySlideState { puzzle: Arc::clone(&puzzle.inner), moves: Vec::new() }
    }

    /// Legal moves as a string in canonical `URDL` order.
    fn legal_moves(&self) -> String {
        self.with_state(|s| s.legal_moves().iter().map(|d| d.to_char()).collect())
    }

    fn apply(&mut self, direction: &str) -> PyResult<usize> {
        let d = match moves_arg(direction)?.as_slice() {
            [d] => *d,
            _ => return Err(PyValueError::new_err("expected a single direction")),
        };
        let mut state = CoreState::new(&self.puzzle);
        for &m in &self.moves {
            state.apply_move(m).expect("stored moves replay");
        }
        let token = state.apply_move(d).map_err(value_error)?;
        self.moves.push(d);
        Ok(token.slide_length as usize)
    }

    fn undo(&mut self) -> PyResult<()> {
        self.moves.pop().map(|_| ()).ok_or_else(|| PyValueError::new_err("nothing to undo"))
    }

    #[getter]
    fn agent(&self) -> (usize, usize) {
        self.with_state(|s| coord_tuple(s.agent()))
    }

    #[getter]
    fn visited_count(&self) -> usize {
        self.with_state(|s| s.visited_count())
    }

    #[getter]
    fn moves(&self) -> String {
        format_moves(&self.moves)
    }

    fn is_complete(&self) -> bool {
        self.with_state(|s| s.is_complete())
    }

    fn is_deadlock(&self) -> bool {
        self.with_state(|s| s.is_deadlock())
    }
}

#[pyclass(frozen, get_all, name = "SolveResult", module = "mazedash")]
struct PySolveResult {
    status: String,
    moves: Option<String>,
    detail: Option<String>,
    nodes_expanded: u64,
    peak_tracked_bytes: u64,
    rollout_steps: u64,
    iterations: u64,
    tree_nodes: u64,
    elapsed_ms: f64,
}

impl From<core::SolveResult> for PySolveResult {
    fn from(r: core::SolveResult) -> Self {
        let detail = match &r.status {
            core::SolveStatus::Error(reason) => Some(reason.clone()),
            _ => None,
        };
        PySolveResult {
            status: r.status.label().to_string(),
            moves: r.status.moves().map(format_moves),
            detail,
            nodes_expanded: r.nodes_expanded,
            peak_tracked_bytes: r.peak_tracked_bytes,
            rollout_steps: r.rollout_steps,
            iterations: r.iterations,
            tree_nodes: r.tree_nodes,
            elapsed_ms: r.timing.elapsed_ms,
        }
    }
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        match &self.moves {
            Some(m) => format!("SolveResult(status={:?}, moves={m:?})", self.status),
            None => format!("SolveResult(status={:?})", self.status),
        }
    }
}

#[pyclass(frozen, get_all, name = "GeneratedInstance", module = "mazedash")]
struct PyGenerated {
    puzzle: PyPuzzle,
    witness: String,
    actual_obstacles: usize,
    seed: u64,
}

/// Returns "Valid", "IllegalMove(i)" or "IncompleteCoverage(k)".
#[pyfunction]
fn verify_solution(puzzle: &PyPuzzle, moves: &str) -> PyResult<String> {
    Ok(core::verify_solution(&puzzle.inner, &moves_arg(moves)?).to_string())
}

#[pyfunction]
fn expand_to_cells(puzzle: &PyPuzzle, moves: &str) -> PyResult<Vec<(usize, usize)>> {
    let cells = core::expand_to_cells(&puzzle.inner, &moves_arg(moves)?).map_err(value_error)?;
    Ok(cells.into_iter().map(coord_tuple).collect())
}

#[pyfunction]
#[pyo3(signature = (puzzle, max_nodes=None, timeout_ms=None))]
fn solve_backtrack(
    py: Python<'_>,
    puzzle: &PyPuzzle,
    max_nodes: Option<u64>,
    timeout_ms: Option<u64>,
) -> PySolveResult {
    let p = Arc::clone(&puzzle.inner);
    py.detach(move || core::solve_backtrack(&p, SearchLimits { max_nodes, timeout_ms })).into()
}

#[pyfunction]
#[pyo3(signature = (puzzle, iterations=1_000_000, c=std::f64::consts::SQRT_2, seed=0, timeout_ms=None))]
fn solve_mcts(
    py: Python<'_>,
    puzzle: &PyPuzzle,
    iterations: u64,
    c: f64,
    seed: u64,
    timeout_ms: Option<u64>,
) -> PyResult<PySolveResult> {
    if iterations == 0 || c.is_nan() || c < 0.0 {
        return Err(PyValueError::new_err("iterations must be positive and c non-negative"));
    }
    let cfg = MctsConfig { exploration_c: c, max_iterations: iterations, timeout_ms, seed };
    let p = Arc::clone(&puzzle.inner);
    Ok(py.detach(move || core::solve_mcts(&p, cfg)).into())
}

/// Internal DPLL by default; pass `sat_cmd` (with a `{file}` placeholder) to use an external solver.
#[pyfunction]
#[pyo3(signature = (puzzle, timeout_ms=None, sat_cmd=None))]
fn solve_sat(py: Python<'_>, puzzle: &PyPuzzle, timeout_ms: Option<u64>, sat_cmd: Option<String>) -> PySolveResult {
    let p = Arc::clone(&puzzle.inner);
    py.detach(move || match sat_cmd {
        Some(cmd) => core::solve_sat_with_command(&p, &cmd, timeout_ms),
        None => core::solve_sat(&p, SearchLimits { max_nodes: None, timeout_ms }),
    })
    .into()
}

#[pyfunction]
fn encode_dimacs(puzzle: &PyPuzzle) -> String {
    emit_dimacs(&encode_cnf(&puzzle.inner).0)
}

#[pyfunction]
#[pyo3(signature = (rows, cols, obstacles, seed=0, max_retries=100))]
fn generate_puzzle(
    py: Python<'_>,
    rows: usize,
    cols: usize,
    obstacles: usize,
    seed: u64,
    max_retries: u32,
) -> PyResult<PyGenerated> {
    let cfg = GenConfig { max_retries, ..GenConfig::new(rows, cols, obstacles, seed) };
    let g = py.detach(move || core::generate_puzzle(&cfg)).map_err(value_error)?;
    Ok(PyGenerated {
        puzzle: PyPuzzle { inner: Arc::new(g.puzzle) },
        witness: format_moves(&g.witness),
        actual_obstacles: g.actual_obstacles,
        seed: g.seed,
    })
}

#[pymodule]
fn mazedash(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPuzzle>()?;
    m.add_class::<PySlideState>()?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PyGenerated>()?;
    m.add_function(wrap_pyfunction!(verify_solution, m)?)?;
    m.add_function(wrap_pyfunction!(expand_to_cells, m)?)?;
    m.add_function(wrap_pyfunction!(solve_backtrack, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mcts, m)?)?;
    m.add_function(wrap_pyfunction!(solve_sat, m)?)?;
    m.add_function(wrap_pyfunction!(encode_dimacs, m)?)?;
    m.add_function(wrap_pyfunction!(generate_puzzle, m)?)?;
    Ok(())
}
