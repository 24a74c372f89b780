//! Result and limit types shared by every solver.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::grid::{moves_string, Direction};

/// Search budget; `None` means unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_nodes: Option<u64>,
    pub timeout_ms: Option<u64>,
}

impl SearchLimits {
    pub const UNBOUNDED: SearchLimits = SearchLimits { max_nodes: None, timeout_ms: None };

    pub fn with_timeout_ms(timeout_ms: u64) -> SearchLimits {
        SearchLimits { max_nodes: None, timeout_ms: Some(timeout_ms) }
    }
}

/// Wall-clock budget tracker.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline {
    started: Instant,
    limit: Option<Duration>,
}

impl Deadline {
    pub(crate) fn start(timeout_ms: Option<u64>) -> Deadline {
        Deadline { started: Instant::now(), limit: timeout_ms.map(Duration::from_millis) }
    }

    pub(crate) fn expired(&self) -> bool {
        self.limit.is_some_and(|limit| self.started.elapsed() >= limit)
    }

    pub(crate) fn remaining(&self) -> Option<Duration> {
        self.limit.map(|limit| limit.saturating_sub(self.started.elapsed()))
    }

    pub(crate) fn elapsed_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1e3
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail")]
pub enum SolveStatus {
    Solved(#[serde(with = "moves_string")] Vec<Direction>),
    Unsolvable,
    LimitExceeded,
    /// The solver could not produce a verdict for a reason other than its budget
    /// (external solver missing, unparseable output, ...).
    Error(String),
}

impl SolveStatus {
    pub fn is_solved(&self) -> bool {
        matches!(self, SolveStatus::Solved(_))
    }

    pub fn moves(&self) -> Option<&[Direction]> {
        match self {
            SolveStatus::Solved(moves) => Some(moves),
            _ => None,
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Solved(_) => "Solved",
            SolveStatus::Unsolvable => "Unsolvable",
            SolveStatus::LimitExceeded => "LimitExceeded",
            SolveStatus::Error(_) => "Error",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveStatus::Error(reason) => write!(f, "Error: {reason}"),
            other => f.write_str(other.label()),
        }
    }
}

/// Wall-clock measurements, kept apart from the deterministic counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Outcome of any solver plus its work counters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    #[serde(flatten)]
    pub status: SolveStatus,
    /// Search nodes expanded (DFS states, MCTS expansions, DPLL decisions).
    pub nodes_expanded: u64,
    pub peak_tracked_bytes: u64,
    /// Cells traversed during MCTS rollouts; zero for other solvers.
    pub rollout_steps: u64,
    /// MCTS iterations performed; zero for other solvers.
    pub iterations: u64,
    /// MCTS tree size at exit; zero for other solvers.
    pub tree_nodes: u64,
    pub timing: Timing,
}

impl SolveResult {
    pub(crate) fn new(status: SolveStatus) -> SolveResult {
        SolveResult {
            status,
            nodes_expanded: 0,
            peak_tracked_bytes: 0,
            rollout_steps: 0,
            iterations: 0,
            tree_nodes: 0,
            timing: Timing::default(),
        }
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.timing.elapsed_ms
    }
}
