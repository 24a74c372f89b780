//! Single-agent Monte-Carlo tree search with UCT selection, blocked-subtree
//! pruning and in-place ("fast") rollouts.
//!
//! Tree nodes carry only a move and statistics. The grid state lives in one
//! scratch [`SlideState`] that is replayed on the way down and undone on the
//! way back up, so a node costs the same number of bytes on any grid size.
//!
//! A node is *blocked* once it is proven unable to reach full coverage: it is
//! a dead end itself, or every one of its children is blocked. Blocked nodes
//! are never selected, so with an unbounded budget the search either finds a
//! full cover or blocks the root, which proves the puzzle unsolvable.

use std::mem::size_of;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{Direction, Puzzle, SlideState};
use crate::meter::MemoryMeter;
use crate::solve::{Deadline, SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub exploration_c: f64,
    /// Iteration budget; `u64::MAX` is effectively unbounded.
    pub max_iterations: u64,
    pub timeout_ms: Option<u64>,
    pub seed: u64,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig { exploration_c: std::f64::consts::SQRT_2, max_iterations: 1_000_000, timeout_ms: None, seed: 0 }
    }
}

impl MctsConfig {
    pub fn unbounded(seed: u64) -> MctsConfig {
        MctsConfig { max_iterations: u64::MAX, seed, ..MctsConfig::default() }
    }
}

/// Index of a node in the search tree arena.
pub type NodeId = u32;

const NO_NODE: NodeId = NodeId::MAX;
pub const ROOT: NodeId = 0;

/// A tree node. Fixed size; holds no grid state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MctsNode {
    parent: NodeId,
    first_child: NodeId,
    visits: u64,
    best_reward: f64,
    child_count: u8,
    mv: Option<Direction>,
    blocked: bool,
    expanded: bool,
}

impl MctsNode {
    fn new(parent: NodeId, mv: Option<Direction>) -> MctsNode {
        MctsNode {
            parent,
            first_child: NO_NODE,
            visits: 0,
            best_reward: 0.0,
            child_count: 0,
            mv,
            blocked: false,
            expanded: false,
        }
    }

    /// Move that leads from the parent to this node; `None` for the root.
    pub fn mv(&self) -> Option<Direction> {
        self.mv
    }

    pub fn parent(&self) -> Option<NodeId> {
        (self.parent != NO_NODE).then_some(self.parent)
    }

    pub fn children(&self) -> std::ops::Range<NodeId> {
        if self.child_count == 0 {
            0..0
        } else {
            self.first_child..self.first_child + NodeId::from(self.child_count)
        }
    }

    pub fn child_count(&self) -> usize {
        self.child_count as usize
    }

    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn best_reward(&self) -> f64 {
        self.best_reward
    }

    pub fn is_blocked(&self) -> bool {
        self.blocked
    }

    pub fn is_expanded(&self) -> bool {
        self.expanded
    }
}

/// Bytes charged per tree node.
pub const NODE_BYTES: usize = size_of::<MctsNode>();

/// UCT score with +1 smoothing on both visit counts.
pub fn uct_score(best_reward: f64, parent_visits: u64, child_visits: u64, exploration_c: f64) -> f64 {
    best_reward + exploration_c * (((parent_visits + 1) as f64).ln() / (child_visits + 1) as f64).sqrt()
}

/// Search engine holding the tree, the scratch state and the counters.
///
/// [`MctsSearch::run`] drives the full loop; the individual phases are public
/// so they can be stepped and inspected.
pub struct MctsSearch<'p> {
    config: MctsConfig,
    nodes: Vec<MctsNode>,
    scratch: SlideState<'p>,
    path: Vec<NodeId>,
    rng: ChaCha8Rng,
    meter: MemoryMeter,
    solution: Option<Vec<Direction>>,
    iterations: u64,
    expansions: u64,
    rollout_steps: u64,
}

impl<'p> MctsSearch<'p> {
    pub fn new(puzzle: &'p Puzzle, config: MctsConfig) -> MctsSearch<'p> {
        let mut meter = MemoryMeter::new();
        meter.alloc(Self::scratch_bytes(puzzle));
        meter.alloc(NODE_BYTES);
        let mut path = Vec::with_capacity(puzzle.free_count());
        path.push(ROOT);
        MctsSearch {
            config,
            nodes: vec![MctsNode::new(NO_NODE, None)],
            scratch: SlideState::new(puzzle),
            path,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            meter,
            solution: None,
            iterations: 0,
            expansions: 0,
            rollout_steps: 0,
        }
    }

    /// Tracked bytes that do not belong to tree nodes: the scratch state and the descent path.
    pub fn scratch_bytes(puzzle: &Puzzle) -> usize {
        SlideState::footprint(puzzle) + puzzle.free_count() * size_of::<NodeId>()
    }

    pub fn nodes(&self) -> &[MctsNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &MctsNode {
        &self.nodes[id as usize]
    }

    pub fn scratch(&self) -> &SlideState<'p> {
        &self.scratch
    }

    pub fn solution(&self) -> Option<&[Direction]> {
        self.solution.as_deref()
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn rollout_steps(&self) -> u64 {
        self.rollout_steps
    }

    pub fn peak_tracked_bytes(&self) -> usize {
        self.meter.peak_bytes()
    }

    /// Runs select, expand, simulate and backpropagate until a full cover is
    /// found, the root is blocked, or the budget runs out.
    pub fn run(&mut self) -> SolveResult {
        let deadline = Deadline::start(self.config.timeout_ms);
        let status = loop {
            if self.scratch.is_complete() {
                self.solution = Some(Vec::new());
            }
            if let Some(moves) = &self.solution {
                break SolveStatus::Solved(moves.clone());
            }
            if self.nodes[ROOT as usize].blocked {
                break SolveStatus::Unsolvable;
            }
            if self.iterations >= self.config.max_iterations || deadline.expired() {
                break SolveStatus::LimitExceeded;
            }
            self.iterations += 1;
            let leaf = self.select();
            if self.expand(leaf) {
                continue;
            }
            let reward = self.simulate();
            if self.solution.is_some() {
                continue;
            }
            self.backpropagate(reward);
        };
        let mut result = SolveResult::new(status);
        result.nodes_expanded = self.expansions;
        result.peak_tracked_bytes = self.meter.peak_bytes() as u64;
        result.rollout_steps = self.rollout_steps;
        result.iterations = self.iterations;
        result.tree_nodes = self.nodes.len() as u64;
        result.timing.elapsed_ms = deadline.elapsed_ms();
        result
    }

    /// Picks the child of `parent` to descend into: the first unexpanded
    /// child in canonical order, otherwise the highest UCT score. Blocked
    /// children are skipped.
    pub fn choose_child(&self, parent: NodeId) -> Option<NodeId> {
        let node = &self.nodes[parent as usize];
        let open = node.children().filter(|&c| !self.nodes[c as usize].blocked);
        let mut best: Option<(NodeId, f64)> = None;
        for child in open {
            let c = &self.nodes[child as usize];
            if !c.expanded {
                return Some(child);
            }
            let score = uct_score(c.best_reward, node.visits, c.visits, self.config.exploration_c);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((child, score));
            }
        }
        best.map(|(child, _)| child)
    }

    /// Descends from the root to an unexpanded node, replaying moves on the
    /// scratch state. The root must not be blocked and the scratch state must
    /// be at the root.
    pub fn select(&mut self) -> NodeId {
        debug_assert!(!self.nodes[ROOT as usize].blocked);
        debug_assert_eq!(self.path, [ROOT]);
        let mut current = ROOT;
        while self.nodes[current as usize].expanded {
            let child = self.choose_child(current).expect("an expanded, unblocked node has an unblocked child");
            let mv = self.nodes[child as usize].mv.expect("non-root nodes carry a move");
            self.scratch.apply_move(mv).expect("tree moves are legal");
            self.path.push(child);
            current = child;
        }
        current
    }

    /// Creates one child per legal move of the scratch state. Children that
    /// dead-end are created blocked; a child that completes the cover records
    /// the solution. Returns true when a solution was found.
    pub fn expand(&mut self, leaf: NodeId) -> bool {
        debug_assert_eq!(self.path.last(), Some(&leaf));
        debug_assert!(!self.nodes[leaf as usize].expanded);
        self.expansions += 1;
        if self.scratch.is_complete() {
            self.solution = Some(self.scratch.moves().to_vec());
            self.nodes[leaf as usize].expanded = true;
            return true;
        }
        let legal = self.scratch.legal_moves();
        let first_child = self.nodes.len() as NodeId;
        let mut all_blocked = true;
        for d in legal.iter() {
            let token = self.scratch.apply_move(d).expect("legal move");
            let mut child = MctsNode::new(leaf, Some(d));
            if self.scratch.is_complete() {
                self.solution = Some(self.scratch.moves().to_vec());
            } else if self.scratch.legal_moves().is_empty() {
                child.blocked = true;
                child.expanded = true;
                child.best_reward = self.scratch.coverage();
            } else {
                all_blocked = false;
            }
            self.scratch.undo_move(token).expect("undo in order");
            self.nodes.push(child);
            self.meter.alloc(NODE_BYTES);
        }
        let node = &mut self.nodes[leaf as usize];
        node.expanded = true;
        node.child_count = legal.len() as u8;
        if !legal.is_empty() {
            node.first_child = first_child;
        }
        node.blocked = all_blocked;
        self.solution.is_some()
    }

    /// Plays uniformly random legal moves from the scratch state until the
    /// cover is complete or stuck, then undoes them. Returns the coverage
    /// fraction reached.
    pub fn simulate(&mut self) -> f64 {
        let depth = self.scratch.moves().len();
        loop {
            let legal = self.scratch.legal_moves();
            if legal.is_empty() {
                break;
            }
            let pick = legal.nth(self.rng.random_range(0..legal.len())).expect("in range");
            let token = self.scratch.apply_move(pick).expect("legal move");
            self.rollout_steps += u64::from(token.slide_length);
        }
        let reward = self.scratch.coverage();
        if self.scratch.is_complete() {
            self.solution = Some(self.scratch.moves().to_vec());
        }
        while self.scratch.moves().len() > depth {
            self.scratch.undo_last();
        }
        reward
    }

    /// Pushes `reward` up the current descent path, blocking any node whose
    /// children are all blocked, and rewinds the scratch state to the root.
    pub fn backpropagate(&mut self, reward: f64) {
        while let Some(id) = self.path.pop() {
            let all_children_blocked = {
                let node = &self.nodes[id as usize];
                node.expanded && node.children().all(|c| self.nodes[c as usize].blocked)
            };
            let node = &mut self.nodes[id as usize];
            node.visits += 1;
            node.best_reward = node.best_reward.max(reward);
            if all_children_blocked {
                node.blocked = true;
            }
            if id != ROOT {
                self.scratch.undo_last().expect("path moves are on the undo stack");
            }
        }
        self.path.push(ROOT);
    }
}

pub fn solve_mcts(puzzle: &Puzzle, config: MctsConfig) -> SolveResult {
    MctsSearch::new(puzzle, config).run()
}
