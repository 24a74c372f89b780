//! Puzzle definition, slide-move semantics and the solution verifier.
//!
//! A move picks one of four directions and the agent keeps sliding until the
//! next cell is a wall, an obstacle, or a cell it has already visited. Every
//! traversed cell becomes visited. The puzzle is solved when every free cell
//! has been visited exactly once.

use std::fmt;
use std::mem::size_of;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One of the four slide directions, in canonical order `U < R < D < L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    /// All directions in canonical order.
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Right, Direction::Down, Direction::Left];

    /// Row and column offset of a single step.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Right => (0, 1),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Right => Direction::Left,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
        }
    }

    pub fn perpendiculars(self) -> [Direction; 2] {
        match self {
            Direction::Up | Direction::Down => [Direction::Right, Direction::Left],
            Direction::Right | Direction::Left => [Direction::Up, Direction::Down],
        }
    }

    /// Position in the canonical order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Direction> {
        Direction::ALL.get(index).copied()
    }

    pub fn to_char(self) -> char {
        match self {
            Direction::Up => 'U',
            Direction::Right => 'R',
            Direction::Down => 'D',
            Direction::Left => 'L',
        }
    }

    pub fn from_char(c: char) -> Option<Direction> {
        match c {
            'U' => Some(Direction::Up),
            'R' => Some(Direction::Right),
            'D' => Some(Direction::Down),
            'L' => Some(Direction::Left),
            _ => None,
        }
    }

    /// The direction of a unit step from `from` to `to`, if they are orthogonal neighbours.
    pub fn between(from: Coord, to: Coord) -> Option<Direction> {
        let dr = to.row as isize - from.row as isize;
        let dc = to.col as isize - from.col as isize;
        Direction::ALL.into_iter().find(|d| d.delta() == (dr, dc))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_char(self.to_char())
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = char::deserialize(d)?;
        Direction::from_char(c).ok_or_else(|| serde::de::Error::custom(format!("invalid direction {c:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid move character {found:?} at position {position}")]
pub struct ParseMovesError {
    pub position: usize,
    pub found: char,
}

/// Parses a compact move string such as `"RDLUR"`.
pub fn parse_moves(text: &str) -> Result<Vec<Direction>, ParseMovesError> {
    text.chars()
        .enumerate()
        .map(|(position, c)| Direction::from_char(c).ok_or(ParseMovesError { position, found: c }))
        .collect()
}

pub fn format_moves(moves: &[Direction]) -> String {
    moves.iter().map(|d| d.to_char()).collect()
}

/// Serde adapter storing a move list as its compact string form.
pub mod moves_string {
    use super::{format_moves, parse_moves, Direction};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(moves: &[Direction], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_moves(moves))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Direction>, D::Error> {
        let text = String::deserialize(d)?;
        parse_moves(&text).map_err(serde::de::Error::custom)
    }
}

/// A cell reference; row 0 is the top, column 0 the left edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Coord {
        Coord { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PuzzleError {
    #[error("puzzle has no grid rows")]
    Empty,
    #[error("row on line {line} has length {found}, expected {expected}")]
    RaggedRows { line: usize, expected: usize, found: usize },
    #[error("puzzle has no start cell 'S'")]
    NoStart,
    #[error("puzzle has more than one start cell (second on line {line}, column {column})")]
    MultipleStart { line: usize, column: usize },
    #[error("invalid character {found:?} on line {line}, column {column}")]
    InvalidCharacter { line: usize, column: usize, found: char },
    #[error("cell {0} is outside the grid")]
    OutOfBounds(Coord),
    #[error("start cell {0} is an obstacle")]
    StartOnObstacle(Coord),
}

/// Immutable puzzle definition: grid size, obstacle set and start cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Puzzle {
    rows: usize,
    cols: usize,
    obstacle: Vec<bool>,
    start: Coord,
    free_count: usize,
}

impl fmt::Display for Puzzle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl Puzzle {
    pub fn new(
        rows: usize,
        cols: usize,
        obstacles: impl IntoIterator<Item = Coord>,
        start: Coord,
    ) -> Result<Puzzle, PuzzleError> {
        if rows == 0 || cols == 0 {
            return Err(PuzzleError::Empty);
        }
        let in_bounds = |c: Coord| c.row < rows && c.col < cols;
        if !in_bounds(start) {
            return Err(PuzzleError::OutOfBounds(start));
        }
        let mut obstacle = vec![false; rows * cols];
        for c in obstacles {
            if !in_bounds(c) {
                return Err(PuzzleError::OutOfBounds(c));
            }
            obstacle[c.row * cols + c.col] = true;
        }
        if obstacle[start.row * cols + start.col] {
            return Err(PuzzleError::StartOnObstacle(start));
        }
        let free_count = obstacle.iter().filter(|&&o| !o).count();
        Ok(Puzzle { rows, cols, obstacle, start, free_count })
    }

    /// Parses the text grid format: `.` free, `#` obstacle, `S` start.
    /// Lines starting with `;` are comments; blank lines and trailing
    /// whitespace are ignored.
    pub fn parse(text: &str) -> Result<Puzzle, PuzzleError> {
        let mut rows = 0;
        let mut cols = 0;
        let mut obstacles = Vec::new();
        let mut start = None;
        for (line_no, raw) in text.lines().enumerate() {
            let line_no = line_no + 1;
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            let width = line.chars().count();
            if rows == 0 {
                cols = width;
            } else if width != cols {
                return Err(PuzzleError::RaggedRows { line: line_no, expected: cols, found: width });
            }
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '.' => {}
                    '#' => obstacles.push(Coord::new(rows, col)),
                    'S' => {
                        if start.is_some() {
                            return Err(PuzzleError::MultipleStart { line: line_no, column: col + 1 });
                        }
                        start = Some(Coord::new(rows, col));
                    }
                    found => return Err(PuzzleError::InvalidCharacter { line: line_no, column: col + 1, found }),
                }
            }
            rows += 1;
        }
        if rows == 0 {
            return Err(PuzzleError::Empty);
        }
        let start = start.ok_or(PuzzleError::NoStart)?;
        Puzzle::new(rows, cols, obstacles, start)
    }

    /// Canonical text form: no comments, every row newline-terminated.
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for row in 0..self.rows {
            for col in 0..self.cols {
                let c = Coord::new(row, col);
                out.push(if c == self.start {
                    'S'
                } else if self.is_obstacle(c) {
                    '#'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn start(&self) -> Coord {
        self.start
    }

    /// Number of non-obstacle cells.
    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn obstacle_count(&self) -> usize {
        self.cell_count() - self.free_count
    }

    pub fn obstacles(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.cell_count()).filter(|&i| self.obstacle[i]).map(|i| self.coord(i))
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.cell_count()).filter(|&i| !self.obstacle[i]).map(|i| self.coord(i))
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    pub fn is_obstacle(&self, c: Coord) -> bool {
        self.obstacle[self.index(c)]
    }

    pub fn is_free(&self, c: Coord) -> bool {
        self.in_bounds(c) && !self.is_obstacle(c)
    }

    /// Row-major cell index.
    pub fn index(&self, c: Coord) -> usize {
        c.row * self.cols + c.col
    }

    pub fn coord(&self, index: usize) -> Coord {
        Coord::new(index / self.cols, index % self.cols)
    }

    /// The neighbouring cell in direction `d`, if it is inside the grid.
    pub fn step(&self, c: Coord, d: Direction) -> Option<Coord> {
        let (dr, dc) = d.delta();
        let row = c.row.checked_add_signed(dr)?;
        let col = c.col.checked_add_signed(dc)?;
        (row < self.rows && col < self.cols).then_some(Coord::new(row, col))
    }

    pub(crate) fn step_index(&self, index: usize, d: Direction) -> Option<usize> {
        let (row, col) = (index / self.cols, index % self.cols);
        match d {
            Direction::Up => (row > 0).then(|| index - self.cols),
            Direction::Right => (col + 1 < self.cols).then(|| index + 1),
            Direction::Down => (row + 1 < self.rows).then(|| index + self.cols),
            Direction::Left => (col > 0).then(|| index - 1),
        }
    }

    pub(crate) fn obstacle_mask(&self) -> &[bool] {
        &self.obstacle
    }
}

/// A small ordered set of directions, iterated in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct MoveSet(u8);

impl MoveSet {
    pub const EMPTY: MoveSet = MoveSet(0);

    pub fn insert(&mut self, d: Direction) {
        self.0 |= 1 << d.index();
    }

    pub fn remove(&mut self, d: Direction) {
        self.0 &= !(1 << d.index());
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 & (1 << d.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// The canonically smallest member.
    pub fn first(self) -> Option<Direction> {
        (self.0 != 0).then(|| Direction::ALL[self.0.trailing_zeros() as usize])
    }

    pub fn nth(self, n: usize) -> Option<Direction> {
        self.iter().nth(n)
    }

    pub fn iter(self) -> impl Iterator<Item = Direction> {
        Direction::ALL.into_iter().filter(move |&d| self.contains(d))
    }

    pub fn to_vec(self) -> Vec<Direction> {
        self.iter().collect()
    }
}

impl FromIterator<Direction> for MoveSet {
    fn from_iter<I: IntoIterator<Item = Direction>>(iter: I) -> Self {
        let mut set = MoveSet::EMPTY;
        for d in iter {
            set.insert(d);
        }
        set
    }
}

/// Receipt for an applied move; undoing it requires handing it back in stack order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UndoToken {
    pub direction: Direction,
    pub slide_length: u32,
    depth: u32,
}

impl UndoToken {
    /// Number of moves that had been applied before this one.
    pub fn depth(&self) -> usize {
        self.depth as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("illegal move {0}: the slide is blocked immediately")]
    IllegalMove(Direction),
    #[error("undo token does not match the most recent move")]
    UndoOrderViolation,
}

/// Mutable exploration state over a borrowed puzzle.
#[derive(Debug, Clone)]
pub struct SlideState<'p> {
    puzzle: &'p Puzzle,
    visited: Vec<bool>,
    agent: Coord,
    agent_index: usize,
    moves: Vec<Direction>,
    visited_count: usize,
    undo_stack: Vec<UndoToken>,
}

impl PartialEq for SlideState<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.visited == other.visited
            && self.agent == other.agent
            && self.visited_count == other.visited_count
            && self.moves == other.moves
    }
}

impl Eq for SlideState<'_> {}

impl<'p> SlideState<'p> {
    /// Fresh state: only the start cell is visited.
    pub fn new(puzzle: &'p Puzzle) -> SlideState<'p> {
        let mut visited = vec![false; puzzle.cell_count()];
        let agent_index = puzzle.index(puzzle.start());
        visited[agent_index] = true;
        let capacity = puzzle.free_count();
        SlideState {
            puzzle,
            visited,
            agent: puzzle.start(),
            agent_index,
            moves: Vec::with_capacity(capacity),
            visited_count: 1,
            undo_stack: Vec::with_capacity(capacity),
        }
    }

    /// Logical size of a state for `puzzle`, independent of how far it has progressed.
    pub fn footprint(puzzle: &Puzzle) -> usize {
        size_of::<SlideState<'_>>()
            + puzzle.cell_count() * size_of::<bool>()
            + puzzle.free_count() * (size_of::<Direction>() + size_of::<UndoToken>())
    }

    pub fn puzzle(&self) -> &'p Puzzle {
        self.puzzle
    }

    pub fn agent(&self) -> Coord {
        self.agent
    }

    pub fn moves(&self) -> &[Direction] {
        &self.moves
    }

    pub fn visited_count(&self) -> usize {
        self.visited_count
    }

    pub fn remaining(&self) -> usize {
        self.puzzle.free_count() - self.visited_count
    }

    pub fn is_visited(&self, c: Coord) -> bool {
        self.visited[self.puzzle.index(c)]
    }

    pub fn visited_mask(&self) -> &[bool] {
        &self.visited
    }

    pub fn undo_stack(&self) -> &[UndoToken] {
        &self.undo_stack
    }

    /// Fraction of free cells visited, in `(0, 1]`.
    pub fn coverage(&self) -> f64 {
        self.visited_count as f64 / self.puzzle.free_count() as f64
    }

    #[inline]
    fn open(&self, index: usize) -> bool {
        !self.visited[index] && !self.puzzle.obstacle_mask()[index]
    }

    #[inline]
    fn slide_from(&self, d: Direction) -> (usize, u32) {
        let mut at = self.agent_index;
        let mut length = 0;
        while let Some(next) = self.puzzle.step_index(at, d) {
            if !self.open(next) {
                break;
            }
            at = next;
            length += 1;
        }
        (at, length)
    }

    /// Where a slide in direction `d` would stop, and how many cells it would
    /// cover. `None` when the very first step is blocked.
    pub fn slide_destination(&self, d: Direction) -> Option<(Coord, usize)> {
        let (stop, length) = self.slide_from(d);
        (length > 0).then(|| (self.puzzle.coord(stop), length as usize))
    }

    /// Directions with a non-empty slide, in canonical order.
    pub fn legal_moves(&self) -> MoveSet {
        let mut set = MoveSet::EMPTY;
        for d in Direction::ALL {
            if let Some(next) = self.puzzle.step_index(self.agent_index, d) {
                if self.open(next) {
                    set.insert(d);
                }
            }
        }
        set
    }

    pub fn apply_move(&mut self, d: Direction) -> Result<UndoToken, MoveError> {
        let mut at = self.agent_index;
        let mut length = 0u32;
        while let Some(next) = self.puzzle.step_index(at, d) {
            if !self.open(next) {
                break;
            }
            self.visited[next] = true;
            at = next;
            length += 1;
        }
        if length == 0 {
            return Err(MoveError::IllegalMove(d));
        }
        let token = UndoToken { direction: d, slide_length: length, depth: self.moves.len() as u32 };
        self.agent_index = at;
        self.agent = self.puzzle.coord(at);
        self.visited_count += length as usize;
        self.moves.push(d);
        self.undo_stack.push(token);
        Ok(token)
    }

    pub fn undo_move(&mut self, token: UndoToken) -> Result<(), MoveError> {
        if self.undo_stack.last() != Some(&token) {
            return Err(MoveError::UndoOrderViolation);
        }
        self.undo_stack.pop();
        self.moves.pop();
        let back = token.direction.opposite();
        let mut at = self.agent_index;
        for _ in 0..token.slide_length {
            self.visited[at] = false;
            at = self.puzzle.step_index(at, back).expect("undo walks back over traversed cells");
        }
        self.agent_index = at;
        self.agent = self.puzzle.coord(at);
        self.visited_count -= token.slide_length as usize;
        Ok(())
    }

    /// Undoes the most recent move, if any.
    pub fn undo_last(&mut self) -> Option<UndoToken> {
        let token = *self.undo_stack.last()?;
        self.undo_move(token).expect("top of the undo stack always matches");
        Some(token)
    }

    pub fn is_complete(&self) -> bool {
        self.visited_count == self.puzzle.free_count()
    }

    pub fn is_deadlock(&self) -> bool {
        !self.is_complete() && self.legal_moves().is_empty()
    }
}

/// Outcome of replaying a move sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum VerifyResult {
    Valid,
    /// Index of the first move whose slide is blocked immediately.
    IllegalMove {
        index: usize,
    },
    /// Number of free cells left unvisited after a legal replay.
    IncompleteCoverage {
        missing: usize,
    },
}

impl VerifyResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, VerifyResult::Valid)
    }
}

impl fmt::Display for VerifyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyResult::Valid => write!(f, "Valid"),
            VerifyResult::IllegalMove { index } => write!(f, "IllegalMove({index})"),
            VerifyResult::IncompleteCoverage { missing } => write!(f, "IncompleteCoverage({missing})"),
        }
    }
}

/// Replays `moves` from the start cell.
///
/// Slides always run to their stop cell, so any replayable sequence already
/// satisfies the go-straight-unless-blocked rule; only legality and coverage
/// are checked.
pub fn verify_solution(puzzle: &Puzzle, moves: &[Direction]) -> VerifyResult {
    let mut state = SlideState::new(puzzle);
    for (index, &d) in moves.iter().enumerate() {
        if state.apply_move(d).is_err() {
            return VerifyResult::IllegalMove { index };
        }
    }
    match state.remaining() {
        0 => VerifyResult::Valid,
        missing => VerifyResult::IncompleteCoverage { missing },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("move {index} is illegal")]
pub struct IllegalMoveAt {
    pub index: usize,
}

/// Expands slide moves into the visited cell sequence, starting at the start cell.
pub fn expand_to_cells(puzzle: &Puzzle, moves: &[Direction]) -> Result<Vec<Coord>, IllegalMoveAt> {
    let mut state = SlideState::new(puzzle);
    let mut cells = vec![puzzle.start()];
    for (index, &d) in moves.iter().enumerate() {
        let from = state.agent();
        state.apply_move(d).map_err(|_| IllegalMoveAt { index })?;
        let mut at = from;
        while at != state.agent() {
            at = puzzle.step(at, d).expect("slide stays in bounds");
            cells.push(at);
        }
    }
    Ok(cells)
}

/// Collapses a cell path into slide moves by merging straight runs.
/// Returns `None` if two consecutive cells are not orthogonal neighbours.
pub fn compress_cells(cells: &[Coord]) -> Option<Vec<Direction>> {
    let mut moves: Vec<Direction> = Vec::new();
    for pair in cells.windows(2) {
        let d = Direction::between(pair[0], pair[1])?;
        if moves.last() != Some(&d) {
            moves.push(d);
        }
    }
    Some(moves)
}
