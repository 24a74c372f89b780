//! Test oracles that share no search code with the library: puzzles are
//! enumerated directly and paths are built one cell at a time.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mazedash::{Coord, Direction, Puzzle};

/// Every puzzle on every `rows x cols` grid allowed by `dims`, with up to
/// `max_obstacles` obstacles, from every free start cell.
pub fn all_puzzles(dims: &[(usize, usize)], max_obstacles: usize) -> Vec<Puzzle> {
    let mut out = Vec::new();
    for &(rows, cols) in dims {
        let cells = rows * cols;
        for mask in 0u32..1 << cells {
            if mask.count_ones() as usize > max_obstacles {
                continue;
            }
            push_all_starts(rows, cols, mask, &mut out);
        }
    }
    out
}

/// Every puzzle with at least one and at most `max_free` free cells on every
/// grid with at most `max_cells` cells.
pub fn all_puzzles_with_free_count(max_cells: usize, max_free: usize) -> Vec<Puzzle> {
    let mut out = Vec::new();
    for rows in 1..=max_cells {
        for cols in 1..=max_cells / rows {
            let cells = rows * cols;
            for mask in 0u32..1 << cells {
                let free = cells - mask.count_ones() as usize;
                if (1..=max_free).contains(&free) {
                    push_all_starts(rows, cols, mask, &mut out);
                }
            }
        }
    }
    out
}

fn push_all_starts(rows: usize, cols: usize, mask: u32, out: &mut Vec<Puzzle>) {
    let cells = rows * cols;
    let coord = |i: usize| Coord::new(i / cols, i % cols);
    let obstacles: Vec<Coord> = (0..cells).filter(|&i| mask >> i & 1 == 1).map(coord).collect();
    for s in (0..cells).filter(|&i| mask >> i & 1 == 0) {
        out.push(Puzzle::new(rows, cols, obstacles.iter().copied(), coord(s)).expect("valid puzzle"));
    }
}

fn neighbour(p: &Puzzle, c: Coord, (dr, dc): (isize, isize)) -> Option<Coord> {
    let row = c.row as isize + dr;
    let col = c.col as isize + dc;
    if row < 0 || col < 0 || row >= p.rows() as isize || col >= p.cols() as isize {
        return None;
    }
    let n = Coord::new(row as usize, col as usize);
    (!p.is_obstacle(n)).then_some(n)
}

const OFFSETS: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

/// Per-cell paths from the start: each step goes to an adjacent free
/// unvisited cell, and after a step in direction d the path must take one
/// more step in d whenever that cell is free and unvisited.
///
/// Calls `visit` on every path that is at rest, i.e. whose straight-ahead
/// cell is blocked (or that has not moved yet).
pub fn for_each_cell_path(p: &Puzzle, mut visit: impl FnMut(&[Coord])) {
    let mut path = vec![p.start()];
    let mut seen = vec![false; p.rows() * p.cols()];
    seen[p.start().row * p.cols() + p.start().col] = true;
    extend(p, &mut path, &mut seen, None, &mut visit);
}

fn extend(
    p: &Puzzle,
    path: &mut Vec<Coord>,
    seen: &mut [bool],
    heading: Option<(isize, isize)>,
    visit: &mut impl FnMut(&[Coord]),
) {
    let here = *path.last().unwrap();
    let open = |c: Coord, seen: &[bool]| !seen[c.row * p.cols() + c.col];
    let forced = heading.and_then(|h| neighbour(p, here, h)).filter(|&a| open(a, seen));
    let choices: Vec<(isize, isize)> = match (forced, heading) {
        (Some(_), Some(h)) => vec![h],
        _ => {
            visit(path);
            OFFSETS.to_vec()
        }
    };
    for off in choices {
        if let Some(next) = neighbour(p, here, off).filter(|&n| open(n, seen)) {
            let i = next.row * p.cols() + next.col;
            seen[i] = true;
            path.push(next);
            extend(p, path, seen, Some(off), visit);
            path.pop();
            seen[i] = false;
        }
    }
}

/// True when some per-cell path covers every free cell.
pub fn has_cover(p: &Puzzle) -> bool {
    let mut found = false;
    for_each_cell_path(p, |path| found |= path.len() == p.free_count());
    found
}

/// All at-rest per-cell paths.
pub fn cell_paths(p: &Puzzle) -> BTreeSet<Vec<Coord>> {
    let mut out = BTreeSet::new();
    for_each_cell_path(p, |path| {
        out.insert(path.to_vec());
    });
    out
}

/// Expansions of every slide-move sequence the puzzle admits.
pub fn move_paths(p: &Puzzle) -> BTreeSet<Vec<Coord>> {
    fn walk(p: &Puzzle, moves: &mut Vec<Direction>, out: &mut BTreeSet<Vec<Coord>>) {
        let cells = mazedash::expand_to_cells(p, moves).expect("replayable");
        out.insert(cells);
        for d in Direction::ALL {
            moves.push(d);
            if mazedash::expand_to_cells(p, moves).is_ok() {
                walk(p, moves, out);
            }
            moves.pop();
        }
    }
    let mut out = BTreeSet::new();
    walk(p, &mut Vec::new(), &mut out);
    out
}
