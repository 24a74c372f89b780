//! Step-by-cell encoding of the cover path.
//!
//! Variable `x[t, c]` is true when the path occupies free cell `c` at step
//! `t`. Variables are numbered step-major, so the lowest unassigned variable
//! always belongs to the earliest undecided step.

use crate::grid::{Coord, Direction, Puzzle};

use super::{CnfFormula, Lit};

/// Bijection between variables and (step, free cell) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    cells: Vec<Coord>,
    slot: Vec<Option<usize>>,
    cols: usize,
}

impl VarMap {
    pub fn new(puzzle: &Puzzle) -> VarMap {
        let cells: Vec<Coord> = puzzle.free_cells().collect();
        let mut slot = vec![None; puzzle.cell_count()];
        for (i, &c) in cells.iter().enumerate() {
            slot[puzzle.index(c)] = Some(i);
        }
        VarMap { cells, slot, cols: puzzle.cols() }
    }

    /// Path length, which equals the number of free cells.
    pub fn steps(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vars(&self) -> usize {
        self.cells.len() * self.cells.len()
    }

    /// Free-cell slot of a grid coordinate, if the cell is free.
    pub fn cell_slot(&self, c: Coord) -> Option<usize> {
        self.slot.get(c.row * self.cols + c.col).copied().flatten()
    }

    pub fn cell(&self, slot: usize) -> Coord {
        self.cells[slot]
    }

    pub fn var(&self, step: usize, slot: usize) -> Lit {
        debug_assert!(step < self.steps() && slot < self.steps());
        (step * self.steps() + slot + 1) as Lit
    }

    /// Inverse of [`VarMap::var`].
    pub fn decode_var(&self, var: Lit) -> Option<(usize, usize)> {
        let v = usize::try_from(var).ok()?.checked_sub(1)?;
        (v < self.num_vars()).then(|| (v / self.steps(), v % self.steps()))
    }
}

/// Emits an exactly-one constraint over `lits`: one covering clause plus
/// pairwise exclusions.
fn exactly_one(f: &mut CnfFormula, lits: &[Lit]) {
    f.add_clause(lits);
    for (i, &a) in lits.iter().enumerate() {
        for &b in &lits[i + 1..] {
            f.add_clause(&[-a, -b]);
        }
    }
}

/// Number of clauses contributed by the two exactly-one families.
pub fn exactly_one_clause_count(steps: usize) -> usize {
    2 * steps * (1 + steps * steps.saturating_sub(1) / 2)
}

pub fn encode_cnf(puzzle: &Puzzle) -> (CnfFormula, VarMap) {
    let vm = VarMap::new(puzzle);
    let n = vm.steps();
    let mut f = CnfFormula::new(vm.num_vars());
    let slot_of = |c: Option<Coord>| c.and_then(|c| vm.cell_slot(c));

    // the path starts on the start cell
    let start = vm.cell_slot(puzzle.start()).expect("start is free");
    f.add_clause(&[vm.var(0, start)]);

    // each step holds one cell, each cell is used at exactly one step
    let mut lits = Vec::with_capacity(n);
    for t in 0..n {
        lits.clear();
        lits.extend((0..n).map(|c| vm.var(t, c)));
        exactly_one(&mut f, &lits);
    }
    for c in 0..n {
        lits.clear();
        lits.extend((0..n).map(|t| vm.var(t, c)));
        exactly_one(&mut f, &lits);
    }
    debug_assert_eq!(f.num_clauses(), 1 + exactly_one_clause_count(n));

    // consecutive steps are orthogonal neighbours
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|c| {
            let at = vm.cell(c);
            Direction::ALL.into_iter().filter_map(|d| slot_of(puzzle.step(at, d))).collect()
        })
        .collect();
    for t in 0..n.saturating_sub(1) {
        for (c, next) in neighbours.iter().enumerate() {
            lits.clear();
            lits.push(-vm.var(t, c));
            lits.extend(next.iter().map(|&nb| vm.var(t + 1, nb)));
            f.add_clause(&lits);
        }
    }

    // Having entered c from behind, the path must continue straight ahead
    // unless the cell ahead was already visited. A wall or obstacle ahead
    // leaves the turn free, so no clause is needed there.
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|c| {
            let at = vm.cell(c);
            Direction::ALL.into_iter().filter_map(move |d| {
                let behind = slot_of(puzzle.step(at, d.opposite()))?;
                let ahead = slot_of(puzzle.step(at, d))?;
                Some((behind, c, ahead))
            })
        })
        .collect();
    for t in 1..n.saturating_sub(1) {
        for &(behind, c, ahead) in &triples {
            lits.clear();
            lits.extend([-vm.var(t - 1, behind), -vm.var(t, c), vm.var(t + 1, ahead)]);
            lits.extend((0..t).map(|j| vm.var(j, ahead)));
            f.add_clause(&lits);
        }
    }

    (f, vm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_models(f: &CnfFormula) -> Vec<Vec<bool>> {
        let n = f.num_vars();
        (0u32..1 << n)
            .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|a| f.is_satisfied_by(a))
            .collect()
    }

    #[test]
    fn two_cell_corridor_has_unique_model() {
        let p = Puzzle::new(1, 2, [], Coord::new(0, 0)).unwrap();
        let (f, vm) = encode_cnf(&p);
        assert_eq!((vm.steps(), f.num_vars()), (2, 4));
        // unit, (ALO + one pair) for each of 2 steps and 2 cells, adjacency at t=0
        assert_eq!(f.num_clauses(), 1 + 8 + 2);
        let models = all_models(&f);
        assert_eq!(models.len(), 1);
        let m = &models[0];
        let c0 = vm.cell_slot(Coord::new(0, 0)).unwrap();
        let c1 = vm.cell_slot(Coord::new(0, 1)).unwrap();
        assert!(m[vm.var(0, c0) as usize - 1] && m[vm.var(1, c1) as usize - 1]);
        assert_eq!(m.iter().filter(|&&b| b).count(), 2);
    }

    #[test]
    fn corridor_from_middle_has_no_model() {
        let p = Puzzle::new(1, 3, [], Coord::new(0, 1)).unwrap();
        let (f, _) = encode_cnf(&p);
        assert_eq!(f.num_vars(), 9);
        assert!(all_models(&f).is_empty());
    }

    #[test]
    fn variable_count_is_square_of_free_cells() {
        let p = Puzzle::new(3, 3, [], Coord::new(0, 0)).unwrap();
        assert_eq!(encode_cnf(&p).0.num_vars(), 81);
        let p = Puzzle::parse("S.#\n...\n#..").unwrap();
        assert_eq!(encode_cnf(&p).0.num_vars(), 49);
    }

    #[test]
    fn varmap_roundtrip() {
        let p = Puzzle::parse("S.#\n...\n#..").unwrap();
        let vm = VarMap::new(&p);
        for v in 1..=vm.num_vars() as Lit {
            let (t, c) = vm.decode_var(v).unwrap();
            assert_eq!(vm.var(t, c), v);
        }
        assert_eq!(vm.decode_var(0), None);
        assert_eq!(vm.decode_var(vm.num_vars() as Lit + 1), None);
        assert_eq!(vm.cell_slot(Coord::new(0, 2)), None);
    }

    #[test]
    fn straight_clauses_only_for_free_triples() {
        // 1x2 has no interior triple; 1x3 has (0,0)->(0,1)->(0,2) both ways
        let p = Puzzle::new(1, 3, [], Coord::new(0, 0)).unwrap();
        let (f, _) = encode_cnf(&p);
        let n = 3;
        let adjacency = (n - 1) * n;
        let straight = (n - 2) * 2;
        assert_eq!(f.num_clauses(), 1 + exactly_one_clause_count(n) + adjacency + straight);
    }
}
