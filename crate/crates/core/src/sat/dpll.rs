//! Complete DPLL solver: unit propagation over two watched literals,
//! pure-literal elimination, branching on the lowest-numbered unassigned
//! variable (true first) and chronological backtracking. No clause learning.

use std::mem::size_of;

use crate::solve::{Deadline, SearchLimits};

use super::{CnfFormula, DpllStats, Lit, SatResult};

pub(crate) const LIMIT_REASON: &str = "search limit reached";

const CLOCK_CHECK_INTERVAL: u64 = 1 << 10;

/// Literal code: `2 * (var - 1)` for positive, `+1` for negative.
#[inline]
fn code(lit: Lit) -> usize {
    ((lit.unsigned_abs() as usize - 1) << 1) | usize::from(lit < 0)
}

#[derive(Clone, Copy)]
struct Decision {
    lit: Lit,
    trail_len: usize,
    flipped: bool,
}

struct Solver {
    lits: Vec<Lit>,
    starts: Vec<usize>,
    watches: Vec<Vec<u32>>,
    value: Vec<i8>,
    trail: Vec<Lit>,
    queue_head: usize,
    decisions: Vec<Decision>,
    cursor: usize,
    stats: DpllStats,
}

impl Solver {
    fn new(f: &CnfFormula) -> Solver {
        let n = f.num_vars();
        let mut lits = Vec::with_capacity(f.num_literals());
        let mut starts = Vec::with_capacity(f.num_clauses() + 1);
        for clause in f.clauses() {
            starts.push(lits.len());
            lits.extend_from_slice(clause);
        }
        starts.push(lits.len());
        Solver {
            lits,
            starts,
            watches: vec![Vec::new(); 2 * n],
            value: vec![0; n + 1],
            trail: Vec::with_capacity(n),
            queue_head: 0,
            decisions: Vec::new(),
            cursor: 1,
            stats: DpllStats::default(),
        }
    }

    fn tracked_bytes(&self) -> usize {
        self.lits.len() * size_of::<Lit>()
            + self.starts.len() * size_of::<usize>()
            + self.watches.iter().map(|w| w.capacity() * size_of::<u32>()).sum::<usize>()
            + self.value.len()
            + self.trail.capacity() * size_of::<Lit>()
            + self.decisions.capacity() * size_of::<Decision>()
    }

    #[inline]
    fn lit_value(&self, lit: Lit) -> i8 {
        let v = self.value[lit.unsigned_abs() as usize];
        if lit > 0 {
            v
        } else {
            -v
        }
    }

    #[inline]
    fn assign(&mut self, lit: Lit) {
        self.value[lit.unsigned_abs() as usize] = if lit > 0 { 1 } else { -1 };
        self.trail.push(lit);
    }

    fn unassign_to(&mut self, trail_len: usize) {
        while self.trail.len() > trail_len {
            let lit = self.trail.pop().expect("non-empty");
            let var = lit.unsigned_abs() as usize;
            self.value[var] = 0;
            self.cursor = self.cursor.min(var);
        }
        self.queue_head = trail_len;
    }

    /// Sets up watches and enqueues unit clauses. False on an immediate contradiction.
    fn attach_all(&mut self) -> bool {
        for cid in 0..self.starts.len() - 1 {
            let (s, e) = (self.starts[cid], self.starts[cid + 1]);
            if e - s == 1 {
                let lit = self.lits[s];
                match self.lit_value(lit) {
                    0 => self.assign(lit),
                    1 => {}
                    _ => return false,
                }
            } else {
                self.watches[code(-self.lits[s])].push(cid as u32);
                self.watches[code(-self.lits[s + 1])].push(cid as u32);
            }
        }
        true
    }

    /// Propagates the queued assignments. False on conflict.
    fn propagate(&mut self) -> bool {
        while self.queue_head < self.trail.len() {
            let lit = self.trail[self.queue_head];
            self.queue_head += 1;
            self.stats.propagations += 1;
            // clauses watching `lit`'s negation, which just became false
            let false_lit = -lit;
            let mut watchers = std::mem::take(&mut self.watches[code(lit)]);
            let mut keep = 0;
            let mut i = 0;
            let mut ok = true;
            while i < watchers.len() {
                let cid = watchers[i] as usize;
                i += 1;
                let s = self.starts[cid];
                let e = self.starts[cid + 1];
                if self.lits[s] == false_lit {
                    self.lits.swap(s, s + 1);
                }
                let other = self.lits[s];
                if self.lit_value(other) == 1 {
                    watchers[keep] = cid as u32;
                    keep += 1;
                    continue;
                }
                let mut moved = false;
                for k in s + 2..e {
                    if self.lit_value(self.lits[k]) != -1 {
                        self.lits.swap(s + 1, k);
                        let new_watch = self.lits[s + 1];
                        self.watches[code(-new_watch)].push(cid as u32);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                watchers[keep] = cid as u32;
                keep += 1;
                if self.lit_value(other) == -1 {
                    ok = false;
                    while i < watchers.len() {
                        watchers[keep] = watchers[i];
                        keep += 1;
                        i += 1;
                    }
                } else {
                    self.assign(other);
                }
            }
            watchers.truncate(keep);
            self.watches[code(lit)] = watchers;
            if !ok {
                return false;
            }
        }
        true
    }

    /// Assigns every literal that occurs with only one polarity among the
    /// clauses not yet satisfied, repeating until nothing changes.
    fn eliminate_pure_literals(&mut self) {
        let n = self.value.len() - 1;
        loop {
            let mut seen = vec![0u8; n + 1];
            for cid in 0..self.starts.len() - 1 {
                let clause = &self.lits[self.starts[cid]..self.starts[cid + 1]];
                if clause.iter().any(|&l| self.lit_value(l) == 1) {
                    continue;
                }
                for &l in clause {
                    if self.lit_value(l) == 0 {
                        seen[l.unsigned_abs() as usize] |= if l > 0 { 1 } else { 2 };
                    }
                }
            }
            let pure: Vec<Lit> = (1..=n)
                .filter(|&v| self.value[v] == 0)
                .filter_map(|v| match seen[v] {
                    1 => Some(v as Lit),
                    2 => Some(-(v as Lit)),
                    _ => None,
                })
                .collect();
            if pure.is_empty() {
                return;
            }
            for lit in pure {
                self.assign(lit);
            }
        }
    }

    fn next_unassigned(&mut self) -> Option<usize> {
        while self.cursor < self.value.len() && self.value[self.cursor] != 0 {
            self.cursor += 1;
        }
        (self.cursor < self.value.len()).then_some(self.cursor)
    }

    /// Undoes decisions until one can be flipped, then flips it. False when
    /// every decision has been tried both ways.
    fn backtrack(&mut self) -> bool {
        while let Some(d) = self.decisions.pop() {
            self.unassign_to(d.trail_len);
            if !d.flipped {
                self.decisions.push(Decision { lit: -d.lit, trail_len: d.trail_len, flipped: true });
                self.assign(-d.lit);
                return true;
            }
        }
        false
    }

    fn solve(&mut self, limits: SearchLimits, deadline: &Deadline) -> SatResult {
        if !self.attach_all() || !self.propagate() {
            return SatResult::Unsat;
        }
        self.eliminate_pure_literals();
        if !self.propagate() {
            return SatResult::Unsat;
        }
        loop {
            let Some(var) = self.next_unassigned() else {
                let model = self.value[1..].iter().map(|&v| v == 1).collect();
                return SatResult::Sat(model);
            };
            self.stats.decisions += 1;
            if limits.max_nodes.is_some_and(|max| self.stats.decisions > max)
                || (self.stats.decisions.is_multiple_of(CLOCK_CHECK_INTERVAL) && deadline.expired())
            {
                return SatResult::Unknown(LIMIT_REASON.to_string());
            }
            self.decisions.push(Decision { lit: var as Lit, trail_len: self.trail.len(), flipped: false });
            self.assign(var as Lit);
            while !self.propagate() {
                self.stats.conflicts += 1;
                if !self.backtrack() {
                    return SatResult::Unsat;
                }
            }
        }
    }
}

pub(crate) fn solve_with_stats(f: &CnfFormula, limits: SearchLimits, deadline: &Deadline) -> (SatResult, DpllStats) {
    let mut solver = Solver::new(f);
    let result = solver.solve(limits, deadline);
    if let SatResult::Sat(model) = &result {
        assert!(f.is_satisfied_by(model), "DPLL produced a non-model");
    }
    solver.stats.peak_tracked_bytes = solver.tracked_bytes();
    (result, solver.stats)
}

/// Runs to completion; never returns `Unknown`.
pub fn solve_sat_internal(f: &CnfFormula) -> SatResult {
    solve_with_stats(f, SearchLimits::UNBOUNDED, &Deadline::start(None)).0
}

/// Like [`solve_sat_internal`] but gives up with `Unknown` once `limits` are hit.
pub fn solve_sat_internal_with_limits(f: &CnfFormula, limits: SearchLimits) -> (SatResult, DpllStats) {
    solve_with_stats(f, limits, &Deadline::start(limits.timeout_ms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_sat(f: &CnfFormula) -> bool {
        let n = f.num_vars();
        (0u32..1 << n).any(|bits| {
            let a: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            f.is_satisfied_by(&a)
        })
    }

    #[test]
    fn unit_chain() {
        let f = CnfFormula::from_clauses(2, [vec![1], vec![-1, 2]]);
        assert_eq!(solve_sat_internal(&f), SatResult::Sat(vec![true, true]));
    }

    #[test]
    fn contradiction() {
        let f = CnfFormula::from_clauses(1, [vec![1], vec![-1]]);
        assert_eq!(solve_sat_internal(&f), SatResult::Unsat);
    }

    #[test]
    fn no_clauses_is_sat() {
        let f = CnfFormula::new(3);
        assert!(matches!(solve_sat_internal(&f), SatResult::Sat(m) if m.len() == 3));
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p[i][h] = pigeon i in hole h, var = 2*i + h + 1
        let v = |i: i32, h: i32| 2 * i + h + 1;
        let mut clauses: Vec<Vec<Lit>> = (0..3).map(|i| vec![v(i, 0), v(i, 1)]).collect();
        for h in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    clauses.push(vec![-v(a, h), -v(b, h)]);
                }
            }
        }
        let f = CnfFormula::from_clauses(6, clauses);
        assert_eq!(solve_sat_internal(&f), SatResult::Unsat);
    }

    #[test]
    fn decision_limit_reports_unknown() {
        let f = CnfFormula::from_clauses(2, [vec![1, 2], vec![-1, -2]]);
        let (r, _) = solve_sat_internal_with_limits(&f, SearchLimits { max_nodes: Some(0), timeout_ms: None });
        assert_eq!(r, SatResult::Unknown(LIMIT_REASON.to_string()));
    }

    fn clause_strategy(vars: i32) -> impl Strategy<Value = Vec<Lit>> {
        prop::collection::vec((1..=vars, any::<bool>()), 1..4)
            .prop_map(|lits| lits.into_iter().map(|(v, neg)| if neg { -v } else { v }).collect())
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(clauses in prop::collection::vec(clause_strategy(8), 0..40)) {
            let f = CnfFormula::from_clauses(8, &clauses);
            match solve_sat_internal(&f) {
                SatResult::Sat(model) => prop_assert!(f.is_satisfied_by(&model)),
                SatResult::Unsat => prop_assert!(!brute_force_sat(&f)),
                SatResult::Unknown(r) => prop_assert!(false, "unexpected unknown: {}", r),
            }
        }
    }
}
