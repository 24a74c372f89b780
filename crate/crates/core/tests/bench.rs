use mazedash::{emit_csv, parse_csv, run_bench, BenchConfig, BenchRecord, SizeSpec, SolverKind};

fn size(rows: usize, cols: usize, obstacles: usize) -> SizeSpec {
    SizeSpec { rows, cols, obstacles }
}

fn without_runtime(records: &[BenchRecord]) -> Vec<BenchRecord> {
    records.iter().cloned().map(|r| BenchRecord { runtime_ms: 0.0, ..r }).collect()
}

#[test]
fn three_backtracking_trials() {
    let records = run_bench(&BenchConfig::new(vec![size(5, 5, 4)], vec![SolverKind::Backtrack], 3)).unwrap();
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|r| r.status == "Solved" && r.runtime_ms >= 0.0));
    assert_eq!(records.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![0, 1, 2]);
}

#[test]
fn one_record_per_size_solver_and_trial() {
    let solvers = vec![SolverKind::Mcts, SolverKind::Backtrack, SolverKind::SatInternal];
    let mut cfg = BenchConfig::new(vec![size(6, 6, 10), size(5, 5, 4)], solvers.clone(), 4);
    cfg.base_seed = 100;
    let records = run_bench(&cfg).unwrap();
    assert_eq!(records.len(), 2 * 3 * 4);
    // instances are shared across solvers within a trial
    for chunk in records.chunks(3) {
        assert_eq!(chunk.iter().map(|r| r.solver).collect::<Vec<_>>(), solvers);
        assert!(chunk.iter().all(|r| r.seed == chunk[0].seed && r.obstacles == chunk[0].obstacles));
        assert!(chunk.iter().all(|r| r.free_cells == chunk[0].free_cells));
    }
    for r in records.iter().filter(|r| r.solver == SolverKind::Mcts) {
        assert!(r.rollout_steps <= r.iterations * r.free_cells as u64);
    }
    for r in records.iter().filter(|r| r.solver != SolverKind::Mcts) {
        assert_eq!(r.rollout_steps, 0);
    }
}

#[test]
fn job_count_does_not_change_results() {
    let mut cfg =
        BenchConfig::new(vec![size(5, 5, 4), size(10, 10, 32)], vec![SolverKind::Mcts, SolverKind::Backtrack], 5);
    let serial = run_bench(&cfg).unwrap();
    cfg.jobs = 3;
    let parallel = run_bench(&cfg).unwrap();
    assert_eq!(without_runtime(&serial), without_runtime(&parallel));
}

#[test]
fn tiny_timeout_is_recorded_not_fatal() {
    let mut cfg = BenchConfig::new(vec![size(20, 20, 133)], vec![SolverKind::Backtrack, SolverKind::Mcts], 2);
    cfg.timeout_ms = 1;
    let records = run_bench(&cfg).unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r.status == "Solved" || r.status == "LimitExceeded"));

    let mut cfg = BenchConfig::new(vec![size(10, 10, 32)], vec![SolverKind::Mcts], 2);
    cfg.max_iterations = 0;
    assert!(run_bench(&cfg).unwrap().iter().all(|r| r.status == "LimitExceeded"));
}

#[test]
fn csv_round_trip_of_real_records() {
    let records =
        run_bench(&BenchConfig::new(vec![size(5, 5, 4)], vec![SolverKind::Mcts, SolverKind::SatInternal], 3)).unwrap();
    let text = emit_csv(&records);
    assert_eq!(text.lines().count(), records.len() + 1);
    assert_eq!(parse_csv(&text).unwrap(), records);
}

#[test]
fn external_solver_without_command_is_rejected() {
    let cfg = BenchConfig::new(vec![size(5, 5, 4)], vec![SolverKind::SatExternal], 1);
    assert!(run_bench(&cfg).is_err());
}
