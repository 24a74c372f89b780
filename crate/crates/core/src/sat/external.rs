//! Running an external SAT solver on a DIMACS file.
//!
//! The command template is split on whitespace; the token `{file}` is
//! replaced with the path of the temporary DIMACS file. Output follows the
//! SAT competition conventions: an `s SATISFIABLE` / `s UNSATISFIABLE` status
//! line and `v` lines listing the model literals, terminated by `0`.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use super::{emit_dimacs, CnfFormula, Lit, SatError, SatResult};
use crate::solve::Deadline;

pub const FILE_PLACEHOLDER: &str = "{file}";
pub(crate) const TIMEOUT_REASON: &str = "timeout";

/// Parses SAT-competition solver output into a result.
pub fn parse_solver_output(output: &str, num_vars: usize) -> Result<SatResult, SatError> {
    let mut status: Option<bool> = None;
    let mut values: Vec<Option<bool>> = vec![None; num_vars];
    for line in output.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = match rest.trim() {
                "SATISFIABLE" => Some(true),
                "UNSATISFIABLE" => Some(false),
                "UNKNOWN" | "INDETERMINATE" => return Ok(SatResult::Unknown("solver reported unknown".into())),
                other => return Err(SatError::OutputParseError(format!("unexpected status {other:?}"))),
            };
        } else if let Some(rest) = line.strip_prefix("v ").or(line.strip_prefix("v\t")) {
            for token in rest.split_whitespace() {
                let lit: Lit =
                    token.parse().map_err(|_| SatError::OutputParseError(format!("bad literal {token:?}")))?;
                if lit == 0 {
                    continue;
                }
                let var = lit.unsigned_abs() as usize;
                if var > num_vars {
                    return Err(SatError::OutputParseError(format!("literal {lit} out of range")));
                }
                values[var - 1] = Some(lit > 0);
            }
        }
    }
    match status {
        None => Err(SatError::OutputParseError("no status line".into())),
        Some(false) => Ok(SatResult::Unsat),
        // variables the solver left out are don't-cares
        Some(true) => Ok(SatResult::Sat(values.into_iter().map(|v| v.unwrap_or(false)).collect())),
    }
}

fn run(f: &CnfFormula, command: &str, timeout_ms: Option<u64>) -> Result<SatResult, SatError> {
    let deadline = Deadline::start(timeout_ms);
    let mut cnf = tempfile::Builder::new()
        .prefix("mazedash-")
        .suffix(".cnf")
        .tempfile()
        .map_err(|e| SatError::SolverLaunchFailure(format!("temp file: {e}")))?;
    cnf.write_all(emit_dimacs(f).as_bytes())
        .and_then(|_| cnf.flush())
        .map_err(|e| SatError::SolverLaunchFailure(format!("temp file: {e}")))?;
    let path = cnf.path().to_string_lossy().into_owned();

    let mut parts = command.split_whitespace().map(|t| t.replace(FILE_PLACEHOLDER, &path));
    let program = parts.next().ok_or_else(|| SatError::SolverLaunchFailure("empty command".into()))?;
    let args: Vec<String> = parts.collect();

    let mut out: File = tempfile::tempfile().map_err(|e| SatError::SolverLaunchFailure(format!("temp file: {e}")))?;
    let stdout = out.try_clone().map_err(|e| SatError::SolverLaunchFailure(e.to_string()))?;
    let mut child = Command::new(&program)
        .args(&args)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| SatError::SolverLaunchFailure(format!("{program}: {e}")))?;

    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {}
            Err(e) => return Err(SatError::SolverLaunchFailure(e.to_string())),
        }
        if deadline.expired() {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(SatResult::Unknown(TIMEOUT_REASON.into()));
        }
        let nap = deadline.remaining().unwrap_or(Duration::from_millis(5)).min(Duration::from_millis(5));
        thread::sleep(nap);
    };

    let mut text = String::new();
    out.seek(SeekFrom::Start(0))
        .and_then(|_| out.read_to_string(&mut text))
        .map_err(|e| SatError::OutputParseError(e.to_string()))?;
    // 10 and 20 are the competition's SAT and UNSAT exit codes
    if !matches!(status.code(), Some(0 | 10 | 20)) {
        return Err(SatError::OutputParseError(format!("solver exited with {status}")));
    }
    parse_solver_output(&text, f.num_vars())
}

/// Solves `f` with the external command. Launch failures, bad output,
/// unexpected exit codes and timeouts are reported as `Unknown`.
pub fn solve_sat_external(f: &CnfFormula, command: &str, timeout_ms: Option<u64>) -> SatResult {
    match run(f, command, timeout_ms) {
        Ok(SatResult::Sat(model)) if !f.is_satisfied_by(&model) => {
            SatResult::Unknown("solver model does not satisfy the formula".into())
        }
        Ok(result) => result,
        Err(SatError::SolverLaunchFailure(detail)) => SatResult::Unknown(format!("launch failure: {detail}")),
        Err(e @ SatError::OutputParseError(_)) => SatResult::Unknown(e.to_string()),
    }
}
