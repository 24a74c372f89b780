use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use mazedash::bench::{parse_sizes, parse_solvers};
use mazedash::{
    emit_csv, emit_table, expand_to_cells, format_moves, generate_puzzle, parse_moves, run_bench, solve_backtrack,
    solve_mcts, solve_sat, solve_sat_with_command, verify_solution, BenchConfig, Coord, GenConfig, GenError,
    MctsConfig, Puzzle, SearchLimits, SolveResult, SolveStatus, VerifyResult,
};
use serde::Serialize;

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "mazedash", version, about = "Solve, verify, generate and benchmark Maze Dash puzzles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a puzzle file and print the moves
    Solve(SolveArgs),
    /// Check a move string against a puzzle
    Verify(VerifyArgs),
    /// Generate solvable instances
    Generate(GenerateArgs),
    /// Run a solver benchmark matrix
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Backtrack,
    Mcts,
    Sat,
    SatExternal,
}

/// `N` or `random`.
#[derive(Clone, Copy)]
enum SeedArg {
    Fixed(u64),
    Random,
}

impl SeedArg {
    fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Random => {
                let s = rand::random();
                eprintln!("seed={s}");
                s
            }
        }
    }
}

fn parse_seed(s: &str) -> Result<SeedArg, String> {
    if s == "random" {
        return Ok(SeedArg::Random);
    }
    s.parse().map(SeedArg::Fixed).map_err(|_| format!("expected an integer or `random`, got `{s}`"))
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    solver: SolverArg,
    /// Puzzle file, or `-` for stdin
    #[arg(long)]
    input: PathBuf,
    /// MCTS iteration budget
    #[arg(long)]
    iterations: Option<u64>,
    /// MCTS exploration constant
    #[arg(long = "c")]
    exploration_c: Option<f64>,
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    seed: SeedArg,
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// External solver command, e.g. "minisat {file} /dev/stdout"
    #[arg(long)]
    sat_cmd: Option<String>,
    #[arg(long)]
    json: bool,
    /// Also print the visited cells in order
    #[arg(long)]
    cells: bool,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    moves: String,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    obstacles: usize,
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    seed: SeedArg,
    /// Instances to generate; instance i uses seed + i
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Write one file per instance here instead of printing
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Comma-separated RxC:K list
    #[arg(long)]
    sizes: String,
    /// Comma-separated list of backtrack, mcts, sat-internal, sat-external
    #[arg(long)]
    solvers: String,
    #[arg(long)]
    repeats: u32,
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
    /// Also write every record here
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    seed: SeedArg,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long = "c")]
    exploration_c: Option<f64>,
    #[arg(long)]
    sat_cmd: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

fn usage(message: impl std::fmt::Display) -> Failure {
    let err = Cli::command().error(clap::error::ErrorKind::ArgumentConflict, message);
    Failure::new(EXIT_USAGE, err.render().to_string().trim_end())
}

fn io_failure(path: &Path, err: io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("{}: {err}", path.display()))
}

fn read_puzzle(path: &Path) -> Result<Puzzle, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| io_failure(path, e))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| io_failure(path, e))?
    };
    Puzzle::parse(&text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    solver: &'static str,
    seed: Option<u64>,
    #[serde(flatten)]
    result: &'a SolveResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    cells: Option<Vec<Coord>>,
}

fn solve(args: SolveArgs, out: &mut impl Write) -> Result<u8, Failure> {
    if matches!(args.solver, SolverArg::SatExternal) && args.sat_cmd.is_none() {
        return Err(usage("`--solver sat-external` requires `--sat-cmd`"));
    }
    let puzzle = read_puzzle(&args.input)?;
    let limits = SearchLimits { max_nodes: None, timeout_ms: args.timeout_ms };
    let mut seed = None;
    let (name, result) = match args.solver {
        SolverArg::Backtrack => ("backtrack", solve_backtrack(&puzzle, limits)),
        SolverArg::Mcts => {
            let mut cfg = MctsConfig::unbounded(args.seed.resolve());
            seed = Some(cfg.seed);
            if let Some(n) = args.iterations {
                cfg.max_iterations = n;
            }
            if let Some(c) = args.exploration_c {
                cfg.exploration_c = c;
            }
            cfg.timeout_ms = args.timeout_ms;
            ("mcts", solve_mcts(&puzzle, cfg))
        }
        SolverArg::Sat => ("sat-internal", solve_sat(&puzzle, limits)),
        SolverArg::SatExternal => (
            "sat-external",
            solve_sat_with_command(&puzzle, args.sat_cmd.as_deref().expect("checked above"), args.timeout_ms),
        ),
    };
    let cells = match (&result.status, args.cells) {
        (SolveStatus::Solved(moves), true) => Some(expand_to_cells(&puzzle, moves).expect("solver output is legal")),
        _ => None,
    };

    let write =
        |out: &mut dyn Write, text: &str| writeln!(out, "{text}").map_err(|e| Failure::new(EXIT_IO, e.to_string()));
    if args.json {
        write(out, &to_json(&SolveOutput { solver: name, seed, result: &result, cells }))?;
    } else {
        match &result.status {
            SolveStatus::Solved(moves) => write(out, &format_moves(moves))?,
            SolveStatus::Error(reason) => eprintln!("error: {reason}"),
            other => write(out, other.label())?,
        }
        if let Some(cells) = cells {
            let line: Vec<String> = cells.iter().map(ToString::to_string).collect();
            write(out, &line.join(" "))?;
        }
    }
    Ok(match result.status {
        SolveStatus::Solved(_) => EXIT_OK,
        SolveStatus::Unsolvable => EXIT_NEGATIVE,
        SolveStatus::LimitExceeded => EXIT_LIMIT,
        SolveStatus::Error(_) => EXIT_IO,
    })
}

fn verify(args: VerifyArgs, out: &mut impl Write) -> Result<u8, Failure> {
    let moves = parse_moves(&args.moves).map_err(|e| usage(format!("--moves: {e}")))?;
    let puzzle = read_puzzle(&args.input)?;
    let verdict = verify_solution(&puzzle, &moves);
    let text = if args.json { to_json(&verdict) } else { verdict.to_string() };
    writeln!(out, "{text}").map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    Ok(if matches!(verdict, VerifyResult::Valid) { EXIT_OK } else { EXIT_NEGATIVE })
}

fn generate(args: GenerateArgs, out: &mut impl Write) -> Result<u8, Failure> {
    let base = args.seed.resolve();
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    for i in 0..args.count {
        let cfg = GenConfig::new(args.rows, args.cols, args.obstacles, base.wrapping_add(i));
        let g = match generate_puzzle(&cfg) {
            Ok(g) => g,
            Err(e @ GenError::InvalidConfig(_)) => return Err(usage(e)),
            Err(e) => return Err(Failure::new(EXIT_NEGATIVE, e.to_string())),
        };
        let text = g.to_text();
        let written = match &args.out {
            Some(dir) => {
                let path = dir.join(format!("maze_{}x{}_k{}_s{}.txt", args.rows, args.cols, args.obstacles, cfg.seed));
                fs::write(&path, &text).map_err(|e| io_failure(&path, e))?;
                writeln!(out, "{}", path.display())
            }
            None if i + 1 < args.count => writeln!(out, "{text}"),
            None => write!(out, "{text}"),
        };
        written.map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    }
    Ok(EXIT_OK)
}

fn bench(args: BenchArgs, out: &mut impl Write) -> Result<u8, Failure> {
    let sizes = parse_sizes(&args.sizes).map_err(usage)?;
    let solvers = parse_solvers(&args.solvers).map_err(usage)?;
    let mut cfg = BenchConfig::new(sizes, solvers, args.repeats);
    cfg.timeout_ms = args.timeout_ms;
    cfg.jobs = args.jobs;
    cfg.base_seed = args.seed.resolve();
    cfg.sat_cmd = args.sat_cmd;
    if let Some(n) = args.iterations {
        cfg.max_iterations = n;
    }
    if let Some(c) = args.exploration_c {
        cfg.exploration_c = c;
    }
    let records = run_bench(&cfg).map_err(usage)?;
    if let Some(path) = &args.csv {
        fs::write(path, emit_csv(&records)).map_err(|e| io_failure(path, e))?;
    }
    let table = emit_table(&records);
    match &args.out {
        Some(path) => fs::write(path, table).map_err(|e| io_failure(path, e))?,
        None => out.write_all(table.as_bytes()).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?,
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let outcome = match cli.command {
        Command::Solve(a) => solve(a, &mut out),
        Command::Verify(a) => verify(a, &mut out),
        Command::Generate(a) => generate(a, &mut out),
        Command::Bench(a) => bench(a, &mut out),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
