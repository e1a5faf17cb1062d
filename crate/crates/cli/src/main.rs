//! `ttrpca`: generate synthetic instances, solve TNSR1 tensors, run benchmarks.
//!
//! Exit status is 0 on success, 1 on I/O, format or solver failures, and 2
//! on usage errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ttrpca_core::harness::{q_grid, write_csv};
use ttrpca_core::{
    gen_synthetic, io as tio, rank_sweep, rse, run_benchmark, BenchOptions, BenchRow, Error,
    SolverConfig, SolverKind, SyntheticSpec,
};

#[derive(Parser)]
#[command(name = "ttrpca", version, about = "Tensor robust PCA with TT nuclear norm minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic low-TT-rank plus sparse instance.
    Synth(SynthArgs),
    /// Decompose a TNSR1 tensor into low-rank and sparse parts.
    Solve(SolveArgs),
    /// Run repeated synthetic trials and write averaged results as CSV.
    Bench(BenchArgs),
}

/// Solver parameters shared by every command.
#[derive(Args)]
struct SolverFlags {
    /// Weight of the l1 term [default: depends on the extents]
    #[arg(long)]
    tau: Option<f64>,
    /// Unfolding weights, one per split [default: depends on the extents]
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Stopping tolerance
    #[arg(long, default_value_t = ttrpca_core::solver::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = ttrpca_core::solver::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Growth factor of the penalty parameter per iteration
    #[arg(long, default_value_t = ttrpca_core::solver::DEFAULT_RHO)]
    rho: f64,
}

impl SolverFlags {
    fn config(&self, dims: &[usize], seed: u64) -> SolverConfig {
        let mut cfg = SolverConfig::for_dims(dims)
            .with_tol(self.tol)
            .with_max_iters(self.max_iters)
            .with_seed(seed);
        cfg.rho = self.rho;
        if let Some(tau) = self.tau {
            cfg = cfg.with_tau(tau);
        }
        if let Some(alpha) = &self.alpha {
            cfg = cfg.with_alpha(alpha.clone());
        }
        cfg
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Tensor extents, e.g. 30,30,30,30
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// TT rank [r1, ..., r(K-1)]
    #[arg(long, value_delimiter = ',', required = true)]
    tt_rank: Vec<usize>,
    /// Fraction of corrupted entries
    #[arg(long, default_value_t = 0.05)]
    nr: f64,
    /// Rank scale q for the compressed solver's Tucker rank
    #[arg(long, default_value_t = 1.2)]
    rank_scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving y.tnsr, x0.tnsr and s0.tnsr
    #[arg(long, required_unless_present = "solve")]
    out: Option<PathBuf>,
    /// Solve the instance and print the recovery errors as JSON
    #[arg(long)]
    solve: Option<SolverKind>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct SolveArgs {
    /// Input tensor in TNSR1 format
    input: PathBuf,
    #[arg(long, default_value_t = SolverKind::Fttnn)]
    solver: SolverKind,
    /// Tucker rank [R1, ..., RK] of the compressed core (fttnn only)
    #[arg(long, value_delimiter = ',')]
    rank: Option<Vec<usize>>,
    /// Output for the low-rank part [default: <input>.x.tnsr]
    #[arg(long)]
    out_x: Option<PathBuf>,
    /// Output for the sparse part [default: <input>.s.tnsr]
    #[arg(long)]
    out_s: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver_flags: SolverFlags,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    tt_rank: Vec<usize>,
    /// Corruption ratios, one row group each
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    nr: Vec<f64>,
    /// Rank scale q
    #[arg(long, default_value_t = 1.2, conflicts_with = "sweep_q")]
    rank_scale: f64,
    /// Sweep q over start:step:end instead of a single rank scale
    #[arg(long, value_parser = parse_grid)]
    sweep_q: Option<Grid>,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, value_delimiter = ',', default_value = "fttnn,ttnn")]
    solvers: Vec<SolverKind>,
    /// Worker threads for independent trials
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Clone)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [start, step, end] => q_grid(start, step, end).map(Grid).map_err(|e| e.to_string()),
        _ => Err("expected start:step:end".into()),
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::InvalidDims(_)
            | Error::WeightLength { .. }
            | Error::RankChain { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| match e {
        Error::Io(_) | Error::Format { .. } => Failure::Runtime(format!("{}: {e}", path.display())),
        e => e.into(),
    }
}

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let line = serde_json::to_string(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    println!("{line}");
    Ok(())
}

#[derive(Serialize)]
struct SynthReport {
    solver: String,
    dims: Vec<usize>,
    rank: Option<Vec<usize>>,
    tau: f64,
    iters: usize,
    converged: bool,
    wall_time_s: f64,
    rse_x: f64,
    rse_s: f64,
}

fn cmd_synth(args: SynthArgs) -> Result<(), Failure> {
    let spec = SyntheticSpec {
        dims: args.dims,
        tt_rank: args.tt_rank,
        noise_ratio: args.nr,
        rank_scale: args.rank_scale,
        seed: args.seed,
    };
    let inst = gen_synthetic(&spec)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        for (name, t) in [("y", &inst.y), ("x0", &inst.x0), ("s0", &inst.s0)] {
            let path = dir.join(format!("{name}.tnsr"));
            tio::save(&path, t).map_err(with_path(&path))?;
        }
    }
    if let Some(kind) = args.solve {
        let mut cfg = args.solver.config(&spec.dims, args.seed);
        if kind == SolverKind::Fttnn {
            cfg = cfg.with_rank(spec.given_rank());
        }
        let out = kind.solve(&inst.y, &cfg)?;
        print_json(&SynthReport {
            solver: kind.to_string(),
            dims: spec.dims.clone(),
            rank: cfg.rank.clone(),
            tau: cfg.tau,
            iters: out.report.iters,
            converged: out.report.converged,
            wall_time_s: out.report.wall_time,
            rse_x: rse(&out.x, &inst.x0)?,
            // S₀ = 0 without corruption; report the absolute size instead
            rse_s: rse(&out.s, &inst.s0).unwrap_or_else(|_| out.s.frobenius_norm()),
        })?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveReport {
    solver: String,
    dims: Vec<usize>,
    rank: Option<Vec<usize>>,
    tau: f64,
    alpha: Vec<f64>,
    iters: usize,
    converged: bool,
    wall_time_s: f64,
    x: PathBuf,
    s: PathBuf,
}

fn sibling(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().unwrap_or_default().to_string_lossy();
    input.with_file_name(format!("{stem}.{suffix}.tnsr"))
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let mut rank = args.rank;
    match args.solver {
        SolverKind::Fttnn if rank.is_none() => {
            return Err(Failure::Usage("--rank is required with --solver fttnn".into()))
        }
        SolverKind::Ttnn if rank.is_some() => {
            eprintln!("warning: --rank is ignored by the ttnn solver");
            rank = None;
        }
        _ => {}
    }
    let y = tio::load(&args.input).map_err(with_path(&args.input))?;
    let mut cfg = args.solver_flags.config(y.dims(), args.seed);
    cfg.rank = rank;
    let out = args.solver.solve(&y, &cfg)?;

    let x_path = args.out_x.unwrap_or_else(|| sibling(&args.input, "x"));
    let s_path = args.out_s.unwrap_or_else(|| sibling(&args.input, "s"));
    tio::save(&x_path, &out.x).map_err(with_path(&x_path))?;
    tio::save(&s_path, &out.s).map_err(with_path(&s_path))?;
    print_json(&SolveReport {
        solver: args.solver.to_string(),
        dims: y.dims().to_vec(),
        rank: cfg.rank,
        tau: cfg.tau,
        alpha: cfg.alpha,
        iters: out.report.iters,
        converged: out.report.converged,
        wall_time_s: out.report.wall_time,
        x: x_path,
        s: s_path,
    })
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let opts = BenchOptions {
        repeats: args.repeats,
        parallel: args.parallel,
    };
    let cfg = args.solver.config(&args.dims, args.seed);
    let mut rows: Vec<BenchRow> = Vec::new();
    for &nr in &args.nr {
        let spec = SyntheticSpec {
            dims: args.dims.clone(),
            tt_rank: args.tt_rank.clone(),
            noise_ratio: nr,
            rank_scale: args.rank_scale,
            seed: args.seed,
        };
        rows.extend(match &args.sweep_q {
            Some(Grid(qs)) => rank_sweep(&spec, qs, &cfg, &args.solvers, opts)?,
            None => run_benchmark(&spec, &cfg, &args.solvers, opts)?,
        });
    }
    for row in &rows {
        for e in &row.failures {
            eprintln!("warning: {} trial failed (nr={}, q={}): {e}", row.solver, row.noise_ratio, row.rank_scale);
        }
    }
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            write_csv(BufWriter::new(file), &rows)?;
        }
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap prints usage and exits with status 2 on bad flags.
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
    };
    let _ = io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
