//! Synthetic recovery experiments: planted low-TT-rank tensor plus sparse
//! ±1 corruption, recovery metrics, and paired solver benchmarks.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decomp::{tt_contract, TtFormat};
use crate::error::{Error, Result};
use crate::solver::{fttnn_solve, ttnn_solve, DecomposeResult, SolverConfig};
use crate::tensor::DenseTensor;

pub const CSV_HEADER: &str = "solver,d,r,nr,q,rse_x,rse_s,iters,wall_time_s";

/// Parameters of one synthetic problem family.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub dims: Vec<usize>,
    /// Internal TT ranks `[r₁, …, r_{K−1}]` of the planted tensor.
    pub tt_rank: Vec<usize>,
    /// Fraction of corrupted entries, in `[0, 1)`.
    pub noise_ratio: f64,
    /// Multiplier `q` used to derive the solver's Tucker rank.
    pub rank_scale: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `d^order` tensor with uniform TT rank `r`.
    pub fn cube(d: usize, order: usize, r: usize, noise_ratio: f64) -> Self {
        Self {
            dims: vec![d; order],
            tt_rank: vec![r; order.saturating_sub(1)],
            noise_ratio,
            rank_scale: 1.2,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rank_scale(mut self, q: f64) -> Self {
        self.rank_scale = q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 || self.tt_rank.len() + 1 != self.dims.len() {
            return Err(Error::InvalidDims(format!(
                "{} extents need {} TT ranks, got {}",
                self.dims.len(),
                self.dims.len().saturating_sub(1),
                self.tt_rank.len()
            )));
        }
        if self.dims.contains(&0) || self.tt_rank.contains(&0) {
            return Err(Error::InvalidDims("extents and TT ranks must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.noise_ratio) {
            return Err(Error::InvalidConfig(format!(
                "noise ratio must lie in [0, 1), got {}",
                self.noise_ratio
            )));
        }
        if !(self.rank_scale > 0.0 && self.rank_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "rank scale must be positive, got {}",
                self.rank_scale
            )));
        }
        Ok(())
    }

    /// Number of corrupted entries, `round(NR · ∏ d_k)`.
    pub fn support_size(&self) -> usize {
        let n: usize = self.dims.iter().product();
        (self.noise_ratio * n as f64).round() as usize
    }

    /// Tucker rank handed to the compressed solver; see [`given_rank`].
    pub fn given_rank(&self) -> Vec<usize> {
        given_rank(&self.dims, &self.tt_rank, self.rank_scale)
    }
}

/// `R_k = round(q · r_{k−1} · r_k)` clamped to `[1, d_k]`, with
/// `r₀ = r_K = 1`. For a 4th-order tensor with uniform TT rank `r` this is
/// `[round(qr), round(qr²), round(qr²), round(qr)]`.
pub fn given_rank(dims: &[usize], tt_rank: &[usize], q: f64) -> Vec<usize> {
    dims.iter()
        .enumerate()
        .map(|(k, &d)| {
            let left = if k == 0 { 1 } else { tt_rank[k - 1] };
            let right = tt_rank.get(k).copied().unwrap_or(1);
            let r = (q * (left * right) as f64).round() as usize;
            r.clamp(1, d)
        })
        .collect()
}

/// A generated problem `Y = X₀ + S₀`.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub y: DenseTensor,
    pub x0: DenseTensor,
    pub s0: DenseTensor,
}

/// Draws Gaussian TT cores for `X₀`, a uniformly random support of size
/// `round(NR · ∏ d_k)` for `S₀` with i.i.d. ±1 values on it, and returns
/// `Y = X₀ + S₀`. Deterministic in `spec.seed`.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x0 = tt_contract(&TtFormat::random(&spec.dims, &spec.tt_rank, &mut rng)?);
    let mut s0 = x0.zeros_like();
    let support = rand::seq::index::sample(&mut rng, x0.len(), spec.support_size());
    for i in support.iter() {
        s0.data_mut()[i] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    }
    let mut y = x0.clone();
    y.axpy(1.0, &s0);
    Ok(SyntheticInstance { y, x0, s0 })
}

/// Relative error `‖estimate − truth‖_F / ‖truth‖_F`.
pub fn rse(estimate: &DenseTensor, truth: &DenseTensor) -> Result<f64> {
    truth.same_dims(estimate)?;
    let norm = truth.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(estimate.distance(truth) / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    Fttnn,
    Ttnn,
}

impl SolverKind {
    pub const ALL: [SolverKind; 2] = [SolverKind::Fttnn, SolverKind::Ttnn];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Fttnn => "fttnn",
            SolverKind::Ttnn => "ttnn",
        }
    }

    pub fn solve(self, y: &DenseTensor, cfg: &SolverConfig) -> Result<DecomposeResult> {
        match self {
            SolverKind::Fttnn => fttnn_solve(y, cfg),
            SolverKind::Ttnn => ttnn_solve(y, cfg),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fttnn" => Ok(SolverKind::Fttnn),
            "ttnn" => Ok(SolverKind::Ttnn),
            other => Err(Error::InvalidConfig(format!(
                "unknown solver {other:?} (expected fttnn or ttnn)"
            ))),
        }
    }
}

/// Outcome of one solver on one generated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub solver: SolverKind,
    pub rse_x: f64,
    pub rse_s: f64,
    pub wall_time: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Per-solver average over the repeats of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub solver: SolverKind,
    pub dims: Vec<usize>,
    pub tt_rank: Vec<usize>,
    pub noise_ratio: f64,
    pub rank_scale: f64,
    pub rse_x: f64,
    pub rse_s: f64,
    pub iters: f64,
    pub wall_time: f64,
    /// Individual successful trials, in trial order.
    pub trials: Vec<TrialResult>,
    /// Error messages of failed trials.
    pub failures: Vec<String>,
}

fn compact(values: &[usize]) -> String {
    match values {
        [first, rest @ ..] if rest.iter().all(|v| v == first) => first.to_string(),
        _ => values
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("x"),
    }
}

impl BenchRow {
    /// One CSV record matching [`CSV_HEADER`].
    pub fn csv_record(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6e},{:.6e},{},{:.6}",
            self.solver,
            compact(&self.dims),
            compact(&self.tt_rank),
            self.noise_ratio,
            self.rank_scale,
            self.rse_x,
            self.rse_s,
            self.iters,
            self.wall_time
        )
    }
}

pub fn write_csv<W: Write>(mut w: W, rows: &[BenchRow]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.csv_record())?;
    }
    w.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub repeats: usize,
    /// Worker threads for independent trials; 1 runs serially.
    pub parallel: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            repeats: 1,
            parallel: 1,
        }
    }
}

/// Seed for trial `trial` derived from `base`: the first word of ChaCha8
/// stream `trial + 1` keyed by `base`. Serial and parallel runs agree.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(trial as u64 + 1);
    rng.next_u64()
}

/// Generates the instance for `trial` and runs every solver on it.
pub fn run_trial(
    spec: &SyntheticSpec,
    cfg: &SolverConfig,
    solvers: &[SolverKind],
    trial: usize,
) -> Result<Vec<Result<TrialResult>>> {
    run_trial_with(spec, cfg, solvers, trial, &SolverKind::solve)
}

fn run_trial_with<F>(
    spec: &SyntheticSpec,
    cfg: &SolverConfig,
    solvers: &[SolverKind],
    trial: usize,
    solve: &F,
) -> Result<Vec<Result<TrialResult>>>
where
    F: Fn(SolverKind, &DenseTensor, &SolverConfig) -> Result<DecomposeResult>,
{
    let spec = SyntheticSpec {
        seed: trial_seed(spec.seed, trial),
        ..spec.clone()
    };
    let inst = gen_synthetic(&spec)?;
    let mut cfg = cfg.clone();
    cfg.seed = trial_seed(cfg.seed, trial);
    if cfg.rank.is_none() {
        cfg.rank = Some(spec.given_rank());
    }
    Ok(solvers
        .iter()
        .map(|&solver| {
            let out = solve(solver, &inst.y, &cfg)?;
            Ok(TrialResult {
                solver,
                rse_x: rse(&out.x, &inst.x0)?,
                // With no corruption S₀ = 0 and the relative error is
                // undefined; report the absolute error instead.
                rse_s: rse(&out.s, &inst.s0).unwrap_or_else(|_| out.s.frobenius_norm()),
                wall_time: out.report.wall_time,
                iters: out.report.iters,
                converged: out.report.converged,
            })
        })
        .collect())
}

/// Runs `opts.repeats` trials of `spec` and averages per solver. When
/// `cfg.rank` is unset the compressed solver uses `spec.given_rank()`.
///
/// Failed solves are recorded in [`BenchRow::failures`]; only an invalid
/// spec or configuration is an error.
pub fn run_benchmark(
    spec: &SyntheticSpec,
    cfg: &SolverConfig,
    solvers: &[SolverKind],
    opts: BenchOptions,
) -> Result<Vec<BenchRow>> {
    run_benchmark_with(spec, cfg, solvers, opts, SolverKind::solve)
}

/// [`run_benchmark`] with a caller-supplied solve function.
pub fn run_benchmark_with<F>(
    spec: &SyntheticSpec,
    cfg: &SolverConfig,
    solvers: &[SolverKind],
    opts: BenchOptions,
    solve: F,
) -> Result<Vec<BenchRow>>
where
    F: Fn(SolverKind, &DenseTensor, &SolverConfig) -> Result<DecomposeResult> + Sync,
{
    spec.validate()?;
    let mut probe = cfg.clone();
    if probe.rank.is_none() {
        probe.rank = Some(spec.given_rank());
    }
    probe.validate(&spec.dims, solvers.contains(&SolverKind::Fttnn))?;

    let repeats = opts.repeats.max(1);
    let trial = |t| run_trial_with(spec, cfg, solvers, t, &solve);
    let outcomes: Vec<_> = if opts.parallel <= 1 {
        (0..repeats).map(trial).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallel)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(|| (0..repeats).into_par_iter().map(trial).collect())
    };

    let mut rows: Vec<BenchRow> = solvers
        .iter()
        .map(|&solver| BenchRow {
            solver,
            dims: spec.dims.clone(),
            tt_rank: spec.tt_rank.clone(),
            noise_ratio: spec.noise_ratio,
            rank_scale: spec.rank_scale,
            rse_x: f64::NAN,
            rse_s: f64::NAN,
            iters: f64::NAN,
            wall_time: f64::NAN,
            trials: Vec::new(),
            failures: Vec::new(),
        })
        .collect();
    for outcome in outcomes {
        match outcome {
            Ok(per_solver) => {
                for (row, res) in rows.iter_mut().zip(per_solver) {
                    match res {
                        Ok(trial) => row.trials.push(trial),
                        Err(e) => row.failures.push(e.to_string()),
                    }
                }
            }
            Err(e) => rows.iter_mut().for_each(|row| row.failures.push(e.to_string())),
        }
    }
    for row in &mut rows {
        if !row.trials.is_empty() {
            let n = row.trials.len() as f64;
            let mean = |f: fn(&TrialResult) -> f64| row.trials.iter().map(f).sum::<f64>() / n;
            row.rse_x = mean(|t| t.rse_x);
            row.rse_s = mean(|t| t.rse_s);
            row.iters = mean(|t| t.iters as f64);
            row.wall_time = mean(|t| t.wall_time);
        }
    }
    Ok(rows)
}

/// Repeats [`run_benchmark`] for every rank scale in `qs`, setting the
/// compressed solver's rank from [`given_rank`] each time.
pub fn rank_sweep(
    spec: &SyntheticSpec,
    qs: &[f64],
    cfg: &SolverConfig,
    solvers: &[SolverKind],
    opts: BenchOptions,
) -> Result<Vec<BenchRow>> {
    if qs.is_empty() {
        return Err(Error::InvalidConfig("rank sweep needs at least one q".into()));
    }
    let mut rows = Vec::new();
    for &q in qs {
        let spec = spec.clone().with_rank_scale(q);
        let cfg = cfg.clone().with_rank(spec.given_rank());
        rows.extend(run_benchmark(&spec, &cfg, solvers, opts)?);
    }
    Ok(rows)
}

/// `start, start + step, …` up to `end` inclusive, snapped to 1e-9 so that
/// decimal grids like `0.7:0.1:1.5` come out exact.
pub fn q_grid(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    let ok = step > 0.0 && end >= start && start.is_finite() && end.is_finite();
    if !ok {
        return Err(Error::InvalidConfig(format!(
            "bad grid {start}:{step}:{end}"
        )));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}
