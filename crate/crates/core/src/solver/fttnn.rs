//! ADMM on the Tucker-compressed problem
//!
//! ```text
//! min ‖X̃‖_ttnn + τ‖S‖₁   s.t.  X = X̃ ×₁ U₁ ⋯ ×_K U_K,  Y = X + S,  U_k ∈ St(d_k, R_k)
//! ```
//!
//! with splitting variables `M^k = X̃` (k = 1..K−1) and multipliers `Q^k`
//! (for `M^k = X̃`), `E` (for `Y = X + S`) and `P` (for the Tucker coupling).
//! Each block update is the exact minimizer of the augmented Lagrangian in
//! that block; only the core-sized tensors are ever thresholded.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    check_input, drive, relative_change, scaled_norm, DecomposeResult, Init, SolverConfig,
    StepInfo,
};
use crate::decomp::{tt_contract, TtFormat};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::prox::{procrustes, shrink, svt_tt};
use crate::tensor::{mode_gram, multi_mode_product, DenseTensor};

/// Full iterate of the compressed solver.
#[derive(Debug, Clone)]
pub struct FttnnState {
    /// Low-rank estimate, full size.
    pub x: DenseTensor,
    /// Sparse estimate, full size.
    pub s: DenseTensor,
    /// Compressed core `X̃`, extents `[R₁, …, R_K]`.
    pub core: DenseTensor,
    /// Orthonormal factors `U_k`, `d_k × R_k`.
    pub factors: Vec<Matrix>,
    /// Splitting copies `M^k` of the core.
    pub m: Vec<DenseTensor>,
    /// Multipliers `Q^k` for `M^k = X̃`.
    pub q: Vec<DenseTensor>,
    /// Multiplier for `Y = X + S`.
    pub e: DenseTensor,
    /// Multiplier for `X = X̃ ×₁ U₁ ⋯ ×_K U_K`.
    pub p: DenseTensor,
    pub mu: f64,
    pub iter: usize,
}

/// Stepwise driver; use [`fttnn_solve`] unless the iterates themselves are
/// of interest.
#[derive(Debug)]
pub struct FttnnSolver<'a> {
    y: &'a DenseTensor,
    cfg: &'a SolverConfig,
    y_norm: f64,
    state: FttnnState,
    /// `X̃ ×₁ U₁ ⋯ ×_K U_K` for the current core and factors.
    tucker: DenseTensor,
}

/// Internal TT ranks for the random initial core: the largest ranks the core
/// extents admit.
fn init_core_ranks(rank: &[usize]) -> Vec<usize> {
    (1..rank.len())
        .map(|k| {
            let left: usize = rank[..k].iter().product();
            let right: usize = rank[k..].iter().product();
            left.min(right)
        })
        .collect()
}

/// Truncated HOSVD of `y`: leading left singular vectors of each mode
/// unfolding, and the projection of `y` onto them.
fn hosvd_init(y: &DenseTensor, rank: &[usize]) -> Result<(DenseTensor, Vec<Matrix>)> {
    let mut factors = Vec::with_capacity(rank.len());
    for (k, &r) in rank.iter().enumerate() {
        let u = mode_gram(y, y, k).thin_svd()?.u;
        factors.push(Matrix::from_fn(u.rows(), r, |i, j| u.get(i, j)));
    }
    Ok((multi_mode_product(y, &factors, true, None), factors))
}

fn gaussian_init(y: &DenseTensor, rank: &[usize], seed: u64) -> Result<(DenseTensor, Vec<Matrix>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = tt_contract(&TtFormat::random(rank, &init_core_ranks(rank), &mut rng)?);
    let norm = core.frobenius_norm();
    let core = core.scaled(if norm > 0.0 { y.frobenius_norm() / norm } else { 0.0 });
    let factors = y
        .dims()
        .iter()
        .zip(rank)
        .map(|(&d, &r)| Matrix::from_fn(d, r, |_, _| rng.sample(StandardNormal)).thin_q())
        .collect();
    Ok((core, factors))
}

impl<'a> FttnnSolver<'a> {
    pub fn new(y: &'a DenseTensor, cfg: &'a SolverConfig) -> Result<Self> {
        check_input(y)?;
        cfg.validate(y.dims(), true)?;
        let rank = cfg.rank.as_deref().expect("validated");
        let (core, factors) = match cfg.init {
            Init::Hosvd => hosvd_init(y, rank)?,
            Init::Gaussian => gaussian_init(y, rank, cfg.seed)?,
        };
        let splits = y.order() - 1;
        let tucker = multi_mode_product(&core, &factors, false, None);
        let state = FttnnState {
            x: y.clone(),
            s: y.zeros_like(),
            m: vec![core.clone(); splits],
            q: vec![core.zeros_like(); splits],
            e: y.zeros_like(),
            p: y.zeros_like(),
            core,
            factors,
            mu: cfg.mu0,
            iter: 0,
        };
        Ok(Self {
            y,
            cfg,
            y_norm: y.frobenius_norm(),
            state,
            tucker,
        })
    }

    pub fn state(&self) -> &FttnnState {
        &self.state
    }

    pub fn into_state(self) -> FttnnState {
        self.state
    }

    /// `X̃ ×₁ U₁ ⋯ ×_K U_K` at the current iterate.
    pub fn tucker(&self) -> &DenseTensor {
        &self.tucker
    }

    /// One full ADMM sweep.
    pub fn step(&mut self) -> Result<StepInfo> {
        let y = self.y;
        let cfg = self.cfg;
        let st = &mut self.state;
        let mu = st.mu;
        let inv_mu = 1.0 / mu;
        let order = y.order();

        // M^k ← fold_k(SVT_{α_k/μ}(X̃_[k] − Q^k_[k]/μ))
        for k in 0..order - 1 {
            let mut b = st.core.clone();
            b.axpy(-inv_mu, &st.q[k]);
            st.m[k] = svt_tt(&b, k + 1, cfg.alpha[k] * inv_mu)?;
        }

        // X ← ½[(Y − S + E/μ) + (X̃×U − P/μ)]
        let mut x = y.zeros_like();
        for (i, xi) in x.data_mut().iter_mut().enumerate() {
            let from_data = y.data()[i] - st.s.data()[i] + inv_mu * st.e.data()[i];
            let from_tucker = self.tucker.data()[i] - inv_mu * st.p.data()[i];
            *xi = 0.5 * (from_data + from_tucker);
        }

        // S ← shrink_{τ/μ}(Y − X + E/μ)
        let thresh = cfg.tau * inv_mu;
        let mut s = y.zeros_like();
        for (i, si) in s.data_mut().iter_mut().enumerate() {
            *si = shrink(y.data()[i] - x.data()[i] + inv_mu * st.e.data()[i], thresh);
        }

        // A = X + P/μ couples to the Tucker product in both the core and
        // factor updates.
        let mut a = x.clone();
        a.axpy(inv_mu, &st.p);

        // X̃ ← (1/K)[A ×₁ U₁ᵀ ⋯ ×_K U_Kᵀ + Σ_k (M^k + Q^k/μ)]
        let mut core = multi_mode_product(&a, &st.factors, true, None);
        for (mk, qk) in st.m.iter().zip(&st.q) {
            core.axpy(1.0, mk);
            core.axpy(inv_mu, qk);
        }
        let core = core.scaled(1.0 / order as f64);

        // U_k ← Procrustes(unfold_k(A ×_{j≠k} U_jᵀ) · unfold_k(X̃)ᵀ), in sequence.
        for k in 0..order {
            let projected = multi_mode_product(&a, &st.factors, true, Some(k));
            st.factors[k] = procrustes(&mode_gram(&projected, &core, k))?;
        }

        let tucker = multi_mode_product(&core, &st.factors, false, None);

        for (qk, mk) in st.q.iter_mut().zip(&st.m) {
            qk.axpy(mu, mk);
            qk.axpy(-mu, &core);
        }
        let (mut gap_t, mut gap_y) = (0.0, 0.0);
        for i in 0..y.len() {
            let rt = x.data()[i] - tucker.data()[i];
            let ry = y.data()[i] - x.data()[i] - s.data()[i];
            st.p.data_mut()[i] += mu * rt;
            st.e.data_mut()[i] += mu * ry;
            gap_t += rt * rt;
            gap_y += ry * ry;
        }

        let info = StepInfo {
            rel_change_x: relative_change(&x, &st.x),
            rel_change_s: relative_change(&s, &st.s),
            residual: scaled_norm(gap_t.max(gap_y), self.y_norm),
        };
        st.x = x;
        st.s = s;
        st.core = core;
        self.tucker = tucker;
        st.mu = (cfg.rho * mu).min(cfg.mu_max);
        st.iter += 1;
        Ok(info)
    }
}

/// Decomposes `y` into low-TT-rank plus sparse parts with the
/// Tucker-compressed ADMM. Requires `cfg.rank`.
///
/// Running out of iterations is not an error: the last iterate is returned
/// with `report.converged == false`.
pub fn fttnn_solve(y: &DenseTensor, cfg: &SolverConfig) -> Result<DecomposeResult> {
    let start = Instant::now();
    let mut solver = FttnnSolver::new(y, cfg)?;
    let mut report = drive(cfg.max_iters, cfg.tol, || solver.step())?;
    let state = solver.into_state();
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(DecomposeResult {
        x: state.x,
        s: state.s,
        report,
    })
}
