//! Baseline ADMM on the uncompressed problem
//! `min ‖X‖_ttnn + τ‖S‖₁ s.t. Y = X + S`, splitting `M^k = X` for every
//! sequential unfolding. Every iteration thresholds full-size unfoldings.

use std::time::Instant;

use super::{
    check_input, drive, relative_change, scaled_norm, DecomposeResult, SolverConfig, StepInfo,
};
use crate::error::Result;
use crate::prox::{shrink, svt_tt};
use crate::tensor::DenseTensor;

#[derive(Debug, Clone)]
pub struct TtnnState {
    pub x: DenseTensor,
    pub s: DenseTensor,
    pub m: Vec<DenseTensor>,
    pub q: Vec<DenseTensor>,
    pub e: DenseTensor,
    pub mu: f64,
    pub iter: usize,
}

#[derive(Debug)]
pub struct TtnnSolver<'a> {
    y: &'a DenseTensor,
    cfg: &'a SolverConfig,
    y_norm: f64,
    state: TtnnState,
}

impl<'a> TtnnSolver<'a> {
    pub fn new(y: &'a DenseTensor, cfg: &'a SolverConfig) -> Result<Self> {
        check_input(y)?;
        cfg.validate(y.dims(), false)?;
        let splits = y.order() - 1;
        let state = TtnnState {
            x: y.clone(),
            s: y.zeros_like(),
            m: vec![y.clone(); splits],
            q: vec![y.zeros_like(); splits],
            e: y.zeros_like(),
            mu: cfg.mu0,
            iter: 0,
        };
        Ok(Self {
            y,
            cfg,
            y_norm: y.frobenius_norm(),
            state,
        })
    }

    pub fn state(&self) -> &TtnnState {
        &self.state
    }

    pub fn into_state(self) -> TtnnState {
        self.state
    }

    pub fn step(&mut self) -> Result<StepInfo> {
        let y = self.y;
        let cfg = self.cfg;
        let st = &mut self.state;
        let mu = st.mu;
        let inv_mu = 1.0 / mu;
        let order = y.order();

        for k in 0..order - 1 {
            let mut b = st.x.clone();
            b.axpy(-inv_mu, &st.q[k]);
            st.m[k] = svt_tt(&b, k + 1, cfg.alpha[k] * inv_mu)?;
        }

        // X ← (1/K)[(Y − S + E/μ) + Σ_k (M^k + Q^k/μ)]
        let mut x = y.clone();
        x.axpy(-1.0, &st.s);
        x.axpy(inv_mu, &st.e);
        for (mk, qk) in st.m.iter().zip(&st.q) {
            x.axpy(1.0, mk);
            x.axpy(inv_mu, qk);
        }
        let x = x.scaled(1.0 / order as f64);

        let thresh = cfg.tau * inv_mu;
        let mut s = y.zeros_like();
        for (i, si) in s.data_mut().iter_mut().enumerate() {
            *si = shrink(y.data()[i] - x.data()[i] + inv_mu * st.e.data()[i], thresh);
        }

        for (qk, mk) in st.q.iter_mut().zip(&st.m) {
            qk.axpy(mu, mk);
            qk.axpy(-mu, &x);
        }
        let mut gap = 0.0;
        for i in 0..y.len() {
            let r = y.data()[i] - x.data()[i] - s.data()[i];
            st.e.data_mut()[i] += mu * r;
            gap += r * r;
        }

        let info = StepInfo {
            rel_change_x: relative_change(&x, &st.x),
            rel_change_s: relative_change(&s, &st.s),
            residual: scaled_norm(gap, self.y_norm),
        };
        st.x = x;
        st.s = s;
        st.mu = (cfg.rho * mu).min(cfg.mu_max);
        st.iter += 1;
        Ok(info)
    }
}

/// Baseline solve; `cfg.rank` is ignored.
pub fn ttnn_solve(y: &DenseTensor, cfg: &SolverConfig) -> Result<DecomposeResult> {
    let start = Instant::now();
    let mut solver = TtnnSolver::new(y, cfg)?;
    let mut report = drive(cfg.max_iters, cfg.tol, || solver.step())?;
    let state = solver.into_state();
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(DecomposeResult {
        x: state.x,
        s: state.s,
        report,
    })
}
