use crate::decomp::{default_alpha, split_products};
use crate::error::{Error, Result};

pub const DEFAULT_MU0: f64 = 1e-2;
pub const DEFAULT_MU_MAX: f64 = 1e10;
pub const DEFAULT_RHO: f64 = 1.1;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 500;

/// Starting point of the compressed solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    /// `U_k` = leading `R_k` left singular vectors of `mode_unfold(Y, k)`,
    /// core = `Y ×₁ U₁ᵀ ⋯ ×_K U_Kᵀ`. Deterministic.
    #[default]
    Hosvd,
    /// Core contracted from standard normal TT cores (rescaled to `‖Y‖_F`),
    /// `U_k` from the thin QR of a Gaussian matrix. Uses `seed`.
    Gaussian,
}

/// ADMM parameters shared by both solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Weight of the ℓ₁ term.
    pub tau: f64,
    /// Unfolding weights, one per split (length K−1).
    pub alpha: Vec<f64>,
    pub mu0: f64,
    pub mu_max: f64,
    pub rho: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Tucker rank `[R₁, …, R_K]` of the compressed core. Required by the
    /// compressed solver, ignored by the baseline.
    pub rank: Option<Vec<usize>>,
    pub init: Init,
    pub seed: u64,
}

impl SolverConfig {
    /// Defaults for a tensor with the given extents: `τ` from
    /// [`default_tau`], `α` from [`default_alpha`], and the standard
    /// penalty schedule.
    pub fn for_dims(dims: &[usize]) -> Self {
        Self {
            tau: default_tau(dims),
            alpha: default_alpha(dims),
            mu0: DEFAULT_MU0,
            mu_max: DEFAULT_MU_MAX,
            rho: DEFAULT_RHO,
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            rank: None,
            init: Init::default(),
            seed: 0,
        }
    }

    pub fn with_rank(mut self, rank: Vec<usize>) -> Self {
        self.rank = Some(rank);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_alpha(mut self, alpha: Vec<f64>) -> Self {
        self.alpha = alpha;
        self
    }

    /// Checks the configuration against the input extents. `need_rank`
    /// additionally requires a valid Tucker rank.
    pub fn validate(&self, dims: &[usize], need_rank: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if dims.len() < 2 {
            return bad(format!("tensor order must be at least 2, got {}", dims.len()));
        }
        if self.alpha.len() + 1 != dims.len() {
            return Err(Error::WeightLength {
                expected: dims.len() - 1,
                found: self.alpha.len(),
            });
        }
        if self.alpha.iter().any(|&a| !(a >= 0.0 && a.is_finite())) {
            return bad(format!("alpha entries must be finite and nonnegative: {:?}", self.alpha));
        }
        for (name, v) in [
            ("tau", self.tau),
            ("mu0", self.mu0),
            ("mu_max", self.mu_max),
            ("tol", self.tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.rho >= 1.0 && self.rho.is_finite()) {
            return bad(format!("rho must be at least 1, got {}", self.rho));
        }
        if self.mu_max < self.mu0 {
            return bad(format!("mu_max {} is below mu0 {}", self.mu_max, self.mu0));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if need_rank {
            let Some(rank) = &self.rank else {
                return bad("a Tucker rank is required".into());
            };
            if rank.len() != dims.len() {
                return bad(format!(
                    "rank has {} entries for an order-{} tensor",
                    rank.len(),
                    dims.len()
                ));
            }
            if let Some((k, (&r, &d))) = rank
                .iter()
                .zip(dims)
                .enumerate()
                .find(|(_, (&r, &d))| r == 0 || r > d)
            {
                return bad(format!("rank entry {k} is {r}, must lie in 1..={d}"));
            }
        }
        Ok(())
    }
}

/// Default ℓ₁ weight
/// `τ = (1/(K−1)) Σ_k 1/√max(∏_{j≤k} d_j, ∏_{j>k} d_j)`.
pub fn default_tau(dims: &[usize]) -> f64 {
    let splits = dims.len().saturating_sub(1).max(1);
    let total: f64 = split_products(dims)
        .into_iter()
        .map(|(rows, cols)| 1.0 / rows.max(cols).sqrt())
        .sum();
    total / splits as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_examples() {
        let t = default_tau(&[30, 30, 30, 30]);
        let expect = (2.0 / 27000f64.sqrt() + 1.0 / 30.0) / 3.0;
        assert!((t - expect).abs() < 1e-15);
        assert!((t - 0.01517).abs() < 5e-6);

        assert!((default_tau(&[16, 16]) - 0.25).abs() < 1e-15);

        let t = default_tau(&[40, 40, 40, 40]);
        assert!((t - (2.0 / 64000f64.sqrt() + 1.0 / 40.0) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn defaults_follow_schedule() {
        let c = SolverConfig::for_dims(&[5, 6, 7]);
        assert_eq!((c.mu0, c.mu_max, c.rho, c.tol), (1e-2, 1e10, 1.1, 1e-8));
        assert_eq!(c.alpha.len(), 2);
        assert!(c.validate(&[5, 6, 7], false).is_ok());
        assert!(c.validate(&[5, 6, 7], true).is_err());
    }

    #[test]
    fn alpha_override_is_accepted() {
        let c = SolverConfig::for_dims(&[128, 128, 3, 81]).with_alpha(vec![0.1, 0.8, 0.1]);
        assert!(c.validate(&[128, 128, 3, 81], false).is_ok());
    }

    #[test]
    fn validation_errors() {
        let dims = [4, 5, 6];
        let base = SolverConfig::for_dims(&dims);
        assert!(matches!(
            base.clone().with_alpha(vec![1.0]).validate(&dims, false),
            Err(Error::WeightLength { .. })
        ));
        assert!(base.clone().with_tau(0.0).validate(&dims, false).is_err());
        assert!(base.clone().with_alpha(vec![-0.1, 1.1]).validate(&dims, false).is_err());
        assert!(base.clone().with_max_iters(0).validate(&dims, false).is_err());
        assert!(base.clone().with_rank(vec![2, 2]).validate(&dims, true).is_err());
        assert!(base.clone().with_rank(vec![2, 6, 2]).validate(&dims, true).is_err());
        assert!(base.clone().with_rank(vec![0, 2, 2]).validate(&dims, true).is_err());
        assert!(base.with_rank(vec![4, 5, 6]).validate(&dims, true).is_ok());
    }
}
