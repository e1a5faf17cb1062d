//! Tensor-train representation, its Tucker compression, and the TT nuclear
//! norm.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{matmul_ref, singular_values_ref, Matrix};
use crate::tensor::{mode_fold, mode_unfold, tt_unfold_ref, tucker_product, DenseTensor};

/// Relative cutoff below which singular values of a core unfolding are
/// treated as zero when choosing the compressed extent.
pub const COMPRESS_RANK_TOL: f64 = 1e-12;

/// Chain of third-order cores `G⁽ᵏ⁾ ∈ ℝ^{r_{k−1} × d_k × r_k}` with
/// `r₀ = r_K = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TtFormat {
    cores: Vec<DenseTensor>,
}

impl TtFormat {
    pub fn new(cores: Vec<DenseTensor>) -> Result<Self> {
        if cores.len() < 2 {
            return Err(Error::InvalidDims(format!(
                "a TT format needs at least 2 cores, got {}",
                cores.len()
            )));
        }
        for (k, c) in cores.iter().enumerate() {
            if c.order() != 3 {
                return Err(Error::InvalidDims(format!(
                    "core {k} has order {}, expected 3",
                    c.order()
                )));
            }
        }
        let first = cores[0].dims()[0];
        let last = cores[cores.len() - 1].dims()[2];
        if first != 1 || last != 1 {
            return Err(Error::InvalidDims(format!(
                "boundary ranks must be 1, got r0={first}, rK={last}"
            )));
        }
        for (k, pair) in cores.windows(2).enumerate() {
            let (l, r) = (pair[0].dims()[2], pair[1].dims()[0]);
            if l != r {
                return Err(Error::RankChain {
                    left: k,
                    right: k + 1,
                    left_rank: l,
                    right_rank: r,
                });
            }
        }
        Ok(Self { cores })
    }

    /// Cores with i.i.d. standard normal entries. `ranks` holds the K−1
    /// internal ranks `[r₁, …, r_{K−1}]`.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], ranks: &[usize], rng: &mut R) -> Result<Self> {
        if dims.len() < 2 || ranks.len() + 1 != dims.len() {
            return Err(Error::InvalidDims(format!(
                "{} extents need {} TT ranks, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                ranks.len()
            )));
        }
        let full: Vec<usize> = std::iter::once(1)
            .chain(ranks.iter().copied())
            .chain(std::iter::once(1))
            .collect();
        let cores = dims
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                let shape = [full[k], d, full[k + 1]];
                DenseTensor::from_fn(&shape, |_| rng.sample(StandardNormal))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cores)
    }

    pub fn cores(&self) -> &[DenseTensor] {
        &self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dims()[1]).collect()
    }

    /// Internal TT ranks `[r₁, …, r_{K−1}]`.
    pub fn ranks(&self) -> Vec<usize> {
        self.cores[..self.cores.len() - 1]
            .iter()
            .map(|c| c.dims()[2])
            .collect()
    }
}

/// Small core plus orthonormal factors: `X = core ×₁ U₁ ⋯ ×_K U_K`.
#[derive(Debug, Clone)]
pub struct TuckerCompressed {
    pub core: DenseTensor,
    pub factors: Vec<Matrix>,
}

impl TuckerCompressed {
    pub fn new(core: DenseTensor, factors: Vec<Matrix>) -> Result<Self> {
        if factors.len() != core.order() {
            return Err(Error::shape(
                format!("{} factors", core.order()),
                factors.len(),
            ));
        }
        for (k, u) in factors.iter().enumerate() {
            if u.cols() != core.dims()[k] || u.cols() > u.rows() {
                return Err(Error::shape(
                    format!("d x {} factor with d >= {}", core.dims()[k], core.dims()[k]),
                    format!("{}x{}", u.rows(), u.cols()),
                ));
            }
        }
        Ok(Self { core, factors })
    }

    pub fn ranks(&self) -> &[usize] {
        self.core.dims()
    }

    pub fn to_dense(&self) -> DenseTensor {
        tucker_product(&self.core, &self.factors).expect("factor shapes validated")
    }
}

/// Contracts the train into a dense tensor, entry-wise
/// `X(i₁…i_K) = G⁽¹⁾(:, i₁, :) ⋯ G⁽ᴷ⁾(:, i_K, :)`.
pub fn tt_contract(tt: &TtFormat) -> DenseTensor {
    let dims = tt.dims();
    let first = &tt.cores[0];
    // acc is (d₁⋯d_k) × r_k, column-major, earlier indices fastest.
    let mut acc = first.data().to_vec();
    let mut rows = dims[0];
    for core in &tt.cores[1..] {
        let [rl, d, rr] = [core.dims()[0], core.dims()[1], core.dims()[2]];
        let left = faer::MatRef::from_column_major_slice(&acc, rows, rl);
        let right = faer::MatRef::from_column_major_slice(core.data(), rl, d * rr);
        acc = matmul_ref(left, right).into_data();
        rows *= d;
    }
    DenseTensor::new(dims, acc).expect("contraction preserves the element count")
}

/// Rewrites a TT tensor as a Tucker product whose core is itself a (smaller)
/// TT tensor.
///
/// A core with `d_k > r_{k−1}·r_k` is replaced by `Σ_k V_kᵀ` folded back along
/// its middle mode, with `U_k` the left singular vectors of its mode-2
/// unfolding; otherwise `U_k = I`.
pub fn tucker_compress(tt: &TtFormat) -> Result<TuckerCompressed> {
    let mut cores = Vec::with_capacity(tt.order());
    let mut factors = Vec::with_capacity(tt.order());
    for core in &tt.cores {
        let [rl, d, rr] = [core.dims()[0], core.dims()[1], core.dims()[2]];
        if d > rl * rr {
            let unfolded = mode_unfold(core, 1)?;
            let svd = unfolded.thin_svd()?;
            let smax = svd.s.first().copied().unwrap_or(0.0);
            let keep = svd
                .s
                .iter()
                .take_while(|&&s| s > COMPRESS_RANK_TOL * smax)
                .count()
                .max(1);
            let u = Matrix::from_fn(d, keep, |i, j| svd.u.get(i, j));
            let sv = Matrix::from_fn(keep, rl * rr, |i, j| svd.s[i] * svd.v.get(j, i));
            cores.push(mode_fold(&sv, 1, &[rl, keep, rr])?);
            factors.push(u);
        } else {
            cores.push(core.clone());
            factors.push(Matrix::identity(d));
        }
    }
    let core = tt_contract(&TtFormat::new(cores)?);
    TuckerCompressed::new(core, factors)
}

/// Weighted TT nuclear norm `Σ_{k=1}^{K−1} α_k ‖X_[k]‖_*`.
pub fn ttnn(t: &DenseTensor, alpha: &[f64]) -> Result<f64> {
    let terms = ttnn_terms(t, alpha)?;
    Ok(terms.iter().sum())
}

/// The individual weighted terms `α_k ‖X_[k]‖_*`.
pub fn ttnn_terms(t: &DenseTensor, alpha: &[f64]) -> Result<Vec<f64>> {
    if alpha.len() + 1 != t.order() {
        return Err(Error::WeightLength {
            expected: t.order() - 1,
            found: alpha.len(),
        });
    }
    alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let sv = singular_values_ref(tt_unfold_ref(t, i + 1)?)?;
            Ok(a * sv.iter().sum::<f64>())
        })
        .collect()
}

/// `(d₁⋯d_k, d_{k+1}⋯d_K)` for each split k = 1..K−1.
pub(crate) fn split_products(dims: &[usize]) -> Vec<(f64, f64)> {
    (1..dims.len())
        .map(|k| {
            let rows = dims[..k].iter().map(|&d| d as f64).product();
            let cols = dims[k..].iter().map(|&d| d as f64).product();
            (rows, cols)
        })
        .collect()
}

/// Default unfolding weights: `α_k ∝ min(∏_{j≤k} d_j, ∏_{j>k} d_j)`,
/// normalized to sum to one.
pub fn default_alpha(dims: &[usize]) -> Vec<f64> {
    let delta: Vec<f64> = split_products(dims)
        .into_iter()
        .map(|(rows, cols)| rows.min(cols))
        .collect();
    let total: f64 = delta.iter().sum();
    delta.into_iter().map(|d| d / total).collect()
}
