//! Robust low-rank plus sparse decomposition of dense tensors under the
//! tensor-train nuclear norm, with a Tucker-compressed ADMM solver and an
//! uncompressed baseline.
//!
//! ```no_run
//! use ttrpca_core::{fttnn_solve, gen_synthetic, rse, SolverConfig, SyntheticSpec};
//!
//! let spec = SyntheticSpec::cube(12, 4, 3, 0.05).with_seed(1);
//! let inst = gen_synthetic(&spec).unwrap();
//! let cfg = SolverConfig::for_dims(&spec.dims).with_rank(spec.given_rank());
//! let out = fttnn_solve(&inst.y, &cfg).unwrap();
//! println!("rse = {:e}", rse(&out.x, &inst.x0).unwrap());
//! ```

pub mod decomp;
pub mod error;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod prox;
pub mod solver;
pub mod tensor;

pub use decomp::{default_alpha, tt_contract, tucker_compress, ttnn, ttnn_terms, TtFormat, TuckerCompressed};
pub use error::{Error, Result};
pub use harness::{
    gen_synthetic, given_rank, rank_sweep, rse, run_benchmark, BenchOptions, BenchRow,
    SolverKind, SyntheticInstance, SyntheticSpec, TrialResult,
};
pub use matrix::{kron, Matrix};
pub use prox::{procrustes, shrink, soft_threshold, svt};
pub use solver::{
    default_tau, fttnn_solve, ttnn_solve, DecomposeResult, Init, SolveReport, SolverConfig,
};
pub use tensor::{
    mode_fold, mode_product, mode_unfold, tt_fold, tt_unfold, tucker_product, tucker_project,
    DenseTensor,
};
