//! Proximal and projection kernels used by the ADMM updates.

use faer::MatRef;

use crate::error::{Error, Result};
use crate::matrix::{thin_svd_ref, Matrix};
use crate::tensor::{tt_unfold_ref, DenseTensor};

/// Singular value thresholding: the proximal map of `λ‖·‖_*`.
///
/// With `m = A Σ Bᵀ`, returns `A · max(Σ − λ, 0) · Bᵀ`.
pub fn svt(m: &Matrix, lambda: f64) -> Result<Matrix> {
    check_threshold(lambda)?;
    let data = svt_ref(m.as_faer(), lambda)?;
    Matrix::from_col_major(m.rows(), m.cols(), data)
}

/// SVT on a view; returns column-major data of the same shape.
pub(crate) fn svt_ref(m: MatRef<'_, f64>, lambda: f64) -> Result<Vec<f64>> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let svd = thin_svd_ref(m)?;
    let kept: Vec<f64> = svd
        .s
        .iter()
        .map(|&s| s - lambda)
        .take_while(|&s| s > 0.0)
        .collect();
    let mut out = vec![0.0; rows * cols];
    if kept.is_empty() {
        return Ok(out);
    }
    let r = kept.len();
    // A_r · diag(σ − λ), then times B_rᵀ.
    let left = Matrix::from_fn(rows, r, |i, j| svd.u.get(i, j) * kept[j]);
    let right = Matrix::from_fn(r, cols, |i, j| svd.v.get(j, i));
    let prod = left.matmul(&right).expect("inner extent is r");
    out.copy_from_slice(prod.data());
    Ok(out)
}

/// `fold_k(SVT_λ(T_[k]))` over the sequential unfolding with `split` leading
/// modes.
pub(crate) fn svt_tt(t: &DenseTensor, split: usize, lambda: f64) -> Result<DenseTensor> {
    let data = svt_ref(tt_unfold_ref(t, split)?, lambda)?;
    DenseTensor::new(t.dims().to_vec(), data)
}

/// Scalar soft-shrinkage `sign(x) · max(|x| − τ, 0)`.
#[inline]
pub fn shrink(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// Elementwise soft-shrinkage, the proximal map of `τ‖·‖₁`.
pub fn soft_threshold(t: &DenseTensor, tau: f64) -> Result<DenseTensor> {
    check_threshold(tau)?;
    Ok(t.map(|x| shrink(x, tau)))
}

/// Orthogonal Procrustes: the maximizer of `⟨U, m⟩` over `d × R` matrices
/// with orthonormal columns, `A Bᵀ` from the thin SVD `m = A Σ Bᵀ`.
pub fn procrustes(m: &Matrix) -> Result<Matrix> {
    if m.rows() < m.cols() {
        return Err(Error::shape(
            format!("at least {} rows", m.cols()),
            m.rows(),
        ));
    }
    let svd = m.thin_svd()?;
    svd.u.matmul(&svd.v.transpose())
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "threshold must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::kron;

    #[test]
    fn svt_zero_is_identity() {
        let m = Matrix::from_fn(5, 3, |i, j| ((i * 3 + j) as f64).sin());
        let z = svt(&m, 0.0).unwrap();
        assert!(z.data().iter().zip(m.data()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn svt_diagonal() {
        let z = svt(&Matrix::diag(&[2.0, 1.0, 0.3]), 0.5).unwrap();
        let expect = Matrix::diag(&[1.5, 0.5, 0.0]);
        assert!(z.data().iter().zip(expect.data()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn svt_large_threshold_gives_zero() {
        let m = Matrix::from_fn(4, 6, |i, j| ((i + j) as f64).cos());
        let big = m.frobenius_norm() + 1.0;
        assert!(svt(&m, big).unwrap().data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn negative_threshold_rejected() {
        let m = Matrix::identity(2);
        assert!(svt(&m, -1.0).is_err());
        let t = DenseTensor::zeros(&[2, 2]).unwrap();
        assert!(soft_threshold(&t, -0.1).is_err());
    }

    #[test]
    fn shrink_scalars() {
        assert!((shrink(0.25, 0.1) - 0.15).abs() < 1e-15);
        assert_eq!(shrink(-0.05, 0.1), 0.0);
        assert!((shrink(-0.25, 0.1) + 0.15).abs() < 1e-15);
        assert_eq!(shrink(0.7, 0.0), 0.7);
    }

    #[test]
    fn soft_threshold_zero_is_identity() {
        let t = DenseTensor::from_fn(&[3, 4], |i| (i[0] as f64 - 1.2) * (i[1] as f64 + 0.5)).unwrap();
        assert_eq!(soft_threshold(&t, 0.0).unwrap(), t);
    }

    #[test]
    fn procrustes_fixed_points() {
        let q = Matrix::from_fn(6, 3, |i, j| ((i * 5 + j * 3 + 2) as f64).sin()).thin_q();
        let close = |a: &Matrix, b: &Matrix| {
            a.data().iter().zip(b.data()).all(|(x, y)| (x - y).abs() < 1e-10)
        };
        assert!(close(&procrustes(&q).unwrap(), &q));
        let scaled = Matrix::from_fn(6, 3, |i, j| 4.5 * q.get(i, j));
        assert!(close(&procrustes(&scaled).unwrap(), &q));
    }

    #[test]
    fn procrustes_rank_deficient_is_orthonormal() {
        let a = Matrix::from_rows(&[&[1.0], &[2.0], &[0.0], &[1.0]]).unwrap();
        let b = Matrix::from_rows(&[&[1.0, 1.0]]).unwrap();
        let m = kron(&a, &b); // rank one, 4 x 2
        let u = procrustes(&m).unwrap();
        let g = u.gram();
        let eye = Matrix::identity(2);
        assert!(g.data().iter().zip(eye.data()).all(|(x, y)| (x - y).abs() < 1e-10));
        let zero = procrustes(&Matrix::zeros(5, 2)).unwrap();
        let g = zero.gram();
        assert!(g.data().iter().zip(eye.data()).all(|(x, y)| (x - y).abs() < 1e-10));
    }

    #[test]
    fn procrustes_wide_rejected() {
        assert!(procrustes(&Matrix::zeros(2, 3)).is_err());
    }
}
