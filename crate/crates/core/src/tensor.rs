//! Dense K-th order tensors and the unfolding conventions.
//!
//! Storage is column-major: the first index varies fastest. Two unfoldings
//! are provided:
//!
//! * the standard mode unfolding ([`mode_unfold`]), `d_k × ∏_{j≠k} d_j`, whose
//!   columns enumerate the remaining indices with the lowest mode fastest;
//! * the sequential TT unfolding ([`tt_unfold`]), `(d₁⋯d_k) × (d_{k+1}⋯d_K)`,
//!   which under column-major storage is a pure reshape.
//!
//! Both share the same linearization, which is what makes
//! `X_[k] = (U_k ⊗ ⋯ ⊗ U₁) X̃_[k] (U_K ⊗ ⋯ ⊗ U_{k+1})ᵀ` hold for a Tucker
//! product `X = X̃ ×₁ U₁ ⋯ ×_K U_K`.

use faer::linalg::matmul::matmul;
use faer::{Accum, MatMut, MatRef, Par};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Dense real tensor of order K ≥ 2, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.len() < 2 {
        return Err(Error::InvalidDims(format!(
            "tensor order must be at least 2, got {}",
            dims.len()
        )));
    }
    if let Some(k) = dims.iter().position(|&d| d == 0) {
        return Err(Error::InvalidDims(format!("extent of mode {k} is zero")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidDims("element count overflows".into()))
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len = check_dims(&dims)?;
        if data.len() != len {
            return Err(Error::shape(
                format!("{len} entries for dims {dims:?}"),
                data.len(),
            ));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let len = check_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            data: vec![0.0; len],
        })
    }

    /// Fills a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = check_dims(dims)?;
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            for (i, &d) in idx.iter_mut().zip(dims) {
                *i += 1;
                if *i < d {
                    break;
                }
                *i = 0;
            }
        }
        Ok(Self {
            dims: dims.to_vec(),
            data,
        })
    }

    /// Same shape, zero entries.
    pub fn zeros_like(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            data: vec![0.0; self.data.len()],
        }
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        idx.iter()
            .zip(&self.dims)
            .rev()
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let at = self.linear_index(idx);
        self.data[at] = value;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &DenseTensor) -> f64 {
        debug_assert_eq!(self.dims, other.dims);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &DenseTensor) -> f64 {
        debug_assert_eq!(self.dims, other.dims);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|x| c * x)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &DenseTensor) {
        debug_assert_eq!(self.dims, other.dims);
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub(crate) fn same_dims(&self, other: &DenseTensor) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::shape(format!("{:?}", self.dims), format!("{:?}", other.dims)));
        }
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::InvalidMode {
                mode,
                order: self.order(),
            });
        }
        Ok(())
    }
}

/// `(∏_{j<k} d_j, d_k, ∏_{j>k} d_j)`.
pub(crate) fn split_extents(dims: &[usize], mode: usize) -> (usize, usize, usize) {
    let left = dims[..mode].iter().product();
    let right = dims[mode + 1..].iter().product();
    (left, dims[mode], right)
}

/// Standard mode unfolding (0-based `mode`): a `d_k × ∏_{j≠k} d_j` matrix.
pub fn mode_unfold(t: &DenseTensor, mode: usize) -> Result<Matrix> {
    t.check_mode(mode)?;
    let (left, dk, right) = split_extents(&t.dims, mode);
    let mut out = Matrix::zeros(dk, left * right);
    for b in 0..right {
        for i in 0..dk {
            let src = &t.data[left * (i + dk * b)..][..left];
            for (a, &x) in src.iter().enumerate() {
                out.set(i, a + left * b, x);
            }
        }
    }
    Ok(out)
}

/// Inverse of [`mode_unfold`].
pub fn mode_fold(m: &Matrix, mode: usize, dims: &[usize]) -> Result<DenseTensor> {
    let len = check_dims(dims)?;
    if mode >= dims.len() {
        return Err(Error::InvalidMode {
            mode,
            order: dims.len(),
        });
    }
    let (left, dk, right) = split_extents(dims, mode);
    if m.shape() != (dk, left * right) {
        return Err(Error::shape(
            format!("{dk}x{}", left * right),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let mut data = vec![0.0; len];
    for b in 0..right {
        for i in 0..dk {
            let dst = &mut data[left * (i + dk * b)..][..left];
            for (a, x) in dst.iter_mut().enumerate() {
                *x = m.get(i, a + left * b);
            }
        }
    }
    DenseTensor::new(dims.to_vec(), data)
}

fn tt_shape(dims: &[usize], split: usize) -> Result<(usize, usize)> {
    if split == 0 || split >= dims.len() {
        return Err(Error::InvalidSplit {
            split,
            order: dims.len(),
        });
    }
    Ok((dims[..split].iter().product(), dims[split..].iter().product()))
}

/// Sequential TT unfolding with the first `split` modes (1 ≤ split ≤ K−1)
/// indexing the rows.
pub fn tt_unfold(t: &DenseTensor, split: usize) -> Result<Matrix> {
    let (rows, cols) = tt_shape(&t.dims, split)?;
    Matrix::from_col_major(rows, cols, t.data.clone())
}

/// Zero-copy view of [`tt_unfold`].
pub(crate) fn tt_unfold_ref(t: &DenseTensor, split: usize) -> Result<MatRef<'_, f64>> {
    let (rows, cols) = tt_shape(&t.dims, split)?;
    Ok(MatRef::from_column_major_slice(&t.data, rows, cols))
}

/// Inverse of [`tt_unfold`].
pub fn tt_fold(m: &Matrix, split: usize, dims: &[usize]) -> Result<DenseTensor> {
    check_dims(dims)?;
    let (rows, cols) = tt_shape(dims, split)?;
    if m.shape() != (rows, cols) {
        return Err(Error::shape(
            format!("{rows}x{cols}"),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    DenseTensor::new(dims.to_vec(), m.data().to_vec())
}

/// Mode-k product `t ×_k m`; `m` has `d_k` columns and its row count
/// replaces `d_k`.
pub fn mode_product(t: &DenseTensor, m: &Matrix, mode: usize) -> Result<DenseTensor> {
    t.check_mode(mode)?;
    if m.cols() != t.dims[mode] {
        return Err(Error::shape(
            format!("{} columns", t.dims[mode]),
            m.cols(),
        ));
    }
    Ok(mode_product_ref(t, m.as_faer(), mode))
}

pub(crate) fn mode_product_ref(t: &DenseTensor, m: MatRef<'_, f64>, mode: usize) -> DenseTensor {
    let (left, dk, right) = split_extents(&t.dims, mode);
    debug_assert_eq!(m.ncols(), dk);
    let rows = m.nrows();
    let mut dims = t.dims.clone();
    dims[mode] = rows;
    let mut data = vec![0.0; left * rows * right];
    if left == 1 {
        let src = MatRef::from_column_major_slice(&t.data, dk, right);
        let dst = MatMut::from_column_major_slice_mut(&mut data, rows, right);
        matmul(dst, Accum::Replace, m, src, 1.0, Par::Seq);
    } else {
        // Each trailing slab is a left × d_k matrix; multiply it by mᵀ.
        for (src, dst) in t
            .data
            .chunks_exact(left * dk)
            .zip(data.chunks_exact_mut(left * rows))
        {
            let src = MatRef::from_column_major_slice(src, left, dk);
            let dst = MatMut::from_column_major_slice_mut(dst, left, rows);
            matmul(dst, Accum::Replace, src, m.transpose(), 1.0, Par::Seq);
        }
    }
    DenseTensor { dims, data }
}

/// `mode_unfold(a, mode) · mode_unfold(b, mode)ᵀ` without materializing
/// either unfolding. `a` and `b` must agree on every extent except `mode`.
pub(crate) fn mode_gram(a: &DenseTensor, b: &DenseTensor, mode: usize) -> Matrix {
    let (left, da, right) = split_extents(&a.dims, mode);
    let db = b.dims[mode];
    debug_assert_eq!(split_extents(&b.dims, mode), (left, db, right));
    let mut data = vec![0.0; da * db];
    let mut dst = MatMut::from_column_major_slice_mut(&mut data, da, db);
    if left == 1 {
        let ar = MatRef::from_column_major_slice(&a.data, da, right);
        let br = MatRef::from_column_major_slice(&b.data, db, right);
        matmul(dst, Accum::Replace, ar, br.transpose(), 1.0, Par::Seq);
    } else {
        for (sa, sb) in a
            .data
            .chunks_exact(left * da)
            .zip(b.data.chunks_exact(left * db))
        {
            let ar = MatRef::from_column_major_slice(sa, left, da);
            let br = MatRef::from_column_major_slice(sb, left, db);
            matmul(dst.as_mut(), Accum::Add, ar.transpose(), br, 1.0, Par::Seq);
        }
    }
    Matrix::from_col_major(da, db, data).expect("shape fixed above")
}

/// `t ×₁ m₁ ×₂ ⋯ ×_K m_K`, with every factor optionally transposed.
pub(crate) fn multi_mode_product(
    t: &DenseTensor,
    factors: &[Matrix],
    transpose: bool,
    skip: Option<usize>,
) -> DenseTensor {
    let mut cur: Option<DenseTensor> = None;
    for (k, u) in factors.iter().enumerate() {
        if Some(k) == skip {
            continue;
        }
        let view = if transpose { u.as_faer().transpose() } else { u.as_faer() };
        let src = cur.as_ref().unwrap_or(t);
        cur = Some(mode_product_ref(src, view, k));
    }
    cur.unwrap_or_else(|| t.clone())
}

/// Tucker reconstruction `core ×₁ U₁ ⋯ ×_K U_K`.
pub fn tucker_product(core: &DenseTensor, factors: &[Matrix]) -> Result<DenseTensor> {
    check_factors(core.dims(), factors, |u| u.cols())?;
    Ok(multi_mode_product(core, factors, false, None))
}

/// Projection `t ×₁ U₁ᵀ ⋯ ×_K U_Kᵀ`.
pub fn tucker_project(t: &DenseTensor, factors: &[Matrix]) -> Result<DenseTensor> {
    check_factors(t.dims(), factors, |u| u.rows())?;
    Ok(multi_mode_product(t, factors, true, None))
}

fn check_factors(dims: &[usize], factors: &[Matrix], extent: impl Fn(&Matrix) -> usize) -> Result<()> {
    if factors.len() != dims.len() {
        return Err(Error::shape(
            format!("{} factor matrices", dims.len()),
            factors.len(),
        ));
    }
    for (k, (u, &d)) in factors.iter().zip(dims).enumerate() {
        if extent(u) != d {
            return Err(Error::shape(
                format!("factor {k} compatible with extent {d}"),
                format!("{}x{}", u.rows(), u.cols()),
            ));
        }
    }
    Ok(())
}
