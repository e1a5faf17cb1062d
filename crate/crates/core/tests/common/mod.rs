//! Independent reference routines for integration tests. Nothing here calls
//! the library's unfolding, product or SVD code.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ttrpca_core::{DenseTensor, Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_tensor(dims: &[usize], rng: &mut impl Rng) -> DenseTensor {
    DenseTensor::from_fn(dims, |_| rng.sample(StandardNormal)).unwrap()
}

/// Orthonormal columns by modified Gram–Schmidt on a Gaussian draw.
pub fn random_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    assert!(cols <= rows);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(cols);
    while q.len() < cols {
        let mut v: Vec<f64> = (0..rows).map(|_| rng.sample(StandardNormal)).collect();
        for u in &q {
            let p: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, a)| *x -= p * a);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            q.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    Matrix::from_fn(rows, cols, |i, j| q[j][i])
}

/// Multi-index of a linear position, first index fastest.
pub fn multi_index(mut lin: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&d| {
            let i = lin % d;
            lin /= d;
            i
        })
        .collect()
}

fn linear(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().rev().zip(dims.iter().rev()).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Sequential unfolding by explicit index arithmetic: rows enumerate the
/// first `split` modes, columns the rest, both with the first index fastest.
pub fn naive_tt_unfold(t: &DenseTensor, split: usize) -> Matrix {
    let dims = t.dims();
    let (head, tail) = dims.split_at(split);
    let rows: usize = head.iter().product();
    let cols: usize = tail.iter().product();
    Matrix::from_fn(rows, cols, |r, c| {
        let mut idx = multi_index(r, head);
        idx.extend(multi_index(c, tail));
        t.get(&idx)
    })
}

/// Mode-`mode` product `t ×_mode m` from its definition.
pub fn naive_mode_product(t: &DenseTensor, m: &Matrix, mode: usize) -> DenseTensor {
    let mut dims = t.dims().to_vec();
    dims[mode] = m.rows();
    DenseTensor::from_fn(&dims, |idx| {
        let mut src = idx.to_vec();
        (0..t.dims()[mode])
            .map(|j| {
                src[mode] = j;
                m.get(idx[mode], j) * t.get(&src)
            })
            .sum()
    })
    .unwrap()
}

/// Kronecker product from the definition, for `(U_k ⊗ ⋯ ⊗ U_1)` oracles.
pub fn naive_kron(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |i, j| {
        a.get(i / b.rows(), j / b.cols()) * b.get(i % b.rows(), j % b.cols())
    })
}

pub fn naive_matmul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols(), b.rows());
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum()
    })
}

/// Singular values by one-sided Jacobi rotations, descending.
pub fn jacobi_singular_values(m: &Matrix) -> Vec<f64> {
    let m = if m.cols() > m.rows() { m.transpose() } else { m.clone() };
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j)).collect())
        .collect();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a[p].iter().map(|x| x * x).sum();
                let beta: f64 = a[q].iter().map(|x| x * x).sum();
                let gamma: f64 = a[p].iter().zip(&a[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt().max(f64::MIN_POSITIVE));
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = a.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (u, v) = (*x, *y);
                    *x = c * u - s * v;
                    *y = s * u + c * v;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut s: Vec<f64> = a.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// `Σ_k α_k ‖T_[k]‖_*` through the naive unfolding and Jacobi SVD.
pub fn reference_ttnn(t: &DenseTensor, alpha: &[f64]) -> f64 {
    alpha
        .iter()
        .enumerate()
        .map(|(k, a)| a * jacobi_singular_values(&naive_tt_unfold(t, k + 1)).iter().sum::<f64>())
        .sum()
}

pub fn matrix_distance(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn rel_distance(a: &DenseTensor, b: &DenseTensor) -> f64 {
    a.distance(b) / b.frobenius_norm()
}
