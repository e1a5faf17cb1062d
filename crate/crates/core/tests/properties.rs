mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use ttrpca_core::{
    mode_fold, mode_product, mode_unfold, procrustes, soft_threshold, svt, tt_contract, tt_fold,
    tt_unfold, ttnn, tucker_compress, tucker_product, DenseTensor, Matrix, TtFormat,
};

fn dims_strategy(max_order: usize, max_d: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=max_d, 2..=max_order)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn folds_invert_unfolds(dims in dims_strategy(4, 5), seed in any::<u64>()) {
        let t = gaussian_tensor(&dims, &mut rng(seed));
        for mode in 0..dims.len() {
            let back = mode_fold(&mode_unfold(&t, mode).unwrap(), mode, &dims).unwrap();
            prop_assert_eq!(&back, &t);
        }
        for split in 1..dims.len() {
            let m = tt_unfold(&t, split).unwrap();
            prop_assert_eq!(&m, &naive_tt_unfold(&t, split));
            prop_assert_eq!(&tt_fold(&m, split, &dims).unwrap(), &t);
        }
    }

    #[test]
    fn mode_product_matches_definition(dims in dims_strategy(4, 4), rows in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = gaussian_tensor(&dims, &mut r);
        let mode = r.random_range(0..dims.len());
        let m = gaussian_matrix(rows, dims[mode], &mut r);
        let fast = mode_product(&t, &m, mode).unwrap();
        let slow = naive_mode_product(&t, &m, mode);
        prop_assert!(fast.distance(&slow) <= 1e-12 * (1.0 + slow.frobenius_norm()));
    }

    /// `X_[k] = (U_k ⊗ ⋯ ⊗ U_1) X̃_[k] (U_K ⊗ ⋯ ⊗ U_{k+1})ᵀ` for every split.
    #[test]
    fn sequential_unfolding_factorizes(order in 3usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let ranks: Vec<usize> = (0..order).map(|_| r.random_range(1..=3)).collect();
        let dims: Vec<usize> = ranks.iter().map(|&k| k + r.random_range(0..=2)).collect();
        let core = gaussian_tensor(&ranks, &mut r);
        let factors: Vec<Matrix> = dims.iter().zip(&ranks).map(|(&d, &k)| random_orthonormal(d, k, &mut r)).collect();
        let full = tucker_product(&core, &factors).unwrap();
        for split in 1..order {
            let left = factors[..split].iter().rev().cloned().reduce(|a, b| naive_kron(&a, &b)).unwrap();
            let right = factors[split..].iter().rev().cloned().reduce(|a, b| naive_kron(&a, &b)).unwrap();
            let expect = naive_matmul(&naive_matmul(&left, &naive_tt_unfold(&core, split)), &right.transpose());
            let got = tt_unfold(&full, split).unwrap();
            prop_assert!(matrix_distance(&got, &expect) <= 1e-10 * expect.frobenius_norm());
        }
    }

    /// Compression is lossless and the TT nuclear norm is unchanged.
    #[test]
    fn compression_preserves_ttnn(order in 3usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let max_d = if order == 3 { 16 } else { 8 };
        let dims: Vec<usize> = (0..order).map(|_| r.random_range(2..=max_d)).collect();
        let ranks: Vec<usize> = (1..order).map(|_| r.random_range(1..=4)).collect();
        let tt = TtFormat::random(&dims, &ranks, &mut r).unwrap();
        let full = tt_contract(&tt);
        let comp = tucker_compress(&tt).unwrap();
        prop_assert!(rel_distance(&comp.to_dense(), &full) <= 1e-10);
        let alpha: Vec<f64> = (1..order).map(|_| r.random_range(0.1..1.0)).collect();
        let a = ttnn(&full, &alpha).unwrap();
        let b = ttnn(&comp.core, &alpha).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a);
        for u in &comp.factors {
            let g = u.gram();
            prop_assert!(matrix_distance(&g, &Matrix::identity(u.cols())) <= 1e-10);
        }
    }

    #[test]
    fn ttnn_matches_jacobi_reference(dims in dims_strategy(3, 5), seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = gaussian_tensor(&dims, &mut r);
        let alpha: Vec<f64> = (1..dims.len()).map(|_| r.random_range(0.0..1.0)).collect();
        let a = ttnn(&t, &alpha).unwrap();
        let b = reference_ttnn(&t, &alpha);
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b));
    }

    #[test]
    fn ttnn_is_absolutely_homogeneous(dims in dims_strategy(4, 4), c in -5.0f64..5.0, seed in any::<u64>()) {
        let t = gaussian_tensor(&dims, &mut rng(seed));
        let alpha = vec![0.5; dims.len() - 1];
        let a = ttnn(&t.scaled(c), &alpha).unwrap();
        let b = c.abs() * ttnn(&t, &alpha).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b));
    }

    #[test]
    fn svt_shrinks_singular_values(rows in 1usize..7, cols in 1usize..7, lambda in 0.0f64..2.0, seed in any::<u64>()) {
        let m = gaussian_matrix(rows, cols, &mut rng(seed));
        let before = jacobi_singular_values(&m);
        let after = jacobi_singular_values(&svt(&m, lambda).unwrap());
        for (s, t) in before.iter().zip(&after) {
            prop_assert!((t - (s - lambda).max(0.0)).abs() <= 1e-10 * (1.0 + s));
        }
    }

    #[test]
    fn svt_is_nonexpansive(rows in 1usize..7, cols in 1usize..7, lambda in 0.0f64..2.0, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = gaussian_matrix(rows, cols, &mut r);
        let b = gaussian_matrix(rows, cols, &mut r);
        let lhs = matrix_distance(&svt(&a, lambda).unwrap(), &svt(&b, lambda).unwrap());
        prop_assert!(lhs <= matrix_distance(&a, &b) + 1e-12);
    }

    #[test]
    fn soft_threshold_per_entry(dims in dims_strategy(3, 5), tau in 0.0f64..1.5, seed in any::<u64>()) {
        let t = gaussian_tensor(&dims, &mut rng(seed));
        let z = soft_threshold(&t, tau).unwrap();
        for (&x, &v) in t.data().iter().zip(z.data()) {
            // closed form: 0 inside the dead zone, x ∓ τ outside
            let expect = if x.abs() <= tau { 0.0 } else { x - tau * x.signum() };
            prop_assert!((v - expect).abs() <= 1e-15);
            prop_assert!(v.abs() <= x.abs() && v * x >= 0.0);
        }
    }
}

#[test]
fn svt_is_the_proximal_point() {
    // λ‖Z‖_* + ½‖Z − m‖² is minimized by svt(m, λ)
    for seed in 0..20 {
        let mut r = rng(seed);
        let m = gaussian_matrix(6, 4, &mut r);
        let lambda = 0.2;
        let obj = |z: &Matrix| {
            lambda * jacobi_singular_values(z).iter().sum::<f64>()
                + 0.5 * matrix_distance(z, &m).powi(2)
        };
        let z = svt(&m, lambda).unwrap();
        let best = obj(&z);
        for _ in 0..500 {
            let scale = 10f64.powf(r.random_range(-4.0..0.0));
            let noise = gaussian_matrix(6, 4, &mut r);
            let cand = Matrix::from_fn(6, 4, |i, j| z.get(i, j) + scale * noise.get(i, j));
            assert!(best <= obj(&cand) + 1e-12, "seed {seed}: perturbation improves");
        }
    }
}

#[test]
fn soft_threshold_is_the_proximal_point() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let t = gaussian_tensor(&[3, 4, 2], &mut r);
        let tau = 0.3;
        let obj = |z: &DenseTensor| {
            tau * z.data().iter().map(|v| v.abs()).sum::<f64>() + 0.5 * z.distance(&t).powi(2)
        };
        let z = soft_threshold(&t, tau).unwrap();
        let best = obj(&z);
        for _ in 0..500 {
            let scale = 10f64.powf(r.random_range(-4.0..0.0));
            let noise = gaussian_tensor(t.dims(), &mut r);
            let mut cand = z.clone();
            cand.axpy(scale, &noise);
            assert!(best <= obj(&cand) + 1e-12, "seed {seed}: perturbation improves");
        }
    }
}

#[test]
fn procrustes_maximizes_alignment() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let m = gaussian_matrix(8, 3, &mut r);
        let p = procrustes(&m).unwrap();
        assert!(matrix_distance(&p.gram(), &Matrix::identity(3)) < 1e-10);
        let best = p.inner(&m);
        for _ in 0..500 {
            let u = random_orthonormal(8, 3, &mut r);
            assert!(best >= u.inner(&m) - 1e-12, "seed {seed}: candidate beats procrustes");
        }
    }
}
