//! Small dense complex linear algebra and Hermitian spectral calculus.
//!
//! Everything here operates on `n x n` matrices with `1 <= n <= 8`; the
//! weight fields call these routines once per grid point.

mod jacobi;
mod matrix;
mod spectral;

pub use jacobi::{eig_hermitian, Eigendecomposition, JACOBI_MAX_SWEEPS, JACOBI_REL_TOL};
pub use matrix::{GeneralMatrix, HermitianMatrix, C64, MAX_DIM};
pub use spectral::{
    absolute_value, apply_function, bracket, complex_power, matrix_function, polar_diagonalize,
    polar_of, MatrixFunction, PolarDiagonalization, MAX_CONDITION,
};

pub(crate) use spectral::absolute_value_eig;

use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GeneralMatrix {
    loop {
        let cols: Vec<Vec<C64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for mut v in cols {
            for b in &basis {
                let proj: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
        if ok {
            return GeneralMatrix::from_fn(n, |i, j| basis[j][i]);
        }
    }
}

/// Random positive definite matrix with log-eigenvalues uniform in `[-log_spread, log_spread]`.
pub fn random_pd<R: Rng + ?Sized>(rng: &mut R, n: usize, log_spread: f64) -> HermitianMatrix {
    let u = random_unitary(rng, n);
    let d: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(-log_spread..=log_spread).exp())
        .collect();
    HermitianMatrix::new(&(&u * &GeneralMatrix::diagonal(&d)) * &u.adjoint())
}

/// Random invertible (generally non-normal) matrix `U diag(s) V*`.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, log_spread: f64) -> GeneralMatrix {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let s: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(-log_spread..=log_spread).exp())
        .collect();
    &(&u * &GeneralMatrix::diagonal(&s)) * &v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::MwlError;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unitary_defect(u: &GeneralMatrix) -> f64 {
        (&(&u.adjoint() * u) - &GeneralMatrix::identity(u.dim())).frobenius_norm()
    }

    /// One-sided Jacobi SVD (Hestenes); returns singular values descending.
    /// Test oracle only: independent of the eigensolver path.
    fn svd_oracle(a: &GeneralMatrix) -> Vec<f64> {
        let n = a.dim();
        let mut cols: Vec<Vec<C64>> = (0..n)
            .map(|j| (0..n).map(|i| a[(i, j)]).collect())
            .collect();
        for _ in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha: f64 = cols[p].iter().map(|x| x.norm_sqr()).sum();
                    let beta: f64 = cols[q].iter().map(|x| x.norm_sqr()).sum();
                    let gamma: C64 = cols[p]
                        .iter()
                        .zip(&cols[q])
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let e = gamma / gamma.norm();
                    let zeta = (beta - alpha) / (2.0 * gamma.norm());
                    let t = if zeta >= 0.0 { 1.0 } else { -1.0 }
                        / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..n {
                        let xp = cols[p][i];
                        let xq = cols[q][i];
                        cols[p][i] = xp * c - xq * e.conj() * s;
                        cols[q][i] = xp * s + xq * e.conj() * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut s: Vec<f64> = cols
            .iter()
            .map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }

    #[test]
    fn svd_oracle_on_known_matrix() {
        let a = GeneralMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 5.0]]).unwrap();
        // singular values of [[3,0],[4,5]] are sqrt(45) and sqrt(5)
        let s = svd_oracle(&a);
        assert!((s[0] - 45f64.sqrt()).abs() < 1e-12);
        assert!((s[1] - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eig_identity() {
        let e = eig_hermitian(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!(unitary_defect(&e.vectors) < 1e-14);
    }

    #[test]
    fn eig_diagonal_sorted_descending() {
        let e = eig_hermitian(&HermitianMatrix::diagonal(&[2.0, 5.0])).unwrap();
        assert_eq!(e.values, vec![5.0, 2.0]);
    }

    #[test]
    fn eig_two_by_two() {
        let a = HermitianMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let e = eig_hermitian(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_zero_matrix() {
        let e = eig_hermitian(&HermitianMatrix::new(GeneralMatrix::zeros(3))).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
    }

    #[test]
    fn eig_random_complex_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=MAX_DIM {
            for _ in 0..20 {
                let a = HermitianMatrix::new(GeneralMatrix::from_fn(n, |_, _| {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }));
                let e = eig_hermitian(&a).unwrap();
                assert!(unitary_defect(&e.vectors) <= 1e-10);
                let resid = (e.reconstruct().as_general() - a.as_general()).frobenius_norm();
                assert!(
                    resid <= 1e-10 * (1.0 + a.frobenius_norm()),
                    "n={n} resid={resid}"
                );
                assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = matrix_function(&HermitianMatrix::identity(3), MatrixFunction::Log).unwrap();
        assert!(l.frobenius_norm() < 1e-15);
    }

    #[test]
    fn square_root_of_diagonal() {
        let r = matrix_function(
            &HermitianMatrix::diagonal(&[1.0, 4.0]),
            MatrixFunction::Power(0.5),
        )
        .unwrap();
        assert_eq!(r.as_general(), &GeneralMatrix::diagonal(&[1.0, 2.0]));
    }

    #[test]
    fn log_exp_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_pd(&mut rng, 4, 2.0);
            let l = matrix_function(&a, MatrixFunction::Log).unwrap();
            let back = matrix_function(&l, MatrixFunction::Exp).unwrap();
            assert!(
                (back.as_general() - a.as_general()).frobenius_norm()
                    <= 1e-10 * (1.0 + a.frobenius_norm())
            );
        }
    }

    #[test]
    fn log_of_indefinite_matrix_reports_eigenvalue() {
        let a = HermitianMatrix::diagonal(&[1.0, -0.5]);
        match matrix_function(&a, MatrixFunction::Log) {
            Err(MwlError::Domain { eigenvalue, .. }) => assert_eq!(eigenvalue, -0.5),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(matrix_function(&a, MatrixFunction::Power(-1.0)).is_err());
        assert!(matrix_function(&a, MatrixFunction::Power(2.0)).is_ok());
    }

    #[test]
    fn absolute_value_of_unitary_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 3);
        let a = absolute_value(&u).unwrap();
        assert!((a.as_general() - &GeneralMatrix::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn absolute_value_of_signed_diagonal() {
        let a = absolute_value(&GeneralMatrix::diagonal(&[-3.0, 2.0])).unwrap();
        assert!((a.as_general() - &GeneralMatrix::diagonal(&[3.0, 2.0])).frobenius_norm() < 1e-14);
    }

    #[test]
    fn absolute_value_matches_svd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=5 {
            for _ in 0..20 {
                let a = random_invertible(&mut rng, n, 2.0);
                let abs = absolute_value(&a).unwrap();
                let eig = eig_hermitian(&abs).unwrap();
                let sv = svd_oracle(&a);
                for (x, y) in eig.values.iter().zip(&sv) {
                    assert!((x - y).abs() <= 1e-9 * (1.0 + y), "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn absolute_value_rejects_singular() {
        let a = GeneralMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(matches!(absolute_value(&a), Err(MwlError::Singular { .. })));
    }

    #[test]
    fn polar_of_equal_weights_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let w = random_pd(&mut rng, 3, 1.0);
        let pd = polar_diagonalize(&w, &w).unwrap();
        for d in pd.diagonal {
            assert!((d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polar_of_diagonal_pair() {
        let pd = polar_diagonalize(
            &HermitianMatrix::identity(2),
            &HermitianMatrix::diagonal(&[2.0, 3.0]),
        )
        .unwrap();
        assert!((pd.diagonal[0] - 3.0).abs() < 1e-14);
        assert!((pd.diagonal[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polar_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let w0 = random_pd(&mut rng, 3, 1.5);
            let w1 = random_pd(&mut rng, 3, 1.5);
            let pd = polar_diagonalize(&w0, &w1).unwrap();
            let target = absolute_value(&(w1.as_general() * &w0.inverse().unwrap())).unwrap();
            let resid = (&pd.reconstruct() - target.as_general()).frobenius_norm();
            assert!(resid <= 1e-9 * (1.0 + target.frobenius_norm()));
            assert!(unitary_defect(&pd.unitary) <= 1e-10);
        }
    }

    #[test]
    fn bracket_examples() {
        let a = GeneralMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let b = GeneralMatrix::diagonal(&[1.0, -1.0]);
        let expected = GeneralMatrix::from_real_rows(&[&[0.0, -2.0], &[2.0, 0.0]]).unwrap();
        assert_eq!(bracket(&a, &b).unwrap(), expected);
        assert!(bracket(&a, &a).unwrap().frobenius_norm() == 0.0);
        let d = bracket(
            &GeneralMatrix::diagonal(&[1.0, 2.0]),
            &GeneralMatrix::diagonal(&[3.0, 4.0]),
        )
        .unwrap();
        assert!(d.frobenius_norm() == 0.0);
        assert!(matches!(
            bracket(&a, &GeneralMatrix::identity(3)),
            Err(MwlError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bracket_of_hermitians_is_skew() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = random_pd(&mut rng, 4, 1.0);
        let b = random_pd(&mut rng, 4, 1.0);
        let c = bracket(&a, &b).unwrap();
        assert!((&c + &c.adjoint()).frobenius_norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn power_one_is_identity_map(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = HermitianMatrix::new(GeneralMatrix::from_fn(n, |_, _| {
                C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            }));
            let p = matrix_function(&a, MatrixFunction::Power(1.0)).unwrap();
            prop_assert!((p.as_general() - a.as_general()).frobenius_norm() <= 1e-12 * (1.0 + a.frobenius_norm()));
        }

        #[test]
        fn fractional_power_eigenvalues(seed in any::<u64>(), n in 1usize..=4, theta in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_pd(&mut rng, n, 2.0);
            let base = eig_hermitian(&a).unwrap();
            let pw = eig_hermitian(&matrix_function(&a, MatrixFunction::Power(theta)).unwrap()).unwrap();
            for (x, y) in base.values.iter().zip(&pw.values) {
                prop_assert!((x.powf(theta) - y).abs() <= 1e-10 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn absolute_value_is_pd_with_same_op_norm(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_invertible(&mut rng, n, 2.0);
            let abs = absolute_value(&a).unwrap();
            let e = eig_hermitian(&abs).unwrap();
            prop_assert!(e.min_value() > 0.0);
            prop_assert!((abs.op_norm() - a.op_norm()).abs() <= 1e-9 * (1.0 + a.op_norm()));
        }

        #[test]
        fn commuting_interpolation_identity(seed in any::<u64>(), n in 1usize..=4, theta in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unitary(&mut rng, n);
            let d0: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
            let d1: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
            let conj = |d: &[f64]| HermitianMatrix::new(&(&u * &GeneralMatrix::diagonal(d)) * &u.adjoint());
            let (w0, w1) = (conj(&d0), conj(&d1));
            let pd = polar_diagonalize(&w0, &w1).unwrap();
            let lhs = &pd.power(theta) * w0.as_general();
            let rhs = matrix_function(&w0, MatrixFunction::Power(1.0 - theta)).unwrap().as_general()
                * matrix_function(&w1, MatrixFunction::Power(theta)).unwrap().as_general();
            prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-9);
        }

        #[test]
        fn heinz_log_convexity(seed in any::<u64>(), n in 1usize..=4, k in 0usize..3) {
            let theta = [0.25, 0.5, 0.75][k];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w0 = random_pd(&mut rng, n, 2.0);
            let w1 = random_pd(&mut rng, n, 2.0);
            let x: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let pd = polar_diagonalize(&w0, &w1).unwrap();
            let wt = &pd.power(theta) * w0.as_general();
            let norm = |v: Vec<C64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let lhs = norm(wt.mul_vec(&x));
            let rhs = norm(w0.mul_vec(&x)).powf(1.0 - theta) * norm(w1.mul_vec(&x)).powf(theta);
            prop_assert!(lhs <= rhs * (1.0 + 1e-9));
        }
    }
}
