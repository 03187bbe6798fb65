use anyhow::Result;
use mwl_core::linalg::{
    matrix_function, polar_diagonalize, random_pd, GeneralMatrix, MatrixFunction, C64,
};
use rand::Rng;

use super::{guarded, rng};
use crate::config::RunConfig;
use crate::report::{CheckRecord, Quantity};

pub fn run(cfg: &RunConfig) -> Vec<CheckRecord> {
    vec![spectral_reconstruction(cfg), pointwise_log_convexity(cfg)]
}

/// `sqrt` of a positive definite matrix by the Denman-Beavers iteration.
fn db_sqrt(a: &GeneralMatrix) -> Result<GeneralMatrix> {
    let n = a.dim();
    let (mut y, mut z) = (a.clone(), GeneralMatrix::identity(n));
    for _ in 0..100 {
        let (yi, zi) = (y.inverse()?, z.inverse()?);
        let ny = (&y + &zi).scale_real(0.5);
        let nz = (&z + &yi).scale_real(0.5);
        let change = (&ny - &y).frobenius_norm() / ny.frobenius_norm();
        y = ny;
        z = nz;
        if change < 1e-15 {
            break;
        }
    }
    Ok(y)
}

fn spectral_reconstruction(cfg: &RunConfig) -> CheckRecord {
    let count = cfg.sizes.spectral_pairs;
    let rec = CheckRecord::new(
        Some(1),
        "spectral_reconstruction",
        "linalg.polar_diagonalize, linalg.matrix_function",
        &format!("pairs={count} seed={}", cfg.seed),
        count,
    );
    guarded(rec, |r| {
        let mut rng = rng(cfg, "spectral");
        let (mut polar_err, mut exp_log_err): (f64, f64) = (0.0, 0.0);
        for i in 0..count {
            let n = 1 + i % 4;
            let (w0, w1) = (random_pd(&mut rng, n, 2.0), random_pd(&mut rng, n, 2.0));
            let pd = polar_diagonalize(&w0, &w1)?;
            let a = w1.as_general() * &w0.inverse()?;
            let reference = db_sqrt(&(&a.adjoint() * &a))?;
            let err = (&pd.reconstruct() - &reference).frobenius_norm()
                / (1.0 + reference.frobenius_norm());
            polar_err = polar_err.max(err);
            let back = matrix_function(
                &matrix_function(&w0, MatrixFunction::Log)?,
                MatrixFunction::Exp,
            )?;
            let e = (back.as_general() - w0.as_general()).frobenius_norm()
                / (1.0 + w0.as_general().frobenius_norm());
            exp_log_err = exp_log_err.max(e);
        }
        r.push(Quantity::at_most("max_rel_polar_error", polar_err, 1e-9));
        r.push(Quantity::at_most(
            "max_rel_exp_log_error",
            exp_log_err,
            1e-10,
        ));
        Ok(())
    })
}

fn pointwise_log_convexity(cfg: &RunConfig) -> CheckRecord {
    let count = cfg.sizes.convexity_triples;
    let rec = CheckRecord::new(
        Some(4),
        "pointwise_log_convexity",
        "linalg.polar_diagonalize",
        &format!("triples={count} seed={}", cfg.seed),
        count,
    );
    guarded(rec, |r| {
        let mut rng = rng(cfg, "convexity");
        let mut worst = f64::NEG_INFINITY;
        for i in 0..count {
            let n = 1 + i % 4;
            let (w0, w1) = (random_pd(&mut rng, n, 2.0), random_pd(&mut rng, n, 2.0));
            let theta: f64 = rng.gen_range(0.0..1.0);
            let x: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let pd = polar_diagonalize(&w0, &w1)?;
            let w0x = w0.as_general().mul_vec(&x);
            let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let lhs = norm(&pd.power(theta).mul_vec(&w0x));
            let rhs = norm(&w0x).powf(1.0 - theta) * norm(&w1.as_general().mul_vec(&x)).powf(theta);
            worst = worst.max(lhs / rhs - 1.0);
        }
        r.push(Quantity::at_most("max_relative_excess", worst, 1e-9));
        Ok(())
    })
}
