use std::f64::consts::PI;

use anyhow::Result;
use mwl_core::fields::{
    Convention, GridDomain, MatrixField, MatrixWeightField, ScalarField, VectorField,
};
use mwl_core::linalg::C64;
use mwl_core::operators::{
    hilbert_operator, hilbert_transform, iterated_commutator, matrix_multiplication_operator,
    operator_norm_weighted_with, NormMethod, NormOptions, OperatorHandle,
};

use super::{guarded, rng};
use crate::config::{derive_seed, rotating_recipe, RunConfig, WeightRecipe};
use crate::report::{CheckRecord, Quantity};

pub fn run(cfg: &RunConfig) -> Vec<CheckRecord> {
    vec![hilbert_model(cfg), commutator_uniformity(cfg)]
}

pub fn run_divergence(cfg: &RunConfig) -> Vec<CheckRecord> {
    vec![product_commutator_growth(cfg)]
}

/// Unweighted `L^2` operator norm.
pub(crate) fn l2_norm(t: &OperatorHandle, d: GridDomain, n: usize, seed: u64) -> Result<f64> {
    let id = MatrixWeightField::identity(d, n);
    let opts = NormOptions {
        seed,
        ..NormOptions::default()
    };
    Ok(operator_norm_weighted_with(
        t,
        &id,
        &id,
        2.0,
        Convention::Plain,
        NormMethod::Exact2,
        &opts,
    )?
    .estimate)
}

fn hilbert_model(cfg: &RunConfig) -> CheckRecord {
    let points = 1024;
    let rec = CheckRecord::new(
        Some(5),
        "hilbert_model",
        "operators.hilbert_transform",
        &format!("N={points} seed={}", cfg.seed),
        100,
    );
    guarded(rec, |r| {
        let d = GridDomain::unit(points)?;
        let cos = VectorField::from_fn(d, 1, |_, x| vec![C64::new((2.0 * PI * x).cos(), 0.0)])?;
        let sin = VectorField::from_fn(d, 1, |_, x| vec![C64::new((2.0 * PI * x).sin(), 0.0)])?;
        r.push(Quantity::at_most(
            "cos_to_sin_max_error",
            hilbert_transform(&cos).max_abs_diff(&sin),
            1e-12,
        ));
        let norm = l2_norm(
            &hilbert_operator(points)?,
            d,
            1,
            derive_seed(cfg.seed, "hilbert-norm"),
        )?;
        r.push(Quantity::at_most(
            "norm_minus_one",
            (norm - 1.0).abs(),
            1e-9,
        ));
        let mut rng = rng(cfg, "hilbert-square");
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let f = VectorField::random(&mut rng, d, 2);
            let hh = hilbert_transform(&hilbert_transform(&f));
            let mean = f.mean();
            let mut want = f.clone();
            for i in 0..want.len() {
                for (v, m) in want.point_mut(i).iter_mut().zip(&mean) {
                    *v = -(*v - m);
                }
            }
            worst = worst.max(
                hh.max_abs_diff(&want) / f.data().iter().map(|z| z.norm()).fold(0.0, f64::max),
            );
        }
        r.push(Quantity::at_most("square_identity_max_error", worst, 1e-12));
        Ok(())
    })
}

fn test_weights(cfg: &RunConfig, d: GridDomain) -> Result<Vec<(String, MatrixWeightField)>> {
    let sqrt_sine = WeightRecipe::Scalar {
        profile: mwl_core::fields::ScalarProfile::SinePower { exponent: 0.5 },
    };
    let mut out = sqrt_sine.build("sqrt_sine", cfg.seed, d)?;
    out.extend(rotating_recipe().build("rotating", cfg.seed, d)?);
    Ok(out)
}

fn commutator_uniformity(cfg: &RunConfig) -> CheckRecord {
    let sizes = &cfg.sizes.commutator_points;
    let rec = CheckRecord::new(
        Some(6),
        "log_weight_commutator_uniform",
        "operators.iterated_commutator, operators.operator_norm_weighted",
        &format!("N={sizes:?} seed={}", cfg.seed),
        2 * sizes.len(),
    );
    guarded(rec, |r| {
        let mut worst: f64 = 1.0;
        let mut names = Vec::new();
        let mut series: Vec<Vec<f64>> = Vec::new();
        for &points in sizes {
            let d = GridDomain::unit(points)?;
            for (k, (name, w)) in test_weights(cfg, d)?.into_iter().enumerate() {
                let c = iterated_commutator(&w.log(), &hilbert_operator(points)?, 1)?;
                let v = l2_norm(
                    &c,
                    d,
                    w.dim(),
                    derive_seed(cfg.seed, &format!("{name}{points}")),
                )?;
                if series.len() <= k {
                    series.push(Vec::new());
                    names.push(name);
                }
                series[k].push(v);
            }
        }
        for (name, s) in names.iter().zip(&series) {
            for (points, v) in sizes.iter().zip(s) {
                r.push(Quantity::info(&format!("{name}_N{points}"), *v));
            }
            let (lo, hi) = s
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
            worst = worst.max(hi / lo);
        }
        r.push(Quantity::at_most("max_over_min", worst, 2.0));
        Ok(())
    })
}

fn product_commutator_growth(cfg: &RunConfig) -> CheckRecord {
    let sizes = &cfg.sizes.commutator_points;
    let rec = CheckRecord::new(
        Some(6),
        "product_commutator_divergence",
        "operators.hilbert_operator, operators.operator_norm_weighted",
        &format!("N={sizes:?} seed={}", cfg.seed),
        sizes.len(),
    );
    guarded(rec, |r| {
        let mut values = Vec::new();
        for &points in sizes {
            let d = GridDomain::unit(points)?;
            let scalar = |f: &dyn Fn(f64) -> f64| -> Result<MatrixField> {
                Ok(MatrixField::scalar(&ScalarField::from_fn(d, f)?))
            };
            let b1 = matrix_multiplication_operator(&scalar(&|x| if x < 0.5 { 1.0 } else { 0.0 })?);
            let b2 =
                matrix_multiplication_operator(&scalar(&|x| (2.0 * (PI * x).sin()).abs().ln())?);
            let h = hilbert_operator(points)?;
            let t = b1
                .compose(&h.compose(&b2))
                .combine(C64::new(-1.0, 0.0), &b2.compose(&h.compose(&b1)));
            let v = l2_norm(&t, d, 1, derive_seed(cfg.seed, &format!("product{points}")))?;
            r.push(Quantity::info(&format!("norm_N{points}"), v));
            values.push(v);
        }
        let step = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        // strictly positive
        r.push(Quantity::at_least("min_increment", step, f64::MIN_POSITIVE));
        Ok(())
    })
}
