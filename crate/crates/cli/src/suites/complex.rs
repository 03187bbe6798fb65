use std::f64::consts::PI;

use mwl_core::complex_interp::{
    extremal_section, interp_weight_plain, interp_weight_tilde, omega_complex, theta_norm,
    InterpParams, StripPoint,
};
use mwl_core::fields::{
    gen_commuting_pair, gen_rotating_weight, Convention, GridDomain, MatrixField,
    MatrixWeightField, ScalarProfile, SpectralProfile, VectorField,
};
use mwl_core::linalg::{random_invertible, C64};
use mwl_core::operators::{
    hilbert_operator, martingale_operator, matrix_multiplication_operator,
    operator_norm_weighted_with, Certificate, MartingaleSigns, NormMethod, NormOptions,
    OperatorHandle,
};
use rand::Rng;

use super::{guarded, random_weight, rel, rng};
use crate::config::{derive_seed, RunConfig};
use crate::report::{CheckRecord, Quantity};

pub fn run(cfg: &RunConfig) -> Vec<CheckRecord> {
    vec![
        commutative_identity(cfg),
        exactness_inequality(cfg),
        section_derivative(cfg),
    ]
}

fn commutative_identity(cfg: &RunConfig) -> CheckRecord {
    let count = cfg.sizes.commuting_pairs;
    let thetas = [0.25, 0.5, 0.75];
    let rec = CheckRecord::new(
        Some(2),
        "commutative_case_identity",
        "interp_complex.interp_weight_plain",
        &format!("pairs={count} thetas={thetas:?} seed={}", cfg.seed),
        count * thetas.len(),
    );
    guarded(rec, |r| {
        let d = GridDomain::unit(16)?;
        let mut worst: f64 = 0.0;
        for i in 0..count {
            let n = 1 + i % 4;
            let profile = SpectralProfile::Rough { log_spread: 2.0 };
            let (w0, w1) = gen_commuting_pair(
                derive_seed(cfg.seed, &format!("commuting{i}")),
                n,
                d,
                profile,
            )?;
            for &theta in &thetas {
                let (general, _) =
                    interp_weight_plain(&w0, &w1, InterpParams::new(2.0, 2.0, theta)?)?;
                let want = w0.power_field(1.0 - theta).mul(&w1.power_field(theta))?;
                for (a, b) in general.values().iter().zip(want.values()) {
                    worst = worst.max((a - b).frobenius_norm());
                }
            }
        }
        r.push(Quantity::at_most(
            "max_pointwise_frobenius_error",
            worst,
            1e-9,
        ));
        Ok(())
    })
}

fn exactness_inequality(cfg: &RunConfig) -> CheckRecord {
    let count = cfg.sizes.exactness_tuples;
    let points = cfg.sizes.exactness_points;
    let rec = CheckRecord::new(
        Some(3),
        "exactness_inequality",
        "interp_complex.interp_weight_tilde, operators.operator_norm_weighted",
        &format!("tuples={count} N={points} seed={}", cfg.seed),
        count,
    );
    guarded(rec, |r| {
        let d = GridDomain::unit(points)?;
        let mut rng = rng(cfg, "exactness");
        let mut ops: Vec<OperatorHandle> = vec![hilbert_operator(points)?];
        for k in 0..20 {
            ops.push(martingale_operator(
                format!("M{k}"),
                MartingaleSigns::random(&mut rng, points)?,
            ));
        }
        let opts = NormOptions {
            seed: derive_seed(cfg.seed, "exactness-norm"),
            ..NormOptions::default()
        };
        let mut worst = f64::NEG_INFINITY;
        let mut inexact = 0usize;
        for i in 0..count {
            let n = 1 + i % 3;
            let slot = i % 41;
            let t = if slot < 21 {
                ops[slot].clone()
            } else {
                let vals = (0..points)
                    .map(|_| random_invertible(&mut rng, n, 1.0))
                    .collect();
                matrix_multiplication_operator(&MatrixField::new(d, vals)?)
                    .with_label(format!("B{}", slot - 21))
            };
            let (w0, w1) = (
                random_weight(&mut rng, d, n, 1.0),
                random_weight(&mut rng, d, n, 1.0),
            );
            let theta = rng.gen_range(0.05..0.95);
            let wt = interp_weight_tilde(&w0, &w1, InterpParams::new(2.0, 2.0, theta)?)?;
            let mut norm = |w: &MatrixWeightField| -> anyhow::Result<f64> {
                let e = operator_norm_weighted_with(
                    &t,
                    w,
                    w,
                    2.0,
                    Convention::Tilde,
                    NormMethod::Exact2,
                    &opts,
                )?;
                if e.certificate != Certificate::Exact {
                    inexact += 1;
                }
                Ok(e.estimate)
            };
            let (a, b, c) = (norm(&w0)?, norm(&w1)?, norm(&wt)?);
            worst = worst.max(c / a.max(b) - 1.0);
        }
        r.push(Quantity::at_most("max_relative_excess", worst, 1e-8));
        r.push(Quantity::info(
            "norms_without_exact_certificate",
            inexact as f64,
        ));
        Ok(())
    })
}

fn section_derivative(cfg: &RunConfig) -> CheckRecord {
    let rec = CheckRecord::new(
        Some(11),
        "section_finite_difference",
        "interp_complex.extremal_section, interp_complex.omega_complex",
        &format!("N=64 h=1e-5 seed={}", cfg.seed),
        18,
    );
    guarded(rec, |r| {
        let d = GridDomain::unit(64)?;
        let w0 = gen_rotating_weight(
            1,
            d,
            &ScalarProfile::Linear {
                offset: 0.2,
                slope: 2.0 * PI,
            },
            &ScalarProfile::ExpSine {
                amplitude: 0.8,
                frequency: 1.0,
                phase: 0.1,
            },
            &ScalarProfile::Constant { value: 1.5 },
        )?;
        let w1 = gen_rotating_weight(
            2,
            d,
            &ScalarProfile::Linear {
                offset: -0.4,
                slope: PI,
            },
            &ScalarProfile::Constant { value: 0.7 },
            &ScalarProfile::ExpSine {
                amplitude: 1.0,
                frequency: 2.0,
                phase: 0.3,
            },
        )?;
        let f = VectorField::from_fn(d, 2, |_, x| {
            vec![
                C64::new((2.0 * PI * x).cos() + 1.5, 0.3 * (2.0 * PI * x).sin()),
                C64::new(0.5 * (4.0 * PI * x).sin(), 1.0 + 0.2 * x),
            ]
        })?;
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for (p0, p1) in [(2.0, 2.0), (1.5, 3.0), (4.0, 2.0)] {
            for conv in [Convention::Plain, Convention::Tilde] {
                for theta in [0.3, 0.5, 0.8] {
                    let params = InterpParams::new(p0, p1, theta)?;
                    let norm = theta_norm(&f, &w0, &w1, params, conv)?;
                    let at = |z: f64| {
                        extremal_section(&f, &w0, &w1, params, conv, StripPoint::real(z)?, norm)
                    };
                    let fd = at(theta + h)?.sub(&at(theta - h)?).scale_real(0.5 / h);
                    let om = omega_complex(&f, &w0, &w1, params, conv, 1)?;
                    worst = worst.max(rel(&fd, &om));
                }
            }
        }
        r.push(Quantity::at_most("max_relative_error", worst, 1e-4));
        Ok(())
    })
}
