use mwl_core::complex_interp::{omega_complex, InterpParams};
use mwl_core::fields::{
    gen_rotating_weight, Convention, GridDomain, MatrixWeightField, ScalarProfile, VectorField,
};
use mwl_core::real_interp::{
    functional_sweep, k_functional, lifted_matrix_derivation, omega_real, phi_norm,
    real_interp_norm, CoupleSpec, DerivationPath, LogGrid, RealMethod,
};
use rand::Rng;

use super::{guarded, rel, rng, smooth_function, smooth_scalar};
use crate::config::RunConfig;
use crate::report::{CheckRecord, Quantity};

pub fn run(cfg: &RunConfig) -> Vec<CheckRecord> {
    vec![
        k_concavity(cfg),
        k_envelope(cfg),
        phi_closed_form(),
        equivalence_band(cfg),
        closed_form_derivation(cfg),
        lifted_derivation(cfg),
        k_matches_complex(cfg),
    ]
}

fn domain(cfg: &RunConfig) -> anyhow::Result<GridDomain> {
    Ok(GridDomain::unit(cfg.sizes.real_points)?)
}

fn rotating_pair(d: GridDomain) -> anyhow::Result<(MatrixWeightField, MatrixWeightField)> {
    let w0 = gen_rotating_weight(
        1,
        d,
        &ScalarProfile::Linear {
            offset: 0.2,
            slope: 3.0,
        },
        &ScalarProfile::ExpSine {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.1,
        },
        &ScalarProfile::Constant { value: 0.7 },
    )?;
    let w1 = gen_rotating_weight(
        2,
        d,
        &ScalarProfile::Linear {
            offset: -0.4,
            slope: 1.0,
        },
        &ScalarProfile::Constant { value: 2.0 },
        &ScalarProfile::ExpSine {
            amplitude: 0.8,
            frequency: 2.0,
            phase: 0.3,
        },
    )?;
    Ok((w0, w1))
}

fn k_concavity(cfg: &RunConfig) -> CheckRecord {
    let rec = CheckRecord::new(
        Some(8),
        "k_concavity",
        "real_interp.functional_sweep",
        &format!("N={} seed={}", cfg.sizes.real_points, cfg.seed),
        6,
    );
    guarded(rec, |r| {
        let d = domain(cfg)?;
        let mut rng = rng(cfg, "concavity");
        let grid = LogGrid::default();
        let ts = grid.values();
        let (mut worst, mut monotone): (f64, f64) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (p0, p1) in [(1.5, 3.0), (2.0, 2.0), (2.5, 2.5)] {
            let scalar = CoupleSpec::scalar(
                p0,
                p1,
                &smooth_scalar(&mut rng, d, 1.5),
                &smooth_scalar(&mut rng, d, 1.5),
            )?;
            let (w0, w1) = rotating_pair(d)?;
            let matrix = CoupleSpec::matrix(p0, p1, &w0, &w1, Convention::Plain)?;
            for c in [scalar, matrix] {
                let f = smooth_function(&mut rng, d, c.dim());
                let k = functional_sweep(&f, &c, &grid, RealMethod::K)?;
                let scale = k.iter().cloned().fold(0.0, f64::max);
                for i in 1..k.len() - 1 {
                    let lam = (ts[i + 1] - ts[i]) / (ts[i + 1] - ts[i - 1]);
                    let chord = lam * k[i - 1] + (1.0 - lam) * k[i + 1];
                    worst = worst.max((chord - k[i]) / scale);
                    monotone = monotone.max((k[i - 1] - k[i]) / scale);
                }
            }
        }
        r.push(Quantity::at_most(
            "max_scaled_concavity_defect",
            worst,
            1e-6,
        ));
        r.push(Quantity::at_most("max_scaled_decrease", monotone, 1e-6));
        Ok(())
    })
}

fn k_envelope(cfg: &RunConfig) -> CheckRecord {
    let count = cfg.sizes.real_samples;
    let rec = CheckRecord::new(
        Some(8),
        "k_surrogate_envelope",
        "real_interp.k_functional",
        &format!(
            "samples={count} N={} seed={}",
            cfg.sizes.real_points, cfg.seed
        ),
        count,
    );
    guarded(rec, |r| {
        let d = domain(cfg)?;
        let h = d.h();
        let mut rng = rng(cfg, "envelope");
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..count {
            let p = [1.0, 1.5, 2.0, 3.0][i % 4];
            let (w0, w1) = (
                smooth_scalar(&mut rng, d, 2.0),
                smooth_scalar(&mut rng, d, 2.0),
            );
            let c = CoupleSpec::scalar(p, p, &w0, &w1)?;
            let f = smooth_function(&mut rng, d, 1);
            let t = 10f64.powf(rng.gen_range(-3.0..3.0));
            let k = k_functional(t, &f, &c)?.0;
            let s: f64 = (0..f.len())
                .map(|j| (w0.values()[j].min(t * w1.values()[j]) * f.point(j)[0].norm()).powf(p))
                .sum::<f64>()
                * h;
            let ratio = k / s.powf(1.0 / p);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        r.push(Quantity::at_least("min_ratio_to_surrogate", lo, 1.0 - 1e-9));
        r.push(Quantity::at_most("max_ratio_to_surrogate", hi, 2.0));
        Ok(())
    })
}

fn phi_closed_form() -> CheckRecord {
    let rec = CheckRecord::new(
        Some(9),
        "phi_closed_form",
        "real_interp.phi_norm",
        "min(1,t) default grid",
        9,
    );
    guarded(rec, |r| {
        let grid = LogGrid::default();
        let g: Vec<f64> = grid.values().iter().map(|t| t.min(1.0)).collect();
        let mut worst: f64 = 0.0;
        for theta in [0.3f64, 0.5, 0.7] {
            for q in [1.0f64, 2.0, 4.0] {
                let want = (1.0 / ((1.0 - theta) * q) + 1.0 / (theta * q)).powf(1.0 / q);
                worst = worst.max((phi_norm(theta, q, &g, &grid)? - want).abs() / want);
            }
        }
        r.push(Quantity::at_most("max_relative_error", worst, 1e-6));
        Ok(())
    })
}

fn equivalence_band(cfg: &RunConfig) -> CheckRecord {
    let count = cfg.sizes.real_samples;
    let ps = [1.5, 2.0, 3.0];
    let rec = CheckRecord::new(
        Some(10),
        "real_method_equivalence",
        "real_interp.real_interp_norm",
        &format!(
            "p={ps:?} theta=0.5 samples={count} N={} seed={}",
            cfg.sizes.real_points, cfg.seed
        ),
        count * ps.len(),
    );
    guarded(rec, |r| {
        let d = domain(cfg)?;
        let h = d.h();
        let theta = 0.5;
        let grid = LogGrid::default();
        let mut rng = rng(cfg, "equivalence");
        let (w0, w1) = (
            smooth_scalar(&mut rng, d, 1.5),
            smooth_scalar(&mut rng, d, 1.5),
        );
        let mut worst: f64 = 1.0;
        for p in ps {
            let c = CoupleSpec::scalar(p, p, &w0, &w1)?;
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for _ in 0..count {
                let f = smooth_function(&mut rng, d, 1);
                let norm = real_interp_norm(&f, &c, theta, p, RealMethod::K, &grid)?;
                let direct: f64 = (0..f.len())
                    .map(|j| {
                        (w0.values()[j].powf(1.0 - theta)
                            * w1.values()[j].powf(theta)
                            * f.point(j)[0].norm())
                        .powf(p)
                    })
                    .sum::<f64>()
                    * h;
                let ratio = norm / direct.powf(1.0 / p);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            r.push(Quantity::info(&format!("min_ratio_p{p}"), lo));
            r.push(Quantity::info(&format!("max_ratio_p{p}"), hi));
            worst = worst.max(hi / lo);
        }
        r.push(Quantity::at_most("max_band_ratio", worst, 4.0));
        Ok(())
    })
}

fn closed_form_derivation(cfg: &RunConfig) -> CheckRecord {
    let rec = CheckRecord::new(
        Some(11),
        "closed_form_vs_quadrature",
        "real_interp.omega_real",
        &format!(
            "(p0,p1,alpha)=(1.5,3,2),(2,2,1) N={} seed={}",
            cfg.sizes.real_points, cfg.seed
        ),
        60,
    );
    guarded(rec, |r| {
        let d = domain(cfg)?;
        let grid = LogGrid::default();
        let mut rng = rng(cfg, "closed-form");
        for (p0, p1, alpha) in [(1.5, 3.0, 2.0), (2.0, 2.0, 1.0)] {
            let method = RealMethod::E { alpha };
            let mut worst = [0.0f64; 3];
            for _ in 0..10 {
                let c = CoupleSpec::scalar(
                    p0,
                    p1,
                    &smooth_scalar(&mut rng, d, 1.0),
                    &smooth_scalar(&mut rng, d, 1.0),
                )?;
                let f = smooth_function(&mut rng, d, 1);
                for n in 1..=3 {
                    let closed = omega_real(&f, &c, method, n, &grid, DerivationPath::ClosedForm)?;
                    let quad = omega_real(&f, &c, method, n, &grid, DerivationPath::Quadrature)?;
                    worst[n - 1] = worst[n - 1].max(rel(&closed, &quad));
                }
            }
            for (n, w) in worst.iter().enumerate() {
                r.push(Quantity::at_most(
                    &format!("max_relative_error_alpha{alpha}_order{}", n + 1),
                    *w,
                    0.05,
                ));
            }
        }
        Ok(())
    })
}

fn lifted_derivation(cfg: &RunConfig) -> CheckRecord {
    let rec = CheckRecord::new(
        Some(11),
        "lifted_vs_direct",
        "real_interp.lifted_matrix_derivation, real_interp.omega_real",
        &format!(
            "rotating pair N={} seed={}",
            cfg.sizes.real_points, cfg.seed
        ),
        10,
    );
    guarded(rec, |r| {
        let d = domain(cfg)?;
        let grid = LogGrid::default();
        let (w0, w1) = rotating_pair(d)?;
        let mut rng = rng(cfg, "lifted");
        let mut worst: f64 = 0.0;
        for (p0, p1) in [(2.0, 2.0), (1.5, 3.0)] {
            let params = InterpParams::new(p0, p1, 0.5)?;
            let c = CoupleSpec::matrix(p0, p1, &w0, &w1, Convention::Plain)?;
            for _ in 0..5 {
                let f = smooth_function(&mut rng, d, 2);
                let lifted = lifted_matrix_derivation(
                    &f,
                    &w0,
                    &w1,
                    params,
                    Convention::Plain,
                    RealMethod::K,
                    1,
                    &grid,
                )?;
                let direct =
                    omega_real(&f, &c, RealMethod::K, 1, &grid, DerivationPath::Quadrature)?;
                worst = worst.max(rel(&lifted, &direct));
            }
        }
        r.push(Quantity::at_most("max_relative_error", worst, 0.10));
        Ok(())
    })
}

/// Least-squares constant `c` with `a ~ c b`.
fn ratio(a: &VectorField, b: &VectorField) -> f64 {
    a.inner(b).re / b.inner(b).re
}

fn k_matches_complex(cfg: &RunConfig) -> CheckRecord {
    let count = 20;
    let rec = CheckRecord::new(
        None,
        "k_derivation_proportional_to_complex",
        "real_interp.omega_real, interp_complex.omega_complex",
        &format!(
            "p=2 samples={count} N={} seed={}",
            cfg.sizes.real_points, cfg.seed
        ),
        count,
    );
    guarded(rec, |r| {
        let d = domain(cfg)?;
        let grid = LogGrid::default();
        let mut rng = rng(cfg, "k-vs-complex");
        let (s0, s1) = (
            smooth_scalar(&mut rng, d, 1.0),
            smooth_scalar(&mut rng, d, 1.0),
        );
        let c = CoupleSpec::scalar(2.0, 2.0, &s0, &s1)?;
        let (w0, w1) = (
            MatrixWeightField::scalar(&s0)?,
            MatrixWeightField::scalar(&s1)?,
        );
        let params = InterpParams::new(2.0, 2.0, 0.5)?;
        let ratios = (0..count)
            .map(|_| {
                let f = smooth_function(&mut rng, d, 1);
                let k = omega_real(&f, &c, RealMethod::K, 1, &grid, DerivationPath::Quadrature)?;
                let z = omega_complex(&f, &w0, &w1, params, Convention::Plain, 1)?;
                Ok(ratio(&k, &z))
            })
            .collect::<anyhow::Result<Vec<f64>>>()?;
        let mean = ratios.iter().sum::<f64>() / count as f64;
        let var = ratios.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count as f64;
        r.push(Quantity::info("mean_ratio", mean));
        r.push(Quantity::at_most(
            "coefficient_of_variation",
            var.sqrt() / mean.abs(),
            0.1,
        ));
        Ok(())
    })
}
