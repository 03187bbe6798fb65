use anyhow::Result;
use mwl_core::fields::{GridDomain, MatrixWeightField, ScalarProfile};
use mwl_core::operators::{charact_derivatives, hilbert_operator, iterated_commutator};

use super::commutator::l2_norm;
use super::{guarded, rel, rng, smooth_function};
use crate::config::{derive_seed, rotating_recipe, RunConfig, WeightRecipe};
use crate::report::{CheckRecord, Quantity};

const ORDERS: usize = 6;

pub fn run(cfg: &RunConfig) -> Vec<CheckRecord> {
    let mut out: Vec<CheckRecord> = a2_weights()
        .into_iter()
        .map(|(name, recipe)| growth(cfg, &name, &recipe))
        .collect();
    out.push(identity_vanishes(cfg));
    out
}

fn a2_weights() -> Vec<(String, WeightRecipe)> {
    let power = |e: f64| WeightRecipe::Scalar {
        profile: ScalarProfile::SinePower { exponent: e },
    };
    vec![
        ("sqrt_sine".into(), power(0.5)),
        ("inverse_cube_root_sine".into(), power(-1.0 / 3.0)),
        ("rotating".into(), rotating_recipe()),
    ]
}

/// Least-squares line through `(k, y_k)`; returns the slope and the largest absolute residual.
fn log_linear_fit(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let xs: Vec<f64> = (1..=y.len()).map(|k| k as f64).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(y).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let resid = xs
        .iter()
        .zip(y)
        .map(|(x, y)| (y - my - slope * (x - mx)).abs())
        .fold(0.0, f64::max);
    (slope, resid)
}

fn commutator_norms(cfg: &RunConfig, name: &str, w: &MatrixWeightField) -> Result<Vec<f64>> {
    let d = *w.domain();
    let (log_w, h) = (w.log(), hilbert_operator(d.len())?);
    let mut fact = 1.0;
    (1..=ORDERS)
        .map(|n| {
            fact *= n as f64;
            let c = iterated_commutator(&log_w, &h, n)?;
            Ok(l2_norm(
                &c,
                d,
                w.dim(),
                derive_seed(cfg.seed, &format!("{name}-charact{n}")),
            )? / fact)
        })
        .collect()
}

fn growth(cfg: &RunConfig, name: &str, recipe: &WeightRecipe) -> CheckRecord {
    let points = cfg.sizes.charact_points;
    let rec = CheckRecord::new(
        Some(7),
        &format!("charact_growth_{name}"),
        "operators.iterated_commutator, operators.charact_derivatives",
        &format!("weight={name} N={points} seed={}", cfg.seed),
        ORDERS,
    );
    guarded(rec, |r| {
        let d = GridDomain::unit(points)?;
        let (_, w) = recipe.build(name, cfg.seed, d)?.remove(0);
        let norms = commutator_norms(cfg, name, &w)?;
        for (n, v) in norms.iter().enumerate() {
            r.push(Quantity::info(&format!("r{}", n + 1), *v));
        }
        let logs: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
        let (slope, resid) = log_linear_fit(&logs);
        r.push(Quantity::info("rate", slope.exp()));
        r.push(Quantity::at_most("max_log_residual", resid, 0.5));

        let mut rng = rng(cfg, &format!("charact-{name}"));
        let f = smooth_function(&mut rng, d, w.dim());
        let derivs = charact_derivatives(&f, &w, 3)?;
        let (log_w, h) = (w.log(), hilbert_operator(points)?);
        let mut worst: f64 = 0.0;
        for n in 1..=3 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let direct = iterated_commutator(&log_w, &h, n)?
                .apply(&f)?
                .scale_real(sign);
            worst = worst.max(rel(&derivs[n], &direct));
        }
        r.push(Quantity::at_most("max_cauchy_relative_error", worst, 1e-6));
        Ok(())
    })
}

fn identity_vanishes(cfg: &RunConfig) -> CheckRecord {
    let points = cfg.sizes.charact_points;
    let rec = CheckRecord::new(
        Some(7),
        "charact_identity_weight",
        "operators.iterated_commutator",
        &format!("N={points} seed={}", cfg.seed),
        ORDERS,
    );
    guarded(rec, |r| {
        let w = MatrixWeightField::identity(GridDomain::unit(points)?, 2);
        let top = commutator_norms(cfg, "identity", &w)?
            .into_iter()
            .fold(0.0, f64::max);
        r.push(Quantity::at_most("max_norm", top, 1e-12));
        Ok(())
    })
}
