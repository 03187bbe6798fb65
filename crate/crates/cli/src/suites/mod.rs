//! Verification suites. Each returns check records tagged with the acceptance criterion they cover.

mod charact;
mod commutator;
mod complex;
mod linalg;
mod real;

use anyhow::{bail, Result};
use mwl_core::fields::{GridDomain, MatrixWeightField, ScalarField, ScalarProfile, VectorField};
use mwl_core::linalg::{random_pd, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{derive_seed, RunConfig};
use crate::report::CheckRecord;

pub const SUITES: [&str; 6] = [
    "linalg",
    "complex",
    "real",
    "commutator",
    "charact",
    "bloom",
];

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => bail!(
            "unknown suite {other:?}; expected one of all, {}",
            SUITES.join(", ")
        ),
    };
    let mut out = Vec::new();
    for s in names {
        let checks = match s {
            "linalg" => linalg::run(cfg),
            "complex" => complex::run(cfg),
            "real" => real::run(cfg),
            "commutator" => commutator::run(cfg),
            "charact" => charact::run(cfg),
            "bloom" => commutator::run_divergence(cfg),
            _ => unreachable!(),
        };
        out.extend(checks.into_iter().map(|mut c| {
            c.suite = s.to_string();
            c
        }));
    }
    Ok(out)
}

pub(crate) fn rng(cfg: &RunConfig, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, tag))
}

pub(crate) fn random_weight(
    rng: &mut ChaCha8Rng,
    d: GridDomain,
    n: usize,
    spread: f64,
) -> MatrixWeightField {
    MatrixWeightField::new(d, (0..d.len()).map(|_| random_pd(rng, n, spread)).collect())
        .expect("random weights are in range")
}

pub(crate) fn smooth_scalar(rng: &mut ChaCha8Rng, d: GridDomain, amplitude: f64) -> ScalarField {
    let v = ScalarProfile::LogSmooth {
        amplitude,
        modes: 4,
    }
    .sample(&d, rng);
    ScalarField::new(d, v).expect("finite profile")
}

/// Random trigonometric polynomial of degree 3 plus a constant, per component.
pub(crate) fn smooth_function(rng: &mut ChaCha8Rng, d: GridDomain, n: usize) -> VectorField {
    let coeffs: Vec<(f64, f64, f64)> = (0..3 * n)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..1.0),
            )
        })
        .collect();
    VectorField::from_fn(d, n, |_, x| {
        (0..n)
            .map(|j| {
                let mut v = C64::new(0.3, 0.0);
                for (k, (a, b, ph)) in coeffs[3 * j..3 * j + 3].iter().enumerate() {
                    let arg = 2.0 * std::f64::consts::PI * ((k + 1) as f64 * x + ph);
                    v += C64::new(a * arg.sin(), b * arg.cos()) / (k + 1) as f64;
                }
                v
            })
            .collect()
    })
    .expect("shape")
}

pub(crate) fn rel(a: &VectorField, b: &VectorField) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm().max(f64::MIN_POSITIVE)
}

/// Runs `body`, turning an error into a failed record.
pub(crate) fn guarded(
    record: CheckRecord,
    body: impl FnOnce(&mut CheckRecord) -> Result<()>,
) -> CheckRecord {
    let mut r = record;
    match body(&mut r) {
        Ok(()) => r,
        Err(e) => r.fail(format!("{e:#}")),
    }
}
