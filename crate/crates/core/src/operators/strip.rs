use std::f64::consts::PI;

use super::transforms::MultiplierSymbol;
use crate::error::Result;
use crate::fields::{MatrixWeightField, VectorField};
use crate::linalg::C64;

pub const CAUCHY_RADIUS: f64 = 0.2;
pub const CAUCHY_NODES: usize = 64;

/// `F_f(z) = W^{(1-2z)/2} H W^{(2z-1)/2} f`.
pub fn charact_strip_function(
    f: &VectorField,
    z: C64,
    w: &MatrixWeightField,
) -> Result<VectorField> {
    let c = z - 0.5;
    let h = MultiplierSymbol::hilbert(f.len())?;
    let inner = w.complex_power_field(c).apply(f)?;
    w.complex_power_field(-c).apply(&h.apply(&inner)?)
}

/// Derivatives `F^{(k)}(z0)`, `k = 0..=max_order`, from the Cauchy integral on the circle of
/// radius `r` with `nodes` equispaced points.
pub fn cauchy_derivatives(
    mut eval: impl FnMut(C64) -> Result<VectorField>,
    z0: C64,
    r: f64,
    nodes: usize,
    max_order: usize,
) -> Result<Vec<VectorField>> {
    let mut acc: Vec<Option<VectorField>> = vec![None; max_order + 1];
    for j in 0..nodes {
        let phi = 2.0 * PI * j as f64 / nodes as f64;
        let v = eval(z0 + C64::from_polar(r, phi))?;
        for (k, slot) in acc.iter_mut().enumerate() {
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let w = C64::from_polar(fact / (nodes as f64 * r.powi(k as i32)), -(k as f64) * phi);
            *slot = Some(match slot.take() {
                None => v.scale(w),
                Some(a) => a.axpy(w, &v),
            });
        }
    }
    Ok(acc
        .into_iter()
        .map(|a| a.expect("at least one node"))
        .collect())
}

/// `F_f^{(k)}(1/2)` for `k = 0..=max_order` with the default contour.
pub fn charact_derivatives(
    f: &VectorField,
    w: &MatrixWeightField,
    max_order: usize,
) -> Result<Vec<VectorField>> {
    let h = MultiplierSymbol::hilbert(f.len())?;
    cauchy_derivatives(
        |z| {
            let c = z - 0.5;
            let inner = w.complex_power_field(c).apply(f)?;
            w.complex_power_field(-c).apply(&h.apply(&inner)?)
        },
        C64::new(0.5, 0.0),
        CAUCHY_RADIUS,
        CAUCHY_NODES,
        max_order,
    )
}
