use serde::{Deserialize, Serialize};

use super::couple::CoupleSpec;
use super::functionals::{functional_sweep, k_functional, sweep_with, RealMethod};
use super::grid::LogGrid;
use crate::complex_interp::InterpParams;
use crate::error::{MwlError, Result};
use crate::fields::{Convention, MatrixWeightField, ScalarField, VectorField};
use crate::linalg::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivationPath {
    /// Quadrature of the selector integrals over the grid.
    Quadrature,
    /// Pointwise formulas for scalar couples.
    ClosedForm,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `int_{-inf}^{s} x^k/k! e^{c(x-s)} dx`, `c > 0`.
fn lower_tail(k: usize, s: f64, c: f64) -> f64 {
    (0..=k)
        .map(|j| {
            (-1f64).powi(j as i32) * s.powi((k - j) as i32)
                / (factorial(k - j) * c.powi(j as i32 + 1))
        })
        .sum()
}

/// `int_s^inf x^k/k! e^{-c(x-s)} dx`, `c > 0`.
fn upper_tail(k: usize, s: f64, c: f64) -> f64 {
    (0..=k)
        .map(|j| s.powi((k - j) as i32) / (factorial(k - j) * c.powi(j as i32 + 1)))
        .sum()
}

/// `Omega^{(n)}` of the K- or E-method at `f`.
pub fn omega_real(
    f: &VectorField,
    couple: &CoupleSpec,
    method: RealMethod,
    order: usize,
    grid: &LogGrid,
    path: DerivationPath,
) -> Result<VectorField> {
    if order == 0 {
        return Err(MwlError::InvalidParameter(
            "derivation order must be >= 1".into(),
        ));
    }
    method.validate()?;
    couple.check(f)?;
    match path {
        DerivationPath::Quadrature => omega_quadrature(f, couple, method, order, grid),
        DerivationPath::ClosedForm => omega_closed_form(f, couple, method, order, grid),
    }
}

fn omega_quadrature(
    f: &VectorField,
    couple: &CoupleSpec,
    method: RealMethod,
    order: usize,
    grid: &LogGrid,
) -> Result<VectorField> {
    let i0 = grid
        .one_index()
        .ok_or_else(|| MwlError::InvalidParameter("derivation grid must contain t = 1".into()))?;
    let s = grid.log_values();
    let ds = grid.log_step();
    let m = s.len();
    let k = order - 1;
    let kern = |x: f64| x.powi(k as i32) / factorial(k);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    // Omega = cl int_{-inf}^0 kern y_low + cr int_0^inf kern y_high
    let (cl, cr) = match method {
        RealMethod::K => (sign, -sign),
        RealMethod::E { .. } => (-1.0, 1.0),
    };
    let low_is_x0 = matches!(method, RealMethod::K);
    let mut acc = VectorField::zeros(*f.domain(), f.dim());
    let mut low_edge: Vec<VectorField> = Vec::new();
    let mut high_edge: Vec<VectorField> = Vec::new();
    sweep_with(f, couple, grid, method, |i, _, e, solver| {
        let dec = solver.decomposition(e.split);
        let (y_low, y_high) = if low_is_x0 {
            (&dec.x0, &dec.x1)
        } else {
            (&dec.x1, &dec.x0)
        };
        if i <= i0 {
            let w = if i == 0 || i == i0 { 0.5 } else { 1.0 };
            acc = acc.axpy(C64::new(cl * w * ds * kern(s[i]), 0.0), y_low);
        }
        if i >= i0 {
            let w = if i == i0 || i == m - 1 { 0.5 } else { 1.0 };
            acc = acc.axpy(C64::new(cr * w * ds * kern(s[i]), 0.0), y_high);
        }
        if i < 2 {
            low_edge.push(y_low.clone());
        }
        if i + 2 >= m {
            high_edge.push(y_high.clone());
        }
        Ok(())
    })?;
    let floor = 1e-12 * f.pointwise_norms().iter().cloned().fold(0.0, f64::max);
    let tails = [
        (&low_edge[0], &low_edge[1], cl, true),
        (&high_edge[1], &high_edge[0], cr, false),
    ];
    for (outer, inner, c, lower) in tails {
        let (no, ni) = (outer.pointwise_norms(), inner.pointwise_norms());
        for x in 0..f.len() {
            if no[x] <= floor {
                continue;
            }
            let rate = (ni[x] / no[x]).ln() / ds;
            if !(rate > 0.0) {
                let side = if lower { "t -> 0" } else { "t -> inf" };
                return Err(MwlError::Divergent(format!(
                    "derivation integrand does not decay as {side} at grid index {x}"
                )));
            }
            let weight = if lower {
                lower_tail(k, s[0], rate)
            } else {
                upper_tail(k, s[m - 1], rate)
            };
            let z = C64::new(c * weight, 0.0);
            let out = acc.point_mut(x);
            for (o, v) in out.iter_mut().zip(outer.point(x)) {
                *o += z * v;
            }
        }
    }
    Ok(acc)
}

fn scalar_weights(couple: &CoupleSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    if couple.dim() != 1 {
        return Err(MwlError::Unsupported(
            "closed-form derivations need a scalar couple".into(),
        ));
    }
    let w = |m: &MatrixWeightField| m.values().iter().map(|v| v[(0, 0)].re).collect();
    Ok((w(couple.w0()), w(couple.w1())))
}

fn omega_closed_form(
    f: &VectorField,
    couple: &CoupleSpec,
    method: RealMethod,
    order: usize,
    grid: &LogGrid,
) -> Result<VectorField> {
    let (w0, w1) = scalar_weights(couple)?;
    if couple.convention != Convention::Plain {
        return Err(MwlError::Unsupported(
            "closed-form derivations use the plain convention".into(),
        ));
    }
    let (p0, p1) = (couple.p0, couple.p1);
    let nf = factorial(order);
    let n = order as i32;
    match method {
        RealMethod::K => Err(MwlError::Unsupported(
            "the K-method has no closed-form derivation".into(),
        )),
        RealMethod::E { alpha } if alpha == 1.0 => {
            if p0 != p1 {
                return Err(MwlError::Unsupported(
                    "closed-form E_1 derivation needs p0 = p1".into(),
                ));
            }
            let ks = functional_sweep(f, couple, grid, RealMethod::K)?;
            let k1 = k_functional(1.0, f, couple)?.0;
            if f.l2_norm() == 0.0 {
                return Ok(f.clone());
            }
            let s = grid.log_values();
            let ds = grid.log_step();
            let lnk: Vec<f64> = ks.iter().map(|v| v.ln()).collect();
            let interp = |t: f64| -> Result<f64> {
                let x = (t.ln() - s[0]) / ds;
                if !(x >= 0.0 && x <= (s.len() - 1) as f64) {
                    return Err(MwlError::InvalidParameter(format!(
                        "K({t:e}) is outside the sweep grid"
                    )));
                }
                let i = (x.floor() as usize).min(s.len() - 2);
                let w = x - i as f64;
                Ok((lnk[i] * (1.0 - w) + lnk[i + 1] * w).exp())
            };
            let mut out = f.clone();
            for x in 0..f.len() {
                let level = (w1[x] / w0[x] * interp(w0[x] / w1[x])?).ln().powi(n) + k1.ln().powi(n);
                out.point_mut(x)[0] *= level / nf;
            }
            Ok(out)
        }
        RealMethod::E { alpha } => {
            if !(p0 < p1) {
                return Err(MwlError::Unsupported(
                    "closed-form E_alpha derivation needs p0 < p1".into(),
                ));
            }
            let expected = p1 / (p1 - p0);
            if (alpha - expected).abs() > 1e-9 * expected {
                return Err(MwlError::InvalidParameter(format!(
                    "closed-form E_alpha derivation needs alpha = p1/(p1 - p0) = {expected}, got {alpha}"
                )));
            }
            let mut out = f.clone();
            for x in 0..f.len() {
                let a = out.point(x)[0];
                if a.norm() == 0.0 {
                    continue;
                }
                let eta = (w1[x].powf(p1) / w0[x].powf(p0)).powf(1.0 / (p1 - p0));
                out.point_mut(x)[0] = a * ((a.norm() * eta).ln().powi(n) / nf);
            }
            Ok(out)
        }
    }
}

/// Derivation of a matrix couple through the diagonalizing transform: `f -> U* V0 f`, scalar
/// derivations of each coordinate against `(L^{p0}, L^{p1}(d_j))`, then back.
#[allow(clippy::too_many_arguments)]
pub fn lifted_matrix_derivation(
    f: &VectorField,
    w0: &MatrixWeightField,
    w1: &MatrixWeightField,
    params: InterpParams,
    convention: Convention,
    method: RealMethod,
    order: usize,
    grid: &LogGrid,
) -> Result<VectorField> {
    let couple = CoupleSpec::matrix(params.p0, params.p1, w0, w1, convention)?;
    let g = couple.transform(f)?;
    let domain = *f.domain();
    let one = ScalarField::constant(domain, 1.0);
    let mut out = VectorField::zeros(domain, f.dim());
    for (j, d) in couple.diagonal_fields().iter().enumerate() {
        let gj = VectorField::from_data(domain, 1, g.component(j))?;
        let scalar = CoupleSpec::scalar(params.p0, params.p1, &one, d)?;
        let oj = omega_real(
            &gj,
            &scalar,
            method,
            order,
            grid,
            DerivationPath::Quadrature,
        )?;
        out.set_component(j, oj.data());
    }
    couple.inverse_transform(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_integrals() {
        // int_{-inf}^{-2} e^{3(x+2)} = 1/3 ; int_{-inf}^{-2} x e^{3(x+2)} = -2/3 - 1/9
        assert!((lower_tail(0, -2.0, 3.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((lower_tail(1, -2.0, 3.0) - (-2.0 / 3.0 - 1.0 / 9.0)).abs() < 1e-15);
        // int_2^inf x^2/2 e^{-(x-2)} = (4 + 4 + 2)/2
        assert!((upper_tail(2, 2.0, 1.0) - 5.0).abs() < 1e-14);
    }
}
