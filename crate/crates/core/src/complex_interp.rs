//! Complex interpolation of matrix-weighted `L^p` couples: interpolated weights,
//! the analytic extremal family on the strip and its derivations at `theta`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MwlError, Result};
use crate::fields::{Convention, GeneralWeightField, MatrixField, MatrixWeightField, VectorField};
use crate::linalg::{absolute_value_eig, polar_of, GeneralMatrix, PolarDiagonalization, C64};

/// Endpoint exponents and the interpolation parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpParams {
    pub p0: f64,
    pub p1: f64,
    pub theta: f64,
}

impl InterpParams {
    pub fn new(p0: f64, p1: f64, theta: f64) -> Result<Self> {
        if !(p0 >= 1.0 && p1 >= 1.0 && p0.is_finite() && p1.is_finite()) {
            return Err(MwlError::InvalidParameter(format!(
                "exponents must lie in [1, inf): p0 = {p0}, p1 = {p1}"
            )));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(MwlError::InvalidParameter(format!(
                "theta = {theta} must lie in (0, 1)"
            )));
        }
        Ok(InterpParams { p0, p1, theta })
    }

    /// `1/p_theta = (1 - theta)/p0 + theta/p1`.
    pub fn p_theta(&self) -> f64 {
        1.0 / ((1.0 - self.theta) / self.p0 + self.theta / self.p1)
    }

    /// Exponent `p_theta (1/p1 - 1/p0)` of the scalar normalizing factor.
    pub fn norm_exponent(&self) -> f64 {
        self.p_theta() * (1.0 / self.p1 - 1.0 / self.p0)
    }
}

/// A point of the closed strip `0 <= Re z <= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripPoint(C64);

impl StripPoint {
    pub fn new(z: C64) -> Result<Self> {
        if !(z.re >= 0.0 && z.re <= 1.0 && z.im.is_finite()) {
            return Err(MwlError::InvalidParameter(format!(
                "{z} is outside the strip"
            )));
        }
        Ok(StripPoint(z))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(C64::new(x, 0.0))
    }

    pub fn z(&self) -> C64 {
        self.0
    }
}

/// Per-point data shared by all complex-method computations on one couple:
/// `V_j = W_j` (plain) or `W_j^{1/p_j}` (tilde), `M = |V1 V0^{-1}| = U D U*`.
#[derive(Clone, Debug)]
pub struct ComplexCouple {
    pub params: InterpParams,
    pub convention: Convention,
    v0: MatrixField,
    v0_inv: MatrixField,
    polar: Vec<PolarDiagonalization>,
}

impl ComplexCouple {
    pub fn new(
        w0: &MatrixWeightField,
        w1: &MatrixWeightField,
        params: InterpParams,
        convention: Convention,
    ) -> Result<Self> {
        w0.domain().check_same(w1.domain())?;
        if w0.dim() != w1.dim() {
            return Err(MwlError::DimensionMismatch {
                expected: w0.dim(),
                found: w1.dim(),
            });
        }
        let (e0, e1) = match convention {
            Convention::Plain => (1.0, 1.0),
            Convention::Tilde => (1.0 / params.p0, 1.0 / params.p1),
        };
        let v0 = w0.power_field(e0);
        let v0_inv = w0.power_field(-e0);
        let v1 = w1.power_field(e1);
        let polar = v1
            .values()
            .par_iter()
            .zip(v0_inv.values())
            .map(|(a, b)| polar_of(&(a * b)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexCouple {
            params,
            convention,
            v0,
            v0_inv,
            polar,
        })
    }

    pub fn dim(&self) -> usize {
        self.v0.dim()
    }

    pub fn polar(&self) -> &[PolarDiagonalization] {
        &self.polar
    }

    pub fn v0(&self) -> &MatrixField {
        &self.v0
    }

    /// `M^theta V0` pointwise: the plain interpolated weight in this couple's variables.
    pub fn interpolated_factor(&self) -> MatrixField {
        let theta = self.params.theta;
        let vals = self
            .polar
            .par_iter()
            .zip(self.v0.values())
            .map(|(pd, v0)| &pd.power(theta) * v0)
            .collect();
        MatrixField::new(*self.v0.domain(), vals).expect("shapes agree")
    }

    /// `|f|_theta = |M^theta V0 f|_{p_theta}`.
    pub fn theta_norm(&self, f: &VectorField) -> Result<f64> {
        Ok(self
            .interpolated_factor()
            .apply(f)?
            .lp_norm(self.params.p_theta()))
    }

    /// `log N(x)` with `N(x) = |M^theta V0 f(x)| / |f|_theta`; `None` where `f(x) = 0`.
    fn log_norm_ratio(&self, f: &VectorField, norm_theta: f64) -> Result<Vec<Option<f64>>> {
        let g = self.interpolated_factor().apply(f)?;
        Ok(g.pointwise_norms()
            .into_iter()
            .map(|v| {
                if v > 0.0 {
                    Some((v / norm_theta).ln())
                } else {
                    None
                }
            })
            .collect())
    }

    /// `B(z) = N^{c (z - theta)} V0^{-1} M^{-z} M^theta V0 f` with `c = p_theta (1/p1 - 1/p0)`.
    pub fn extremal_section(
        &self,
        f: &VectorField,
        z: StripPoint,
        norm_theta: f64,
    ) -> Result<VectorField> {
        self.check_input(f, norm_theta)?;
        let theta = self.params.theta;
        let c = self.params.norm_exponent();
        let logn = self.log_norm_ratio(f, norm_theta)?;
        let z = z.z();
        let n = self.dim();
        let mut out = VectorField::zeros(*f.domain(), n);
        for i in 0..f.len() {
            let Some(ln) = logn[i] else { continue };
            let pd = &self.polar[i];
            let d: Vec<C64> = pd
                .diagonal
                .iter()
                .map(|&x| ((theta - z) * x.ln()).exp())
                .collect();
            let m = &(&pd.unitary * &GeneralMatrix::complex_diagonal(&d)) * &pd.unitary.adjoint();
            let op = &(&self.v0_inv.values()[i] * &m) * &self.v0.values()[i];
            let scale = (c * (z - theta) * ln).exp();
            let v = op.mul_vec(f.point(i));
            for (o, x) in out.point_mut(i).iter_mut().zip(v) {
                *o = scale * x;
            }
        }
        Ok(out)
    }

    /// `Omega_{theta,n} = B^{(n)}(theta) / n!`.
    pub fn omega(&self, f: &VectorField, order: usize, norm_theta: f64) -> Result<VectorField> {
        if order == 0 {
            return Err(MwlError::InvalidParameter(
                "derivation order starts at 1".into(),
            ));
        }
        let c = self.params.norm_exponent();
        if order >= 2 && c != 0.0 {
            return Err(MwlError::Unsupported(format!(
                "complex derivation of order {order} with p0 != p1"
            )));
        }
        self.check_input(f, norm_theta)?;
        let logn = if c != 0.0 {
            self.log_norm_ratio(f, norm_theta)?
        } else {
            vec![None; f.len()]
        };
        let n = self.dim();
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        let fact: f64 = (1..=order).map(|k| k as f64).product();
        let mut out = VectorField::zeros(*f.domain(), n);
        for i in 0..f.len() {
            let pd = &self.polar[i];
            let d: Vec<f64> = pd
                .diagonal
                .iter()
                .map(|x| x.ln().powi(order as i32))
                .collect();
            let logm = &(&pd.unitary * &GeneralMatrix::diagonal(&d)) * &pd.unitary.adjoint();
            let op = &(&self.v0_inv.values()[i] * &logm) * &self.v0.values()[i];
            let v = op.mul_vec(f.point(i));
            let scalar = logn[i].map_or(0.0, |ln| c * ln);
            for ((o, x), fx) in out.point_mut(i).iter_mut().zip(v).zip(f.point(i)) {
                *o = (sign * x) / fact + fx * scalar;
            }
        }
        Ok(out)
    }

    fn check_input(&self, f: &VectorField, norm_theta: f64) -> Result<()> {
        self.v0.domain().check_same(f.domain())?;
        if f.dim() != self.dim() {
            return Err(MwlError::DimensionMismatch {
                expected: self.dim(),
                found: f.dim(),
            });
        }
        if !(norm_theta > 0.0) || f.data().iter().all(|z| z.norm() == 0.0) {
            return Err(MwlError::ZeroInput(
                "extremal section of the zero function".into(),
            ));
        }
        Ok(())
    }
}

/// `|W1 W0^{-1}|^theta W0` pointwise, together with its polar absolute value.
pub fn interp_weight_plain(
    w0: &MatrixWeightField,
    w1: &MatrixWeightField,
    params: InterpParams,
) -> Result<(GeneralWeightField, MatrixWeightField)> {
    let couple = ComplexCouple::new(w0, w1, params, Convention::Plain)?;
    let general = GeneralWeightField::new(couple.interpolated_factor())?;
    let pd = general.absolute_value()?;
    Ok((general, pd))
}

/// `W_theta = | |W1^{1/p1} W0^{-1/p0}|^theta W0^{1/p0} |^{p_theta}` pointwise.
pub fn interp_weight_tilde(
    w0: &MatrixWeightField,
    w1: &MatrixWeightField,
    params: InterpParams,
) -> Result<MatrixWeightField> {
    let couple = ComplexCouple::new(w0, w1, params, Convention::Tilde)?;
    let factor = couple.interpolated_factor();
    let half_p = params.p_theta() / 2.0;
    let eigs = factor
        .values()
        .par_iter()
        .map(|a| {
            let mut e = absolute_value_eig(a)?;
            e.values
                .iter_mut()
                .for_each(|l| *l = l.max(0.0).powf(half_p));
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixWeightField::from_eigs(*w0.domain(), eigs)
}

/// `T_V : f -> V f`.
pub fn couple_transform(f: &VectorField, v: &GeneralWeightField) -> Result<VectorField> {
    v.apply(f)
}

/// `|f|_theta` in the given convention.
pub fn theta_norm(
    f: &VectorField,
    w0: &MatrixWeightField,
    w1: &MatrixWeightField,
    params: InterpParams,
    convention: Convention,
) -> Result<f64> {
    ComplexCouple::new(w0, w1, params, convention)?.theta_norm(f)
}

pub fn extremal_section(
    f: &VectorField,
    w0: &MatrixWeightField,
    w1: &MatrixWeightField,
    params: InterpParams,
    convention: Convention,
    z: StripPoint,
    norm_theta: f64,
) -> Result<VectorField> {
    ComplexCouple::new(w0, w1, params, convention)?.extremal_section(f, z, norm_theta)
}

pub fn omega_complex(
    f: &VectorField,
    w0: &MatrixWeightField,
    w1: &MatrixWeightField,
    params: InterpParams,
    convention: Convention,
    order: usize,
) -> Result<VectorField> {
    let couple = ComplexCouple::new(w0, w1, params, convention)?;
    let norm = couple.theta_norm(f)?;
    couple.omega(f, order, norm)
}
