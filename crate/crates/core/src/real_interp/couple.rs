use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MwlError, Result};
use crate::fields::{
    Convention, GridDomain, MatrixField, MatrixWeightField, ScalarField, VectorField,
};
use crate::linalg::{polar_of, GeneralMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoupleKind {
    ScalarWeightedLp,
    MatrixWeightedLp,
}

/// The couple `(L^{p0}(V0), L^{p1}(V1))` with `|x|_j = |V_j x|_{p_j}`, where
/// `V_j = W_j` (plain) or `W_j^{1/p_j}` (tilde).
///
/// Internally every function is mapped by `T = U* V0` onto the diagonal couple
/// `(L^{p0}, L^{p1}(D))`, with `|V1 V0^{-1}| = U D U*`.
#[derive(Clone, Debug)]
pub struct CoupleSpec {
    pub kind: CoupleKind,
    pub p0: f64,
    pub p1: f64,
    pub convention: Convention,
    w0: MatrixWeightField,
    w1: MatrixWeightField,
    v0: MatrixField,
    v1: MatrixField,
    forward: Vec<GeneralMatrix>,
    backward: Vec<GeneralMatrix>,
    diag: Vec<f64>,
}

impl CoupleSpec {
    /// Scalar couple `(L^{p0}(w0), L^{p1}(w1))`, `|f|_j = |w_j f|_{p_j}`.
    pub fn scalar(p0: f64, p1: f64, w0: &ScalarField, w1: &ScalarField) -> Result<Self> {
        let mut c = Self::matrix(
            p0,
            p1,
            &MatrixWeightField::scalar(w0)?,
            &MatrixWeightField::scalar(w1)?,
            Convention::Plain,
        )?;
        c.kind = CoupleKind::ScalarWeightedLp;
        Ok(c)
    }

    pub fn matrix(
        p0: f64,
        p1: f64,
        w0: &MatrixWeightField,
        w1: &MatrixWeightField,
        convention: Convention,
    ) -> Result<Self> {
        if !(p0 >= 1.0 && p1 >= 1.0 && p0.is_finite() && p1.is_finite()) {
            return Err(MwlError::InvalidParameter(format!(
                "exponents must lie in [1, inf): {p0}, {p1}"
            )));
        }
        w0.domain().check_same(w1.domain())?;
        if w0.dim() != w1.dim() {
            return Err(MwlError::DimensionMismatch {
                expected: w0.dim(),
                found: w1.dim(),
            });
        }
        let v0 = w0.norm_factor(p0, convention);
        let v1 = w1.norm_factor(p1, convention);
        let e0 = match convention {
            Convention::Plain => 1.0,
            Convention::Tilde => 1.0 / p0,
        };
        let v0_inv = w0.power_field(-e0);
        let parts = v1
            .values()
            .par_iter()
            .zip(v0.values())
            .zip(v0_inv.values())
            .map(|((a, v0), v0i)| {
                let pd = polar_of(&(a * v0i))?;
                let fwd = &pd.unitary.adjoint() * v0;
                let back = v0i * &pd.unitary;
                Ok((fwd, back, pd.diagonal))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut forward = Vec::with_capacity(parts.len());
        let mut backward = Vec::with_capacity(parts.len());
        let mut diag = Vec::with_capacity(parts.len() * w0.dim());
        for (f, b, d) in parts {
            forward.push(f);
            backward.push(b);
            diag.extend(d);
        }
        let kind = if w0.dim() == 1 {
            CoupleKind::ScalarWeightedLp
        } else {
            CoupleKind::MatrixWeightedLp
        };
        Ok(CoupleSpec {
            kind,
            p0,
            p1,
            convention,
            w0: w0.clone(),
            w1: w1.clone(),
            v0,
            v1,
            forward,
            backward,
            diag,
        })
    }

    pub fn domain(&self) -> &GridDomain {
        self.w0.domain()
    }

    pub fn dim(&self) -> usize {
        self.w0.dim()
    }

    pub fn w0(&self) -> &MatrixWeightField {
        &self.w0
    }

    pub fn w1(&self) -> &MatrixWeightField {
        &self.w1
    }

    /// Diagonal of `D` at point `i`, descending.
    pub fn diagonal_at(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.diag[i * n..(i + 1) * n]
    }

    pub(crate) fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn check(&self, f: &VectorField) -> Result<()> {
        self.domain().check_same(f.domain())?;
        if f.dim() != self.dim() {
            return Err(MwlError::DimensionMismatch {
                expected: self.dim(),
                found: f.dim(),
            });
        }
        Ok(())
    }

    /// `|x|_{X0}`.
    pub fn norm0(&self, x: &VectorField) -> Result<f64> {
        self.check(x)?;
        Ok(self.v0.apply(x)?.lp_norm(self.p0))
    }

    /// `|x|_{X1}`.
    pub fn norm1(&self, x: &VectorField) -> Result<f64> {
        self.check(x)?;
        Ok(self.v1.apply(x)?.lp_norm(self.p1))
    }

    /// Diagonal entries of `D` as one scalar field per coordinate.
    pub fn diagonal_fields(&self) -> Vec<ScalarField> {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let v = (0..self.domain().len())
                    .map(|i| self.diag[i * n + j])
                    .collect();
                ScalarField::new(*self.domain(), v).expect("grid-sized")
            })
            .collect()
    }

    /// `f -> U* V0 f`, an isometry onto the diagonal couple.
    pub fn transform(&self, f: &VectorField) -> Result<VectorField> {
        self.check(f)?;
        VectorField::from_data(*self.domain(), self.dim(), self.to_diagonal(f))
    }

    /// `g -> V0^{-1} U g`.
    pub fn inverse_transform(&self, g: &VectorField) -> Result<VectorField> {
        self.check(g)?;
        Ok(self.from_diagonal(g.data()))
    }

    /// `T f = U* V0 f`.
    pub(crate) fn to_diagonal(&self, f: &VectorField) -> Vec<C64> {
        let n = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); f.data().len()];
        for (i, m) in self.forward.iter().enumerate() {
            m.mul_vec_into(f.point(i), &mut out[i * n..(i + 1) * n]);
        }
        out
    }

    /// `T^{-1} g = V0^{-1} U g`.
    pub(crate) fn from_diagonal(&self, g: &[C64]) -> VectorField {
        let n = self.dim();
        let mut out = VectorField::zeros(*self.domain(), n);
        for (i, m) in self.backward.iter().enumerate() {
            m.mul_vec_into(&g[i * n..(i + 1) * n], out.point_mut(i));
        }
        out
    }
}

/// `f = x0 + x1`, with `x1` formed by subtraction so the identity is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub x0: VectorField,
    pub x1: VectorField,
}

impl Decomposition {
    pub fn from_x0(f: &VectorField, x0: VectorField) -> Self {
        let x1 = f.sub(&x0);
        Decomposition { x0, x1 }
    }

    pub fn scale(&self, s: f64) -> Self {
        Decomposition {
            x0: self.x0.scale_real(s),
            x1: self.x1.scale_real(s),
        }
    }
}

/// `|f|_{X0 + X1} = K(1, f)`.
pub fn sum_norm(f: &VectorField, couple: &CoupleSpec) -> Result<f64> {
    Ok(super::k_functional(1.0, f, couple)?.0)
}

/// `max(|f|_0, |f|_1)`.
pub fn intersection_norm(f: &VectorField, couple: &CoupleSpec) -> Result<f64> {
    Ok(couple.norm0(f)?.max(couple.norm1(f)?))
}
