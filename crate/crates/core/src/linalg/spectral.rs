use serde::{Deserialize, Serialize};

use super::jacobi::{eig_hermitian, Eigendecomposition};
use super::matrix::{GeneralMatrix, HermitianMatrix, C64};
use crate::error::{MwlError, Result};

/// Condition-number cutoff for treating a matrix as invertible.
pub const MAX_CONDITION: f64 = 1e12;

/// Scalar function applied through the spectral calculus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MatrixFunction {
    Power(f64),
    Log,
    Exp,
}

impl MatrixFunction {
    fn name(&self) -> String {
        match self {
            MatrixFunction::Power(t) => format!("power({t})"),
            MatrixFunction::Log => "log".into(),
            MatrixFunction::Exp => "exp".into(),
        }
    }

    fn check(&self, eig: &Eigendecomposition) -> Result<()> {
        let min = eig.min_value();
        let bad = match *self {
            MatrixFunction::Log => min <= 0.0,
            MatrixFunction::Power(t) if t < 0.0 => min <= 0.0,
            MatrixFunction::Power(t) if t.fract() != 0.0 => min < 0.0,
            _ => false,
        };
        if bad {
            return Err(MwlError::Domain {
                function: self.name(),
                eigenvalue: min,
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            MatrixFunction::Power(t) => {
                if t == 1.0 {
                    x
                } else if t == 0.0 {
                    1.0
                } else {
                    x.powf(t)
                }
            }
            MatrixFunction::Log => x.ln(),
            MatrixFunction::Exp => x.exp(),
        }
    }
}

/// `U f(Lambda) U*`.
pub fn matrix_function(a: &HermitianMatrix, f: MatrixFunction) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(a)?;
    apply_function(&eig, f)
}

/// Same as [`matrix_function`] but reuses an existing decomposition.
pub fn apply_function(eig: &Eigendecomposition, f: MatrixFunction) -> Result<HermitianMatrix> {
    f.check(eig)?;
    Ok(eig.map(|x| f.eval(x)))
}

/// `A^c` for complex `c` on a positive definite matrix (principal branch).
pub fn complex_power(eig: &Eigendecomposition, c: C64) -> Result<GeneralMatrix> {
    if eig.min_value() <= 0.0 {
        return Err(MwlError::Domain {
            function: format!("power({c})"),
            eigenvalue: eig.min_value(),
        });
    }
    Ok(eig.map_complex(|l| (c * l.ln()).exp()))
}

/// Polar absolute value `|A| = (A* A)^{1/2}`.
pub fn absolute_value(a: &GeneralMatrix) -> Result<HermitianMatrix> {
    Ok(absolute_value_eig(a)?.map(|l| l.sqrt()))
}

/// Decomposition of `A* A`, checked for invertibility of `A`.
pub(crate) fn absolute_value_eig(a: &GeneralMatrix) -> Result<Eigendecomposition> {
    let gram = HermitianMatrix::new(&a.adjoint() * a);
    let eig = eig_hermitian(&gram)?;
    let smax = eig.max_value().max(0.0).sqrt();
    let smin = eig.min_value().max(0.0).sqrt();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(MwlError::Singular {
            smallest_singular_value: smin,
            condition,
        });
    }
    Ok(eig)
}

/// `|W1 W0^{-1}| = U D U*` with `D` positive and sorted descending.
#[derive(Clone, Debug)]
pub struct PolarDiagonalization {
    pub unitary: GeneralMatrix,
    pub diagonal: Vec<f64>,
}

impl PolarDiagonalization {
    pub fn diagonal_matrix(&self) -> HermitianMatrix {
        HermitianMatrix::diagonal(&self.diagonal)
    }

    /// `U D U^{-1}` (with `U^{-1} = U*`).
    pub fn reconstruct(&self) -> GeneralMatrix {
        let d = GeneralMatrix::diagonal(&self.diagonal);
        &(&self.unitary * &d) * &self.unitary.adjoint()
    }

    /// `U D^s U*` for real `s`.
    pub fn power(&self, s: f64) -> GeneralMatrix {
        let d: Vec<f64> = self.diagonal.iter().map(|x| x.powf(s)).collect();
        &(&self.unitary * &GeneralMatrix::diagonal(&d)) * &self.unitary.adjoint()
    }

    /// `U log(D) U*`.
    pub fn log(&self) -> GeneralMatrix {
        let d: Vec<f64> = self.diagonal.iter().map(|x| x.ln()).collect();
        &(&self.unitary * &GeneralMatrix::diagonal(&d)) * &self.unitary.adjoint()
    }
}

pub fn polar_diagonalize(
    w0: &HermitianMatrix,
    w1: &HermitianMatrix,
) -> Result<PolarDiagonalization> {
    if w0.dim() != w1.dim() {
        return Err(MwlError::DimensionMismatch {
            expected: w0.dim(),
            found: w1.dim(),
        });
    }
    for w in [w0, w1] {
        let e = eig_hermitian(w)?;
        if e.min_value() <= 0.0 {
            return Err(MwlError::Domain {
                function: "polar_diagonalize (positive definite weight)".into(),
                eigenvalue: e.min_value(),
            });
        }
    }
    let ratio = w1.as_general() * &w0.inverse()?;
    polar_of(&ratio)
}

/// Diagonalization of `|A|` for a general invertible `A`.
pub fn polar_of(a: &GeneralMatrix) -> Result<PolarDiagonalization> {
    let eig = absolute_value_eig(a)?;
    Ok(PolarDiagonalization {
        diagonal: eig.values.iter().map(|l| l.max(0.0).sqrt()).collect(),
        unitary: eig.vectors,
    })
}

/// Commutator `AB - BA`.
pub fn bracket(a: &GeneralMatrix, b: &GeneralMatrix) -> Result<GeneralMatrix> {
    if a.dim() != b.dim() {
        return Err(MwlError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(&(a * b) - &(b * a))
}
