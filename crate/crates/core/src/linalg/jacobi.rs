use serde::{Deserialize, Serialize};

use super::matrix::{GeneralMatrix, HermitianMatrix, C64};
use crate::error::{MwlError, Result};

pub const JACOBI_MAX_SWEEPS: usize = 100;
pub const JACOBI_REL_TOL: f64 = 1e-14;

/// `A = U diag(values) U*` with `values` sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigendecomposition {
    pub vectors: GeneralMatrix,
    pub values: Vec<f64>,
}

impl Eigendecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    /// `U diag(f(lambda)) U*` for a real-valued `f`; the result is Hermitian.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let mapped: Vec<C64> = self.values.iter().map(|&l| C64::new(f(l), 0.0)).collect();
        HermitianMatrix::new(self.conjugate_diagonal(&mapped))
    }

    /// `U diag(f(lambda)) U*` for a complex-valued `f` (e.g. complex powers).
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> GeneralMatrix {
        let mapped: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        self.conjugate_diagonal(&mapped)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|l| l)
    }

    fn conjugate_diagonal(&self, diag: &[C64]) -> GeneralMatrix {
        let n = self.dim();
        let u = &self.vectors;
        GeneralMatrix::from_fn(n, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[(i, k)] * diag[k] * u[(j, k)].conj();
            }
            acc
        })
    }
}

fn off_diagonal_norm(a: &GeneralMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary and
/// then applies the real symmetric Jacobi rotation, so the combined transform
/// `J = diag(1, conj(e)) R` stays unitary. Iterates until the off-diagonal
/// Frobenius mass is at most `1e-14 * |A|_F`.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<Eigendecomposition> {
    let n = a.dim();
    let mut m = a.as_general().clone();
    let mut v = GeneralMatrix::identity(n);
    let scale = a.frobenius_norm();
    let tol = JACOBI_REL_TOL * scale;

    let mut converged = off_diagonal_norm(&m) <= tol;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let e = apq / g;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let j_pp = C64::new(c, 0.0);
                let j_pq = C64::new(s, 0.0);
                let j_qp = -e.conj() * s;
                let j_qq = e.conj() * c;

                // columns: M <- M J
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * j_pp + mkq * j_qp;
                    m[(k, q)] = mkp * j_pq + mkq * j_qq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
                // rows: M <- J* M
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = j_pp.conj() * mpk + j_qp.conj() * mqk;
                    m[(q, k)] = j_pq.conj() * mpk + j_qq.conj() * mqk;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
            }
        }
        converged = off_diagonal_norm(&m) <= tol;
    }
    if !converged {
        return Err(MwlError::NonConvergence {
            sweeps,
            residual: off_diagonal_norm(&m),
        });
    }

    let raw: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep Jacobi output order
    order.sort_by(|&i, &j| {
        raw[j]
            .partial_cmp(&raw[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| raw[i]).collect();
    let vectors = GeneralMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(Eigendecomposition { vectors, values })
}
