use std::fmt;
use std::ops::{Add, Deref, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MwlError, Result};

pub type C64 = Complex64;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralMatrix {
    n: usize,
    data: Vec<C64>,
}

impl GeneralMatrix {
    pub fn zeros(n: usize) -> Self {
        GeneralMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        GeneralMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(MwlError::InvalidParameter("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MwlError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(GeneralMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_data(n: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(MwlError::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(GeneralMatrix { n, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn complex_diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        GeneralMatrix {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        GeneralMatrix {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `self * v` for a vector of length `n`.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[C64], out: &mut [C64]) {
        let n = self.n;
        debug_assert_eq!(v.len(), n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            out[i] = acc;
        }
    }

    pub fn try_mul(&self, other: &GeneralMatrix) -> Result<GeneralMatrix> {
        if self.n != other.n {
            return Err(MwlError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self * other)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<GeneralMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let (piv, piv_abs) =
                (col..n)
                    .map(|r| (r, a[(r, col)].norm()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if piv_abs <= 1e-300 || piv_abs / scale < 1e-15 {
                return Err(MwlError::Singular {
                    smallest_singular_value: piv_abs,
                    condition: f64::INFINITY,
                });
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(col * n + j, piv * n + j);
                    inv.data.swap(col * n + j, piv * n + j);
                }
            }
            let d = C64::new(1.0, 0.0) / a[(col, col)];
            for j in 0..n {
                a[(col, j)] *= d;
                inv[(col, j)] *= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let av = a[(col, j)];
                    let iv = inv[(col, j)];
                    a[(r, j)] -= factor * av;
                    inv[(r, j)] -= factor * iv;
                }
            }
        }
        Ok(inv)
    }

    /// Spectral norm `sqrt(lambda_max(A* A))`.
    pub fn op_norm(&self) -> f64 {
        match self.n {
            1 => self.data[0].norm(),
            2 => {
                // sigma1^2 + sigma2^2 = |A|_F^2, sigma1 * sigma2 = |det A|
                let f2 = self.data.iter().map(|x| x.norm_sqr()).sum::<f64>();
                let det = (self.data[0] * self.data[3] - self.data[1] * self.data[2]).norm();
                let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
                ((f2 + disc) / 2.0).sqrt()
            }
            _ => {
                let gram = HermitianMatrix::new(&self.adjoint() * self);
                match super::eig_hermitian(&gram) {
                    Ok(e) => e.values[0].max(0.0).sqrt(),
                    Err(_) => f64::NAN,
                }
            }
        }
    }
}

impl Index<(usize, usize)> for GeneralMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for GeneralMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &GeneralMatrix {
    type Output = GeneralMatrix;
    fn mul(self, rhs: &GeneralMatrix) -> GeneralMatrix {
        let n = self.n;
        assert_eq!(n, rhs.n, "matrix product dimension mismatch");
        let mut out = GeneralMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &GeneralMatrix {
    type Output = GeneralMatrix;
    fn add(self, rhs: &GeneralMatrix) -> GeneralMatrix {
        assert_eq!(self.n, rhs.n, "matrix sum dimension mismatch");
        GeneralMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &GeneralMatrix {
    type Output = GeneralMatrix;
    fn sub(self, rhs: &GeneralMatrix) -> GeneralMatrix {
        assert_eq!(self.n, rhs.n, "matrix difference dimension mismatch");
        GeneralMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for GeneralMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GeneralMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6e}{:+.6e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Complex Hermitian matrix. Construction symmetrizes `(A + A*) / 2`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix(GeneralMatrix);

impl HermitianMatrix {
    pub fn new(m: GeneralMatrix) -> Self {
        let n = m.dim();
        let sym = GeneralMatrix::from_fn(n, |i, j| {
            if i == j {
                C64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        HermitianMatrix(sym)
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(GeneralMatrix::identity(n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        HermitianMatrix(GeneralMatrix::diagonal(values))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Ok(Self::new(GeneralMatrix::from_real_rows(rows)?))
    }

    pub fn as_general(&self) -> &GeneralMatrix {
        &self.0
    }

    pub fn into_general(self) -> GeneralMatrix {
        self.0
    }
}

impl Deref for HermitianMatrix {
    type Target = GeneralMatrix;
    fn deref(&self) -> &GeneralMatrix {
        &self.0
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian")?;
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_roundtrip() {
        let a = GeneralMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(0.5, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 0.3), c(3.0, 0.0), c(1.0, 1.0)],
            vec![c(1.0, 0.0), c(-0.2, 0.4), c(1.5, -0.5)],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        let id = &a * &inv;
        assert!((&id - &GeneralMatrix::identity(3)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn singular_inverse_is_rejected() {
        let a = GeneralMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(a.inverse(), Err(MwlError::Singular { .. })));
    }

    #[test]
    fn op_norm_two_by_two_closed_form() {
        let a = GeneralMatrix::diagonal(&[-3.0, 2.0]);
        assert!((a.op_norm() - 3.0).abs() < 1e-14);
        let b = GeneralMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((b.op_norm() - golden).abs() < 1e-13);
    }

    #[test]
    fn hermitian_construction_symmetrizes() {
        let m = GeneralMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(2.0, 1.0)],
            vec![c(0.0, 0.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianMatrix::new(m);
        assert!(h.is_hermitian(1e-15));
        assert_eq!(h[(0, 0)], c(1.0, 0.0));
        assert_eq!(h[(0, 1)], c(1.0, 0.5));
    }
}
