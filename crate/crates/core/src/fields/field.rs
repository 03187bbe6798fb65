use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::domain::GridDomain;
use crate::error::{MwlError, Result};
use crate::linalg::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Grid function with values in `C^n`, stored point-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    domain: GridDomain,
    n: usize,
    data: Vec<C64>,
}

impl VectorField {
    pub fn zeros(domain: GridDomain, n: usize) -> Self {
        VectorField {
            domain,
            n,
            data: vec![ZERO; domain.len() * n],
        }
    }

    pub fn from_data(domain: GridDomain, n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 || data.len() != domain.len() * n {
            return Err(MwlError::DimensionMismatch {
                expected: domain.len() * n,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MwlError::InvalidParameter(
                "vector field has non-finite entries".into(),
            ));
        }
        Ok(VectorField { domain, n, data })
    }

    /// Builds the field from `f(i, x_i) -> C^n`.
    pub fn from_fn(
        domain: GridDomain,
        n: usize,
        mut f: impl FnMut(usize, f64) -> Vec<C64>,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(domain.len() * n);
        for i in 0..domain.len() {
            let v = f(i, domain.x(i));
            if v.len() != n {
                return Err(MwlError::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            data.extend(v);
        }
        Self::from_data(domain, n, data)
    }

    /// Scalar (`n = 1`) field from real samples.
    pub fn from_real(domain: GridDomain, values: &[f64]) -> Result<Self> {
        Self::from_data(
            domain,
            1,
            values.iter().map(|&v| C64::new(v, 0.0)).collect(),
        )
    }

    /// i.i.d. complex Gaussian entries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, domain: GridDomain, n: usize) -> Self {
        let data = (0..domain.len() * n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        VectorField { domain, n, data }
    }

    /// i.i.d. real Gaussian entries.
    pub fn random_real<R: Rng + ?Sized>(rng: &mut R, domain: GridDomain, n: usize) -> Self {
        let data = (0..domain.len() * n)
            .map(|_| C64::new(rng.sample(StandardNormal), 0.0))
            .collect();
        VectorField { domain, n, data }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn point(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn point_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    /// Component `j` as a vector over the grid.
    pub fn component(&self, j: usize) -> Vec<C64> {
        (0..self.len()).map(|i| self.data[i * self.n + j]).collect()
    }

    pub fn set_component(&mut self, j: usize, values: &[C64]) {
        for (i, v) in values.iter().enumerate() {
            self.data[i * self.n + j] = *v;
        }
    }

    pub fn check_compatible(&self, other: &VectorField) -> Result<()> {
        self.domain.check_same(&other.domain)?;
        if self.n != other.n {
            return Err(MwlError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Pointwise Euclidean norms `|f(x_i)|_2`.
    pub fn pointwise_norms(&self) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Unweighted discrete `L^p` norm; `p = inf` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_of_pointwise(&self.pointwise_norms(), p, self.domain.h())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.domain.h()).sqrt()
    }

    /// `<f, g> = sum conj(f) g h`.
    pub fn inner(&self, other: &VectorField) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.domain.h()
    }

    /// Grid average, one value per component.
    pub fn mean(&self) -> Vec<C64> {
        let mut m = vec![ZERO; self.n];
        for v in self.data.chunks(self.n) {
            for (a, b) in m.iter_mut().zip(v) {
                *a += b;
            }
        }
        let inv = 1.0 / self.len() as f64;
        m.iter_mut().for_each(|a| *a *= inv);
        m
    }

    pub fn scale(&self, s: C64) -> VectorField {
        self.map_entries(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> VectorField {
        self.map_entries(|z| z * s)
    }

    pub fn map_entries(&self, f: impl Fn(C64) -> C64) -> VectorField {
        VectorField {
            domain: self.domain,
            n: self.n,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &VectorField) -> VectorField {
        self.zip_with(other, |a, b| a + s * b)
    }

    fn zip_with(&self, other: &VectorField, f: impl Fn(C64, C64) -> C64) -> VectorField {
        assert_eq!(
            self.data.len(),
            other.data.len(),
            "vector field shape mismatch"
        );
        VectorField {
            domain: self.domain,
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Largest pointwise entry difference.
    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Discrete `L^p` norm of nonnegative cell values with cell width `h`.
pub fn lp_of_pointwise(values: &[f64], p: f64, h: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().cloned().fold(0.0, f64::max);
    }
    if p == 2.0 {
        return (values.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    }
    // scale first so large p does not overflow
    let m = values.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * (values.iter().map(|v| (v / m).powf(p)).sum::<f64>() * h).powf(1.0 / p)
}

/// Real-valued grid function (scalar weights, densities).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    domain: GridDomain,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(MwlError::DimensionMismatch {
                expected: domain.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MwlError::InvalidParameter(
                "scalar field has non-finite entries".into(),
            ));
        }
        Ok(ScalarField { domain, values })
    }

    pub fn constant(domain: GridDomain, c: f64) -> Self {
        ScalarField {
            domain,
            values: vec![c; domain.len()],
        }
    }

    /// Samples `f(x_i)` at cell midpoints.
    pub fn from_fn(domain: GridDomain, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(domain, (0..domain.len()).map(|i| f(domain.x(i))).collect())
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            domain: self.domain,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn as_vector_field(&self) -> VectorField {
        VectorField {
            domain: self.domain,
            n: 1,
            data: self.values.iter().map(|&v| C64::new(v, 0.0)).collect(),
        }
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_norm_of_constant() {
        let d = GridDomain::unit(16).unwrap();
        let f = VectorField::from_fn(d, 2, |_, _| vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)])
            .unwrap();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((f.lp_norm(p) - 5.0).abs() < 1e-12);
        }
        assert!((f.l2_norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn component_round_trip() {
        let d = GridDomain::unit(16).unwrap();
        let mut rng = rand::thread_rng();
        let f = VectorField::random(&mut rng, d, 3);
        let mut g = VectorField::zeros(d, 3);
        for j in 0..3 {
            g.set_component(j, &f.component(j));
        }
        assert_eq!(f, g);
    }

    #[test]
    fn rejects_wrong_length() {
        let d = GridDomain::unit(16).unwrap();
        assert!(VectorField::from_data(d, 2, vec![ZERO; 31]).is_err());
        assert!(ScalarField::new(d, vec![1.0; 15]).is_err());
    }
}
