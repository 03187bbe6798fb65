use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::GridDomain;
use super::field::{lp_of_pointwise, ScalarField, VectorField};
use crate::error::{MwlError, Result};
use crate::linalg::{
    absolute_value, eig_hermitian, Eigendecomposition, GeneralMatrix, HermitianMatrix,
    MatrixFunction, C64, MAX_CONDITION, MAX_DIM,
};

/// Admissible eigenvalue range for weight fields.
pub const MIN_WEIGHT_EIGENVALUE: f64 = 1e-12;
pub const MAX_WEIGHT_EIGENVALUE: f64 = 1e12;

/// How a weight enters a norm: `|W f|_p` (plain) or `|W^{1/p} f|_p` (tilde).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Plain,
    Tilde,
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(MwlError::InvalidParameter(format!(
            "matrix dimension {n} outside 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

/// Grid field of arbitrary square matrices (multipliers, logs, BMO symbols).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    domain: GridDomain,
    n: usize,
    values: Vec<GeneralMatrix>,
}

impl MatrixField {
    pub fn new(domain: GridDomain, values: Vec<GeneralMatrix>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(MwlError::DimensionMismatch {
                expected: domain.len(),
                found: values.len(),
            });
        }
        let n = values[0].dim();
        check_dim(n)?;
        if let Some(m) = values.iter().find(|m| m.dim() != n) {
            return Err(MwlError::DimensionMismatch {
                expected: n,
                found: m.dim(),
            });
        }
        if values.iter().any(|m| {
            m.data()
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
        }) {
            return Err(MwlError::InvalidParameter(
                "matrix field has non-finite entries".into(),
            ));
        }
        Ok(MatrixField { domain, n, values })
    }

    pub fn constant(domain: GridDomain, m: &GeneralMatrix) -> Self {
        MatrixField {
            domain,
            n: m.dim(),
            values: vec![m.clone(); domain.len()],
        }
    }

    pub fn identity(domain: GridDomain, n: usize) -> Self {
        Self::constant(domain, &GeneralMatrix::identity(n))
    }

    /// `n = 1` field from real samples.
    pub fn scalar(field: &ScalarField) -> Self {
        MatrixField {
            domain: *field.domain(),
            n: 1,
            values: field
                .values()
                .iter()
                .map(|&v| GeneralMatrix::diagonal(&[v]))
                .collect(),
        }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[GeneralMatrix] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(&GeneralMatrix) -> GeneralMatrix + Sync + Send) -> MatrixField {
        MatrixField {
            domain: self.domain,
            n: self.n,
            values: self.values.par_iter().map(f).collect(),
        }
    }

    pub fn try_map(
        &self,
        f: impl Fn(&GeneralMatrix) -> Result<GeneralMatrix> + Sync + Send,
    ) -> Result<MatrixField> {
        Ok(MatrixField {
            domain: self.domain,
            n: self.n,
            values: self.values.par_iter().map(f).collect::<Result<_>>()?,
        })
    }

    fn zip(
        &self,
        other: &MatrixField,
        f: impl Fn(&GeneralMatrix, &GeneralMatrix) -> GeneralMatrix + Sync + Send,
    ) -> Result<MatrixField> {
        self.domain.check_same(&other.domain)?;
        if self.n != other.n {
            return Err(MwlError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(MatrixField {
            domain: self.domain,
            n: self.n,
            values: self
                .values
                .par_iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    /// Pointwise product `A(x) B(x)`.
    pub fn mul(&self, other: &MatrixField) -> Result<MatrixField> {
        self.zip(other, |a, b| a * b)
    }

    pub fn add(&self, other: &MatrixField) -> Result<MatrixField> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &MatrixField) -> Result<MatrixField> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> MatrixField {
        self.map(|m| m.scale(s))
    }

    pub fn adjoint(&self) -> MatrixField {
        self.map(|m| m.adjoint())
    }

    pub fn inverse(&self) -> Result<MatrixField> {
        self.try_map(|m| m.inverse())
    }

    /// Pointwise `A(x) f(x)`.
    pub fn apply(&self, f: &VectorField) -> Result<VectorField> {
        self.domain.check_same(f.domain())?;
        if f.dim() != self.n {
            return Err(MwlError::DimensionMismatch {
                expected: self.n,
                found: f.dim(),
            });
        }
        let mut out = VectorField::zeros(self.domain, self.n);
        for (i, m) in self.values.iter().enumerate() {
            let (src, dst) = (
                f.point(i),
                &mut out.data_mut()[i * self.n..(i + 1) * self.n],
            );
            m.mul_vec_into(src, dst);
        }
        Ok(out)
    }

    /// `max_x |A(x)|_op`.
    pub fn sup_op_norm(&self) -> f64 {
        self.values.iter().map(|m| m.op_norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.values
            .iter()
            .all(|m| m.is_hermitian(tol * (1.0 + m.frobenius_norm())))
    }
}

/// Field of invertible matrices (condition number at most `1e12`).
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralWeightField {
    inner: MatrixField,
}

impl GeneralWeightField {
    pub fn new(field: MatrixField) -> Result<Self> {
        let eigs: Vec<Result<Eigendecomposition>> = field
            .values
            .par_iter()
            .map(|m| eig_hermitian(&HermitianMatrix::new(&m.adjoint() * m)))
            .collect();
        for e in eigs {
            let e = e?;
            let (smax, smin) = (e.max_value().max(0.0).sqrt(), e.min_value().max(0.0).sqrt());
            if !(smin > 0.0 && smax / smin <= MAX_CONDITION) {
                return Err(MwlError::Singular {
                    smallest_singular_value: smin,
                    condition: if smin > 0.0 {
                        smax / smin
                    } else {
                        f64::INFINITY
                    },
                });
            }
        }
        Ok(GeneralWeightField { inner: field })
    }

    pub(crate) fn new_unchecked(field: MatrixField) -> Self {
        GeneralWeightField { inner: field }
    }

    pub fn identity(domain: GridDomain, n: usize) -> Self {
        GeneralWeightField {
            inner: MatrixField::identity(domain, n),
        }
    }

    pub fn as_field(&self) -> &MatrixField {
        &self.inner
    }

    pub fn into_field(self) -> MatrixField {
        self.inner
    }

    pub fn domain(&self) -> &GridDomain {
        &self.inner.domain
    }

    pub fn dim(&self) -> usize {
        self.inner.n
    }

    pub fn values(&self) -> &[GeneralMatrix] {
        &self.inner.values
    }

    pub fn apply(&self, f: &VectorField) -> Result<VectorField> {
        self.inner.apply(f)
    }

    pub fn inverse(&self) -> Result<GeneralWeightField> {
        Ok(GeneralWeightField {
            inner: self.inner.inverse()?,
        })
    }

    /// Pointwise polar absolute value `|V(x)|`.
    pub fn absolute_value(&self) -> Result<MatrixWeightField> {
        let vals = self
            .inner
            .values
            .par_iter()
            .map(absolute_value)
            .collect::<Result<Vec<_>>>()?;
        MatrixWeightField::new(self.inner.domain, vals)
    }

    /// `V(x) A(x)` pointwise.
    pub fn compose(&self, a: &GeneralWeightField) -> Result<GeneralWeightField> {
        Ok(GeneralWeightField {
            inner: self.inner.mul(&a.inner)?,
        })
    }
}

/// Field of positive definite Hermitian matrices with cached eigendecompositions.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixWeightField {
    domain: GridDomain,
    n: usize,
    values: Vec<HermitianMatrix>,
    eig: Vec<Eigendecomposition>,
}

impl MatrixWeightField {
    /// Validates positivity and the spectrum range `[1e-12, 1e12]`; errors name the first bad index.
    pub fn new(domain: GridDomain, values: Vec<HermitianMatrix>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(MwlError::DimensionMismatch {
                expected: domain.len(),
                found: values.len(),
            });
        }
        let n = values[0].dim();
        check_dim(n)?;
        if let Some(m) = values.iter().find(|m| m.dim() != n) {
            return Err(MwlError::DimensionMismatch {
                expected: n,
                found: m.dim(),
            });
        }
        let eig = values
            .par_iter()
            .map(eig_hermitian)
            .collect::<Result<Vec<_>>>()?;
        check_spectra(&eig)?;
        Ok(MatrixWeightField {
            domain,
            n,
            values,
            eig,
        })
    }

    pub(crate) fn from_eigs(domain: GridDomain, eig: Vec<Eigendecomposition>) -> Result<Self> {
        check_spectra(&eig)?;
        let values = eig.par_iter().map(|e| e.reconstruct()).collect();
        Ok(MatrixWeightField {
            domain,
            n: eig[0].dim(),
            values,
            eig,
        })
    }

    pub fn identity(domain: GridDomain, n: usize) -> Self {
        let e = eig_hermitian(&HermitianMatrix::identity(n)).expect("identity decomposes");
        MatrixWeightField {
            domain,
            n,
            values: vec![HermitianMatrix::identity(n); domain.len()],
            eig: vec![e; domain.len()],
        }
    }

    /// `n = 1` weight from positive samples.
    pub fn scalar(w: &ScalarField) -> Result<Self> {
        Self::new(
            *w.domain(),
            w.values()
                .iter()
                .map(|&v| HermitianMatrix::diagonal(&[v]))
                .collect(),
        )
    }

    /// Diagonal weight from one scalar field per coordinate.
    pub fn diagonal(entries: &[ScalarField]) -> Result<Self> {
        let domain = *entries[0].domain();
        for e in entries {
            domain.check_same(e.domain())?;
        }
        let values = (0..domain.len())
            .map(|i| HermitianMatrix::diagonal(&entries.iter().map(|e| e[i]).collect::<Vec<_>>()))
            .collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[HermitianMatrix] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &HermitianMatrix {
        &self.values[i]
    }

    pub fn eig(&self, i: usize) -> &Eigendecomposition {
        &self.eig[i]
    }

    pub fn eigs(&self) -> &[Eigendecomposition] {
        &self.eig
    }

    /// Diagonal entry `j` at every point, for diagonal fields.
    pub fn diagonal_entry(&self, j: usize) -> ScalarField {
        ScalarField::new(
            self.domain,
            self.values.iter().map(|m| m[(j, j)].re).collect(),
        )
        .expect("finite diagonal")
    }

    /// Pointwise spectral map with the result required to stay a weight.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64 + Sync) -> Result<MatrixWeightField> {
        let eig = self.eig.par_iter().map(|e| remap(e, &f)).collect();
        Self::from_eigs(self.domain, eig)
    }

    /// `W^s` pointwise.
    pub fn power(&self, s: f64) -> Result<MatrixWeightField> {
        if s == 1.0 {
            return Ok(self.clone());
        }
        self.map_spectrum(|l| MatrixFunction::Power(s).eval(l))
    }

    pub fn inverse(&self) -> Result<MatrixWeightField> {
        self.power(-1.0)
    }

    pub fn scale(&self, c: f64) -> Result<MatrixWeightField> {
        if !(c > 0.0) {
            return Err(MwlError::InvalidParameter(format!(
                "weight scale {c} must be positive"
            )));
        }
        self.map_spectrum(|l| c * l)
    }

    /// Hermitian (not necessarily PD) field `f(W)`, e.g. `log W`.
    pub fn function_field(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> MatrixField {
        MatrixField {
            domain: self.domain,
            n: self.n,
            values: self
                .eig
                .par_iter()
                .map(|e| e.map(&f).into_general())
                .collect(),
        }
    }

    pub fn log(&self) -> MatrixField {
        self.function_field(f64::ln)
    }

    pub fn power_field(&self, s: f64) -> MatrixField {
        self.function_field(|l| l.powf(s))
    }

    /// `W^c` pointwise for complex `c`.
    pub fn complex_power_field(&self, c: C64) -> MatrixField {
        MatrixField {
            domain: self.domain,
            n: self.n,
            values: self
                .eig
                .par_iter()
                .map(|e| e.map_complex(|l| (c * l.ln()).exp()))
                .collect(),
        }
    }

    pub fn as_matrix_field(&self) -> MatrixField {
        MatrixField {
            domain: self.domain,
            n: self.n,
            values: self.values.iter().map(|m| m.as_general().clone()).collect(),
        }
    }

    pub fn to_general(&self) -> GeneralWeightField {
        GeneralWeightField::new_unchecked(self.as_matrix_field())
    }

    pub fn apply(&self, f: &VectorField) -> Result<VectorField> {
        self.as_matrix_field().apply(f)
    }

    /// The multiplier defining the norm: `W` (plain) or `W^{1/p}` (tilde).
    pub fn norm_factor(&self, p: f64, convention: Convention) -> MatrixField {
        match convention {
            Convention::Plain => self.as_matrix_field(),
            Convention::Tilde => self.power_field(1.0 / p),
        }
    }

    /// Weighted norm using the cached decompositions.
    pub fn weighted_norm(&self, f: &VectorField, p: f64, convention: Convention) -> Result<f64> {
        check_p(p)?;
        let g = self.norm_factor(p, convention).apply(f)?;
        Ok(g.lp_norm(p))
    }

    /// Largest `|[W(x), W(y)]|_F` over the sampled index pairs.
    pub fn max_bracket(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (self.values[i].as_general(), self.values[j].as_general());
                (&(a * b) - &(b * a)).frobenius_norm()
            })
            .fold(0.0, f64::max)
    }
}

fn remap(e: &Eigendecomposition, f: impl Fn(f64) -> f64) -> Eigendecomposition {
    let mapped: Vec<f64> = e.values.iter().map(|&l| f(l)).collect();
    let mut order: Vec<usize> = (0..mapped.len()).collect();
    order.sort_by(|&i, &j| {
        mapped[j]
            .partial_cmp(&mapped[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Eigendecomposition {
        values: order.iter().map(|&i| mapped[i]).collect(),
        vectors: GeneralMatrix::from_fn(e.dim(), |r, c| e.vectors[(r, order[c])]),
    }
}

fn check_spectra(eig: &[Eigendecomposition]) -> Result<()> {
    for (index, e) in eig.iter().enumerate() {
        let (lo, hi) = (e.min_value(), e.max_value());
        if !(lo > 0.0) {
            return Err(MwlError::NotPositiveDefinite {
                index,
                min_eigenvalue: lo,
            });
        }
        if lo < MIN_WEIGHT_EIGENVALUE {
            return Err(MwlError::SpectrumOutOfRange {
                index,
                eigenvalue: lo,
            });
        }
        if !(hi <= MAX_WEIGHT_EIGENVALUE) {
            return Err(MwlError::SpectrumOutOfRange {
                index,
                eigenvalue: hi,
            });
        }
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(MwlError::InvalidParameter(format!(
            "exponent p = {p} must be at least 1"
        )));
    }
    Ok(())
}

/// `|f|_{X(W)}`: plain uses `W(x) f(x)`, tilde uses `W(x)^{1/p} f(x)` and needs Hermitian PD values.
pub fn weighted_norm(
    f: &VectorField,
    w: &GeneralWeightField,
    p: f64,
    convention: Convention,
) -> Result<f64> {
    check_p(p)?;
    let g = match convention {
        Convention::Plain => w.apply(f)?,
        Convention::Tilde => {
            let field = w.as_field();
            if !field.is_hermitian(1e-12) {
                return Err(MwlError::InvalidParameter(
                    "tilde convention needs a Hermitian positive definite weight".into(),
                ));
            }
            let vals: Vec<HermitianMatrix> = field
                .values
                .iter()
                .map(|m| HermitianMatrix::new(m.clone()))
                .collect();
            MatrixWeightField::new(*field.domain(), vals)?
                .power_field(1.0 / p)
                .apply(f)?
        }
    };
    Ok(g.lp_norm(p))
}

/// Discrete `L^p` norm of pointwise values `|W(x) f(x)|_2` computed from a precomputed multiplier.
pub fn multiplier_norm(factor: &MatrixField, f: &VectorField, p: f64) -> Result<f64> {
    let g = factor.apply(f)?;
    Ok(lp_of_pointwise(&g.pointwise_norms(), p, f.domain().h()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_invertible, random_pd, random_unitary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn domain() -> GridDomain {
        GridDomain::unit(32).unwrap()
    }

    fn random_weight(rng: &mut ChaCha8Rng, n: usize) -> MatrixWeightField {
        MatrixWeightField::new(domain(), (0..32).map(|_| random_pd(rng, n, 1.5)).collect()).unwrap()
    }

    #[test]
    fn identity_weight_gives_unweighted_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = VectorField::random(&mut rng, domain(), 3);
        for conv in [Convention::Plain, Convention::Tilde] {
            for p in [1.0, 2.0, 3.5] {
                let w = GeneralWeightField::identity(domain(), 3);
                let v = weighted_norm(&f, &w, p, conv).unwrap();
                assert!((v - f.lp_norm(p)).abs() <= 1e-12 * v);
            }
        }
    }

    #[test]
    fn scalar_weight_norm() {
        let d = domain();
        let w = ScalarField::from_fn(d, |x| 1.0 + x).unwrap();
        let f = VectorField::from_fn(d, 1, |_, x| vec![C64::new(x.sin(), 0.0)]).unwrap();
        let direct = (0..32)
            .map(|i| ((1.0 + d.x(i)) * d.x(i).sin()).powi(3))
            .sum::<f64>()
            * d.h();
        let v = weighted_norm(
            &f,
            &MatrixWeightField::scalar(&w).unwrap().to_general(),
            3.0,
            Convention::Plain,
        )
        .unwrap();
        assert!((v - direct.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn unitary_field_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = domain();
        let u = GeneralWeightField::new(
            MatrixField::new(d, (0..32).map(|_| random_unitary(&mut rng, 3)).collect()).unwrap(),
        )
        .unwrap();
        let f = VectorField::random(&mut rng, d, 3);
        let uf = u.apply(&f).unwrap();
        let id = GeneralWeightField::identity(d, 3);
        let a = weighted_norm(&uf, &id, 2.5, Convention::Plain).unwrap();
        let b = weighted_norm(&f, &id, 2.5, Convention::Plain).unwrap();
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn norm_of_general_weight_equals_norm_of_its_absolute_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = domain();
        let v = GeneralWeightField::new(
            MatrixField::new(
                d,
                (0..32)
                    .map(|_| random_invertible(&mut rng, 2, 1.0))
                    .collect(),
            )
            .unwrap(),
        )
        .unwrap();
        let abs = v.absolute_value().unwrap();
        for _ in 0..10 {
            let f = VectorField::random(&mut rng, d, 2);
            let p = rng.gen_range(1.0..4.0);
            let a = weighted_norm(&f, &v, p, Convention::Plain).unwrap();
            let b = abs.weighted_norm(&f, p, Convention::Plain).unwrap();
            assert!((a - b).abs() <= 1e-10 * b);
        }
    }

    #[test]
    fn norm_is_homogeneous_and_subadditive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = random_weight(&mut rng, 2);
        for _ in 0..20 {
            let f = VectorField::random(&mut rng, domain(), 2);
            let g = VectorField::random(&mut rng, domain(), 2);
            let lam = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            for conv in [Convention::Plain, Convention::Tilde] {
                let p = rng.gen_range(1.0..5.0);
                let nf = w.weighted_norm(&f, p, conv).unwrap();
                let ng = w.weighted_norm(&g, p, conv).unwrap();
                let nfg = w.weighted_norm(&f.add(&g), p, conv).unwrap();
                let nl = w.weighted_norm(&f.scale(lam), p, conv).unwrap();
                assert!((nl - lam.norm() * nf).abs() <= 1e-10 * (1.0 + nl));
                assert!(nfg <= (nf + ng) * (1.0 + 1e-10));
            }
        }
    }

    #[test]
    fn tilde_matches_general_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_weight(&mut rng, 3);
        let f = VectorField::random(&mut rng, domain(), 3);
        let a = w.weighted_norm(&f, 3.0, Convention::Tilde).unwrap();
        let b = weighted_norm(&f, &w.to_general(), 3.0, Convention::Tilde).unwrap();
        assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = domain();
        let mut vals = vec![HermitianMatrix::identity(2); 32];
        vals[7] = HermitianMatrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(
            MatrixWeightField::new(d, vals.clone()),
            Err(MwlError::NotPositiveDefinite { index: 7, .. })
        ));
        vals[7] = HermitianMatrix::diagonal(&[1.0, 1e-13]);
        assert!(matches!(
            MatrixWeightField::new(d, vals),
            Err(MwlError::SpectrumOutOfRange { index: 7, .. })
        ));
        let f = VectorField::zeros(d, 2);
        let w = MatrixWeightField::identity(d, 2);
        assert!(w.weighted_norm(&f, 0.5, Convention::Plain).is_err());
        assert!(w
            .weighted_norm(&VectorField::zeros(d, 3), 2.0, Convention::Plain)
            .is_err());
    }

    #[test]
    fn power_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let w = random_weight(&mut rng, 3);
        let inv = w.inverse().unwrap();
        for i in 0..32 {
            let prod = w.value(i).as_general() * inv.value(i).as_general();
            assert!((&prod - &GeneralMatrix::identity(3)).frobenius_norm() < 1e-10);
        }
        let half = w.power(0.5).unwrap();
        for i in 0..32 {
            let sq = half.value(i).as_general() * half.value(i).as_general();
            assert!(
                (&sq - w.value(i).as_general()).frobenius_norm()
                    < 1e-10 * (1.0 + w.value(i).frobenius_norm())
            );
        }
    }
}
