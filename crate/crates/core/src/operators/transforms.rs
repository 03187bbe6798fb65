use std::sync::Arc;

use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::handle::OperatorHandle;
use crate::error::{MwlError, Result};
use crate::fields::VectorField;
use crate::linalg::C64;

/// Per-frequency factors `m(k)` stored in DFT order: index `j` holds frequency `j` for
/// `j < N/2` and `j - N` otherwise.
#[derive(Clone)]
pub struct MultiplierSymbol {
    values: Vec<C64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("values", &self.values)
            .finish()
    }
}

/// Signed frequency of DFT index `j`.
pub fn frequency(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl MultiplierSymbol {
    pub fn new(points: usize, m: impl Fn(i64) -> C64) -> Result<Self> {
        if !points.is_power_of_two() {
            return Err(MwlError::InvalidParameter(format!(
                "multiplier needs a power-of-two size, got {points}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(MultiplierSymbol {
            values: (0..points).map(|j| m(frequency(j, points))).collect(),
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        })
    }

    /// `m(k) = -i sgn(k)`; the Nyquist frequency `-N/2` gets `+i`.
    pub fn hilbert(points: usize) -> Result<Self> {
        Self::new(points, |k| C64::new(0.0, -(k.signum() as f64)))
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn conj(&self) -> Self {
        MultiplierSymbol {
            values: self.values.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }

    pub fn apply(&self, f: &VectorField) -> Result<VectorField> {
        let points = self.values.len();
        if f.len() != points {
            return Err(MwlError::DimensionMismatch {
                expected: points,
                found: f.len(),
            });
        }
        let n = f.dim();
        let mut out = f.clone();
        let mut buf = vec![C64::new(0.0, 0.0); points];
        let inv = 1.0 / points as f64;
        for j in 0..n {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = f.point(i)[j];
            }
            self.forward.process(&mut buf);
            for (b, m) in buf.iter_mut().zip(&self.values) {
                *b *= m * inv;
            }
            self.inverse.process(&mut buf);
            for (i, b) in buf.iter().enumerate() {
                out.point_mut(i)[j] = *b;
            }
        }
        Ok(out)
    }
}

/// Periodic conjugate-function multiplier, componentwise.
pub fn hilbert_transform(f: &VectorField) -> VectorField {
    MultiplierSymbol::hilbert(f.len())
        .and_then(|m| m.apply(f))
        .expect("grid sizes are powers of two")
}

pub fn multiplier_operator(label: impl Into<String>, symbol: MultiplierSymbol) -> OperatorHandle {
    let adj = symbol.conj();
    OperatorHandle::linear(label, move |f| symbol.apply(f), move |f| adj.apply(f))
}

pub fn hilbert_operator(points: usize) -> Result<OperatorHandle> {
    Ok(multiplier_operator("H", MultiplierSymbol::hilbert(points)?))
}

/// One sign per Haar function, indexed `2^j - 1 + k` for scale `j` and position `k < 2^j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MartingaleSigns {
    pub points: usize,
    pub signs: Vec<i8>,
}

impl MartingaleSigns {
    pub fn constant(points: usize, sign: i8) -> Result<Self> {
        Self::new(points, vec![sign; points.saturating_sub(1)])
    }

    pub fn new(points: usize, signs: Vec<i8>) -> Result<Self> {
        if !points.is_power_of_two() || points < 2 {
            return Err(MwlError::InvalidParameter(format!(
                "Haar transform needs a power-of-two size, got {points}"
            )));
        }
        if signs.len() != points - 1 {
            return Err(MwlError::DimensionMismatch {
                expected: points - 1,
                found: signs.len(),
            });
        }
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(MwlError::InvalidParameter(
                "martingale signs must be +1 or -1".into(),
            ));
        }
        Ok(MartingaleSigns { points, signs })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, points: usize) -> Result<Self> {
        let signs = (0..points.saturating_sub(1))
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect();
        Self::new(points, signs)
    }

    pub fn index(scale: u32, position: usize) -> usize {
        (1usize << scale) - 1 + position
    }
}

/// Orthonormal Haar coefficients of one sequence: `out[0]` is the mean term, `out[2^j + k]`
/// the coefficient of the Haar function at scale `j`, position `k`.
pub fn haar_forward(x: &[C64]) -> Vec<C64> {
    let mut cur = x.to_vec();
    let mut out = vec![C64::new(0.0, 0.0); x.len()];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut len = x.len();
    while len > 1 {
        let half = len / 2;
        let mut next = vec![C64::new(0.0, 0.0); half];
        for k in 0..half {
            let (a, b) = (cur[2 * k], cur[2 * k + 1]);
            next[k] = (a + b) * s;
            out[half + k] = (a - b) * s;
        }
        cur = next;
        len = half;
    }
    out[0] = cur[0];
    out
}

pub fn haar_inverse(c: &[C64]) -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut cur = vec![c[0]];
    let mut half = 1;
    while half < c.len() {
        let mut next = vec![C64::new(0.0, 0.0); 2 * half];
        for k in 0..half {
            let (m, d) = (cur[k], c[half + k]);
            next[2 * k] = (m + d) * s;
            next[2 * k + 1] = (m - d) * s;
        }
        cur = next;
        half *= 2;
    }
    cur
}

/// Haar coefficients multiplied by `signs`, mean kept.
pub fn martingale_transform(f: &VectorField, signs: &MartingaleSigns) -> Result<VectorField> {
    if f.len() != signs.points {
        return Err(MwlError::DimensionMismatch {
            expected: signs.points,
            found: f.len(),
        });
    }
    let mut out = f.clone();
    for j in 0..f.dim() {
        let mut c = haar_forward(&f.component(j));
        for (x, s) in c[1..].iter_mut().zip(&signs.signs) {
            *x *= *s as f64;
        }
        out.set_component(j, &haar_inverse(&c));
    }
    Ok(out)
}

pub fn martingale_operator(label: impl Into<String>, signs: MartingaleSigns) -> OperatorHandle {
    let s2 = signs.clone();
    OperatorHandle::linear(
        label,
        move |f| martingale_transform(f, &signs),
        move |f| martingale_transform(f, &s2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridDomain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<C64> = (0..32).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let c = haar_forward(&x);
        let back = haar_inverse(&c);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).norm() < 1e-14);
        }
        let e: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let ec: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert!((e - ec).abs() < 1e-12 * e);
    }

    #[test]
    fn hilbert_symbol_signs() {
        let m = MultiplierSymbol::hilbert(16).unwrap();
        assert_eq!(m.values()[0], C64::new(0.0, 0.0));
        assert_eq!(m.values()[1], C64::new(0.0, -1.0));
        assert_eq!(m.values()[8], C64::new(0.0, 1.0));
        assert_eq!(m.values()[15], C64::new(0.0, 1.0));
    }

    #[test]
    fn single_haar_function_flips() {
        let d = GridDomain::unit(16).unwrap();
        let mut c = vec![C64::new(0.0, 0.0); 16];
        c[MartingaleSigns::index(2, 1) + 1] = C64::new(1.0, 0.0);
        let f = VectorField::from_data(d, 1, haar_inverse(&c)).unwrap();
        let mut signs = MartingaleSigns::constant(16, 1).unwrap();
        signs.signs[MartingaleSigns::index(2, 1)] = -1;
        let g = martingale_transform(&f, &signs).unwrap();
        assert!(g.add(&f).max_abs_diff(&VectorField::zeros(d, 1)) < 1e-14);
    }
}
