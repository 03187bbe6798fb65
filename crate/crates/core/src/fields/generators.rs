use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::domain::GridDomain;
use super::weights::MatrixWeightField;
use crate::error::{MwlError, Result};
use crate::linalg::{random_unitary, GeneralMatrix, HermitianMatrix};

/// Eigenvalue range accepted by the rotating-weight generator.
pub const PROFILE_MIN: f64 = 1e-6;
pub const PROFILE_MAX: f64 = 1e6;

/// Real function on the grid; `u = x / length` is the unit coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarProfile {
    Constant {
        value: f64,
    },
    /// `|sin(pi u)|^exponent`
    SinePower {
        exponent: f64,
    },
    /// `exp(amplitude * sin(2 pi (frequency u + phase)))`
    ExpSine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// `offset + slope * u`
    Linear {
        offset: f64,
        slope: f64,
    },
    /// `exp` of a random trigonometric polynomial with sup bounded by `amplitude`.
    LogSmooth {
        amplitude: f64,
        modes: usize,
    },
}

impl ScalarProfile {
    pub fn sample<R: Rng + ?Sized>(&self, domain: &GridDomain, rng: &mut R) -> Vec<f64> {
        let us: Vec<f64> = (0..domain.len()).map(|i| domain.unit_x(i)).collect();
        match *self {
            ScalarProfile::Constant { value } => vec![value; us.len()],
            ScalarProfile::SinePower { exponent } => us
                .iter()
                .map(|u| (PI * u).sin().abs().powf(exponent))
                .collect(),
            ScalarProfile::ExpSine {
                amplitude,
                frequency,
                phase,
            } => us
                .iter()
                .map(|u| (amplitude * (2.0 * PI * (frequency * u + phase)).sin()).exp())
                .collect(),
            ScalarProfile::Linear { offset, slope } => {
                us.iter().map(|u| offset + slope * u).collect()
            }
            ScalarProfile::LogSmooth { amplitude, modes } => {
                let coeffs: Vec<(f64, f64)> = (0..modes.max(1))
                    .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0)))
                    .collect();
                let total: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.0.abs() / (k + 1) as f64)
                    .sum();
                let norm = if total > 0.0 { amplitude / total } else { 0.0 };
                us.iter()
                    .map(|u| {
                        let s: f64 = coeffs
                            .iter()
                            .enumerate()
                            .map(|(k, (a, ph))| {
                                a / (k + 1) as f64 * (2.0 * PI * ((k + 1) as f64 * u + ph)).sin()
                            })
                            .sum();
                        (norm * s).exp()
                    })
                    .collect()
            }
        }
    }
}

/// Log-eigenvalue profile for the commuting-pair generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralProfile {
    /// One random spectrum shared by all points.
    Constant { log_spread: f64 },
    /// Smooth random log-eigenvalue curves.
    Smooth { amplitude: f64, modes: usize },
    /// Independent log-uniform eigenvalues per point.
    Rough { log_spread: f64 },
}

impl SpectralProfile {
    fn sample(&self, domain: &GridDomain, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match *self {
            SpectralProfile::Constant { log_spread } => {
                vec![rng.gen_range(-log_spread..=log_spread).exp(); domain.len()]
            }
            SpectralProfile::Smooth { amplitude, modes } => {
                ScalarProfile::LogSmooth { amplitude, modes }.sample(domain, rng)
            }
            SpectralProfile::Rough { log_spread } => (0..domain.len())
                .map(|_| rng.gen_range(-log_spread..=log_spread).exp())
                .collect(),
        }
    }
}

/// Two weights diagonal in the same per-point unitary basis, so `[W0(x), W1(x)] = 0`.
pub fn gen_commuting_pair(
    seed: u64,
    n: usize,
    domain: GridDomain,
    profile: SpectralProfile,
) -> Result<(MatrixWeightField, MatrixWeightField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectra: Vec<Vec<Vec<f64>>> = (0..2)
        .map(|_| (0..n).map(|_| profile.sample(&domain, &mut rng)).collect())
        .collect();
    let mut w0 = Vec::with_capacity(domain.len());
    let mut w1 = Vec::with_capacity(domain.len());
    for i in 0..domain.len() {
        let u = if n == 1 {
            GeneralMatrix::identity(1)
        } else {
            random_unitary(&mut rng, n)
        };
        let conj =
            |d: Vec<f64>| HermitianMatrix::new(&(&u * &GeneralMatrix::diagonal(&d)) * &u.adjoint());
        w0.push(conj(spectra[0].iter().map(|s| s[i]).collect()));
        w1.push(conj(spectra[1].iter().map(|s| s[i]).collect()));
    }
    Ok((
        MatrixWeightField::new(domain, w0)?,
        MatrixWeightField::new(domain, w1)?,
    ))
}

/// `W(x) = R(gamma(x)) diag(l1(x), l2(x)) R(gamma(x))^T` with `R` a plane rotation.
pub fn gen_rotating_weight(
    seed: u64,
    domain: GridDomain,
    angle: &ScalarProfile,
    lambda1: &ScalarProfile,
    lambda2: &ScalarProfile,
) -> Result<MatrixWeightField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = angle.sample(&domain, &mut rng);
    let l1 = lambda1.sample(&domain, &mut rng);
    let l2 = lambda2.sample(&domain, &mut rng);
    for (i, &l) in l1.iter().chain(&l2).enumerate() {
        if !(PROFILE_MIN..=PROFILE_MAX).contains(&l) {
            return Err(MwlError::SpectrumOutOfRange {
                index: i % domain.len(),
                eigenvalue: l,
            });
        }
    }
    let values = (0..domain.len())
        .map(|i| {
            let (s, c) = gamma[i].sin_cos();
            let r = GeneralMatrix::from_real_rows(&[&[c, -s], &[s, c]]).expect("2x2");
            HermitianMatrix::new(&(&r * &GeneralMatrix::diagonal(&[l1[i], l2[i]])) * &r.adjoint())
        })
        .collect();
    MatrixWeightField::new(domain, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pairs(n: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    }

    #[test]
    fn commuting_pair_commutes() {
        let d = GridDomain::unit(32).unwrap();
        for profile in [
            SpectralProfile::Constant { log_spread: 2.0 },
            SpectralProfile::Smooth {
                amplitude: 2.0,
                modes: 3,
            },
            SpectralProfile::Rough { log_spread: 2.0 },
        ] {
            let (w0, w1) = gen_commuting_pair(3, 3, d, profile).unwrap();
            for i in 0..32 {
                let (a, b) = (w0.value(i).as_general(), w1.value(i).as_general());
                assert!(
                    (&(a * b) - &(b * a)).frobenius_norm()
                        <= 1e-12 * (1.0 + a.op_norm() * b.op_norm())
                );
            }
        }
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let d = GridDomain::unit(16).unwrap();
        let p = SpectralProfile::Smooth {
            amplitude: 1.0,
            modes: 4,
        };
        assert_eq!(
            gen_commuting_pair(5, 2, d, p).unwrap(),
            gen_commuting_pair(5, 2, d, p).unwrap()
        );
        assert_ne!(
            gen_commuting_pair(5, 2, d, p).unwrap().0,
            gen_commuting_pair(6, 2, d, p).unwrap().0
        );
    }

    #[test]
    fn zero_angle_gives_diagonal_field() {
        let d = GridDomain::unit(16).unwrap();
        let w = gen_rotating_weight(
            1,
            d,
            &ScalarProfile::Constant { value: 0.0 },
            &ScalarProfile::SinePower { exponent: 0.5 },
            &ScalarProfile::Constant { value: 2.0 },
        )
        .unwrap();
        for m in w.values() {
            assert_eq!(m[(0, 1)].norm(), 0.0);
        }
    }

    #[test]
    fn equal_eigenvalues_give_scalar_multiple_of_identity() {
        let d = GridDomain::unit(16).unwrap();
        let lam = ScalarProfile::ExpSine {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        };
        let w = gen_rotating_weight(
            1,
            d,
            &ScalarProfile::Linear {
                offset: 0.3,
                slope: 5.0,
            },
            &lam,
            &lam,
        )
        .unwrap();
        for m in w.values() {
            let off = m[(0, 1)].norm() + (m[(0, 0)] - m[(1, 1)]).norm();
            assert!(off < 1e-14 * m.op_norm());
        }
    }

    #[test]
    fn generic_rotating_weight_does_not_commute() {
        let d = GridDomain::unit(16).unwrap();
        let w = gen_rotating_weight(
            1,
            d,
            &ScalarProfile::Linear {
                offset: 0.0,
                slope: PI,
            },
            &ScalarProfile::Constant { value: 4.0 },
            &ScalarProfile::Constant { value: 1.0 },
        )
        .unwrap();
        assert!(w.max_bracket(&all_pairs(16)) > 1e-3);
    }

    #[test]
    fn rotating_weight_rejects_out_of_range_profiles() {
        let d = GridDomain::unit(16).unwrap();
        let r = gen_rotating_weight(
            1,
            d,
            &ScalarProfile::Constant { value: 0.0 },
            &ScalarProfile::Constant { value: 1e-7 },
            &ScalarProfile::Constant { value: 1.0 },
        );
        assert!(matches!(
            r,
            Err(MwlError::SpectrumOutOfRange { index: 0, .. })
        ));
    }
}
