use rayon::prelude::*;

use super::domain::GridDomain;
use super::weights::{MatrixField, MatrixWeightField};
use crate::error::{MwlError, Result};
use crate::linalg::{GeneralMatrix, C64};

/// Dyadic intervals of the periodic grid. Level `l` splits the domain into `2^l` cubes
/// of `N / 2^l` points; level 0 is the whole domain.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicCubeFamily {
    points: usize,
    levels: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cube {
    pub level: u32,
    pub offset: usize,
    pub start: usize,
    pub len: usize,
}

impl DyadicCubeFamily {
    /// All levels `0..=log2 N`.
    pub fn full(domain: &GridDomain) -> Self {
        DyadicCubeFamily {
            points: domain.len(),
            levels: (0..=domain.levels()).collect(),
        }
    }

    pub fn with_levels(domain: &GridDomain, levels: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut levels: Vec<u32> = levels.into_iter().collect();
        levels.sort_unstable();
        levels.dedup();
        if levels.is_empty() || levels.iter().any(|&l| l > domain.levels()) {
            return Err(MwlError::InvalidParameter(format!(
                "cube levels must be a non-empty subset of 0..={}",
                domain.levels()
            )));
        }
        Ok(DyadicCubeFamily {
            points: domain.len(),
            levels,
        })
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn cubes(&self) -> impl Iterator<Item = Cube> + '_ {
        self.levels.iter().flat_map(move |&level| {
            let len = self.points >> level;
            (0..1usize << level).map(move |offset| Cube {
                level,
                offset,
                start: offset * len,
                len,
            })
        })
    }

    fn check(&self, domain: &GridDomain) -> Result<()> {
        if domain.len() != self.points {
            return Err(MwlError::DimensionMismatch {
                expected: self.points,
                found: domain.len(),
            });
        }
        Ok(())
    }
}

/// Squared operator norm of `a b` without allocating for `n <= 2`.
fn product_op_norm_sq(a: &GeneralMatrix, b: &GeneralMatrix) -> f64 {
    match a.dim() {
        1 => (a[(0, 0)] * b[(0, 0)]).norm_sqr(),
        2 => {
            let p00 = a[(0, 0)] * b[(0, 0)] + a[(0, 1)] * b[(1, 0)];
            let p01 = a[(0, 0)] * b[(0, 1)] + a[(0, 1)] * b[(1, 1)];
            let p10 = a[(1, 0)] * b[(0, 0)] + a[(1, 1)] * b[(1, 0)];
            let p11 = a[(1, 0)] * b[(0, 1)] + a[(1, 1)] * b[(1, 1)];
            let f2 = p00.norm_sqr() + p01.norm_sqr() + p10.norm_sqr() + p11.norm_sqr();
            let det = (p00 * p11 - p01 * p10).norm();
            (f2 + (f2 * f2 - 4.0 * det * det).max(0.0).sqrt()) / 2.0
        }
        _ => (a * b).op_norm().powi(2),
    }
}

fn check_ap_exponent(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(MwlError::InvalidParameter(format!(
            "A_p needs 1 < p < inf, got {p}"
        )));
    }
    Ok(p / (p - 1.0))
}

/// Matrix `A_p` characteristic over a dyadic family, with `q = p / (p - 1)`:
/// `max_Q avg_{x in Q} (avg_{y in Q} |W^{1/p}(x) W^{-1/p}(y)|^q)^{p/q}`.
pub fn ap_characteristic(w: &MatrixWeightField, p: f64, cubes: &DyadicCubeFamily) -> Result<f64> {
    let q = check_ap_exponent(p)?;
    cubes.check(w.domain())?;
    if w.dim() == 1 {
        return Ok(ap_scalar(w, p, q, cubes));
    }
    ap_pairwise(w, p, q, cubes)
}

/// For `n = 1` the double average factorizes into `avg w * (avg w^{-q/p})^{p/q}`.
fn ap_scalar(w: &MatrixWeightField, p: f64, q: f64, cubes: &DyadicCubeFamily) -> f64 {
    let vals: Vec<f64> = w.values().iter().map(|m| m[(0, 0)].re).collect();
    let dual: Vec<f64> = vals.iter().map(|v| v.powf(-q / p)).collect();
    let prefix = |xs: &[f64]| {
        let mut out = Vec::with_capacity(xs.len() + 1);
        out.push(0.0);
        let mut acc = 0.0;
        for x in xs {
            acc += x;
            out.push(acc);
        }
        out
    };
    let (pw, pd) = (prefix(&vals), prefix(&dual));
    cubes
        .cubes()
        .map(|c| {
            let (a, b) = (c.start, c.start + c.len);
            let avg_w = if c.len == 1 {
                vals[a]
            } else {
                (pw[b] - pw[a]) / c.len as f64
            };
            let avg_d = if c.len == 1 {
                dual[a]
            } else {
                (pd[b] - pd[a]) / c.len as f64
            };
            avg_w * avg_d.powf(p / q)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Brute-force evaluation of every pair once; pair `(x, y)` contributes to all cubes
/// containing both, i.e. to every level up to the one where their dyadic paths split.
pub(crate) fn ap_pairwise(
    w: &MatrixWeightField,
    p: f64,
    q: f64,
    cubes: &DyadicCubeFamily,
) -> Result<f64> {
    let big = w.power_field(1.0 / p);
    let small = w.power_field(-1.0 / p);
    let nlev = w.domain().levels() as usize;
    let npts = w.len();
    let half_q = q / 2.0;
    // per x: inner sums per level
    let inner: Vec<Vec<f64>> = (0..npts)
        .into_par_iter()
        .map(|x| {
            let mut bucket = vec![0.0; nlev + 1];
            let a = &big.values()[x];
            for (y, b) in small.values().iter().enumerate() {
                let v = product_op_norm_sq(a, b);
                let v = if q == 2.0 { v } else { v.powf(half_q) };
                // deepest common level: the cube size is 2^(nlev - l) >= highest differing bit
                let diff = x ^ y;
                let common = if diff == 0 {
                    nlev
                } else {
                    nlev - (usize::BITS - diff.leading_zeros()) as usize
                };
                bucket[common] += v;
            }
            for l in (0..nlev).rev() {
                bucket[l] += bucket[l + 1];
            }
            bucket
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    for c in cubes.cubes() {
        let l = c.level as usize;
        let sum: f64 = (c.start..c.start + c.len)
            .map(|x| (inner[x][l] / c.len as f64).powf(p / q))
            .sum();
        best = best.max(sum / c.len as f64);
    }
    Ok(best)
}

/// `sup_Q avg_{x in Q} |B(x) - B_Q|_op` over the family.
pub fn bmo_norm(b: &MatrixField, cubes: &DyadicCubeFamily) -> Result<f64> {
    cubes.check(b.domain())?;
    let n = b.dim();
    let all: Vec<Cube> = cubes.cubes().collect();
    let per_cube: Vec<f64> = all
        .par_iter()
        .map(|c| {
            let vals = &b.values()[c.start..c.start + c.len];
            let mut avg = GeneralMatrix::zeros(n);
            for m in vals {
                avg = &avg + m;
            }
            let avg = avg.scale(C64::new(1.0 / c.len as f64, 0.0));
            vals.iter().map(|m| (m - &avg).op_norm()).sum::<f64>() / c.len as f64
        })
        .collect();
    Ok(per_cube.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{GridDomain, ScalarField};
    use crate::linalg::{random_pd, HermitianMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_ap(w: &MatrixWeightField, p: f64, cubes: &DyadicCubeFamily) -> f64 {
        let q = p / (p - 1.0);
        let big = w.power_field(1.0 / p);
        let small = w.power_field(-1.0 / p);
        cubes
            .cubes()
            .map(|c| {
                let r = c.start..c.start + c.len;
                r.clone()
                    .map(|x| {
                        let inner = r
                            .clone()
                            .map(|y| (&big.values()[x] * &small.values()[y]).op_norm().powf(q))
                            .sum::<f64>()
                            / c.len as f64;
                        inner.powf(p / q)
                    })
                    .sum::<f64>()
                    / c.len as f64
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn family_partitions_each_level() {
        let d = GridDomain::unit(16).unwrap();
        let fam = DyadicCubeFamily::full(&d);
        assert_eq!(fam.levels(), &[0, 1, 2, 3, 4]);
        for l in 0..=4u32 {
            let cubes: Vec<Cube> = fam.cubes().filter(|c| c.level == l).collect();
            assert_eq!(cubes.iter().map(|c| c.len).sum::<usize>(), 16);
            assert!(cubes
                .windows(2)
                .all(|w| w[0].start + w[0].len == w[1].start));
        }
        assert!(DyadicCubeFamily::with_levels(&d, [5]).is_err());
    }

    #[test]
    fn identity_and_constant_weights_have_characteristic_one() {
        let d = GridDomain::unit(32).unwrap();
        let fam = DyadicCubeFamily::full(&d);
        let id = MatrixWeightField::identity(d, 2);
        assert!((ap_characteristic(&id, 2.0, &fam).unwrap() - 1.0).abs() < 1e-12);
        let c = MatrixWeightField::scalar(&ScalarField::constant(d, 3.7)).unwrap();
        assert!((ap_characteristic(&c, 3.0, &fam).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_fast_path_matches_brute_force() {
        let d = GridDomain::unit(64).unwrap();
        let fam = DyadicCubeFamily::full(&d);
        let w = MatrixWeightField::scalar(
            &ScalarField::from_fn(d, |x| (std::f64::consts::PI * x).sin().abs().sqrt()).unwrap(),
        )
        .unwrap();
        for p in [1.5, 2.0, 3.0] {
            let fast = ap_characteristic(&w, p, &fam).unwrap();
            let slow = naive_ap(&w, p, &fam);
            assert!((fast - slow).abs() <= 1e-10 * slow, "{fast} vs {slow}");
            let q = p / (p - 1.0);
            let pair = ap_pairwise(&w, p, q, &fam).unwrap();
            assert!((pair - slow).abs() <= 1e-10 * slow);
        }
    }

    #[test]
    fn matrix_pairwise_matches_naive() {
        let d = GridDomain::unit(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 3] {
            let w =
                MatrixWeightField::new(d, (0..32).map(|_| random_pd(&mut rng, n, 1.0)).collect())
                    .unwrap();
            let fam = DyadicCubeFamily::full(&d);
            for p in [2.0, 3.0] {
                let a = ap_characteristic(&w, p, &fam).unwrap();
                let b = naive_ap(&w, p, &fam);
                assert!((a - b).abs() <= 1e-10 * b);
                assert!(a >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn characteristic_is_scale_invariant() {
        let d = GridDomain::unit(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let w = MatrixWeightField::new(d, (0..32).map(|_| random_pd(&mut rng, 2, 1.0)).collect())
            .unwrap();
        let fam = DyadicCubeFamily::full(&d);
        let a = ap_characteristic(&w, 2.0, &fam).unwrap();
        let b = ap_characteristic(&w.scale(17.0).unwrap(), 2.0, &fam).unwrap();
        assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn bmo_examples() {
        let d = GridDomain::unit(64).unwrap();
        let fam = DyadicCubeFamily::full(&d);
        let c = MatrixField::constant(d, &GeneralMatrix::diagonal(&[2.0, -1.0]));
        assert_eq!(bmo_norm(&c, &fam).unwrap(), 0.0);
        let ind = ScalarField::from_fn(d, |x| if x < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let v = bmo_norm(&MatrixField::scalar(&ind), &fam).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let h = MatrixField::new(d, vec![HermitianMatrix::identity(2).into_general(); 64]).unwrap();
        assert_eq!(bmo_norm(&h, &fam).unwrap(), 0.0);
    }
}
