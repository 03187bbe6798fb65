use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::handle::OperatorHandle;
use crate::error::{MwlError, Result};
use crate::fields::{Convention, MatrixField, MatrixWeightField, VectorField};
use crate::linalg::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// Krylov iteration on `G* G` (p = 2 only).
    Exact2,
    /// Best ratio over random probes refined by coordinate ascent.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Exact,
    LowerBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub estimate: f64,
    pub certificate: Certificate,
    /// Operator applications used by the best run.
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub krylov_dim: usize,
    pub probes: usize,
    pub refinement_steps: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tolerance: 1e-10,
            max_iterations: 10_000,
            restarts: 5,
            krylov_dim: 30,
            probes: 200,
            refinement_steps: 50,
            seed: 0,
        }
    }
}

fn factor(w: &MatrixWeightField, p: f64, convention: Convention, sign: f64) -> MatrixField {
    match convention {
        Convention::Plain => w.power_field(sign),
        Convention::Tilde => w.power_field(sign / p),
    }
}

/// `|T : X_p(W_src) -> X_p(W_dst)|`, where `X_p(W)` uses the multiplier `W` (plain) or
/// `W^{1/p}` (tilde).
pub fn operator_norm_weighted(
    t: &OperatorHandle,
    w_src: &MatrixWeightField,
    w_dst: &MatrixWeightField,
    p: f64,
    convention: Convention,
    method: NormMethod,
) -> Result<NormEstimate> {
    operator_norm_weighted_with(
        t,
        w_src,
        w_dst,
        p,
        convention,
        method,
        &NormOptions::default(),
    )
}

pub fn operator_norm_weighted_with(
    t: &OperatorHandle,
    w_src: &MatrixWeightField,
    w_dst: &MatrixWeightField,
    p: f64,
    convention: Convention,
    method: NormMethod,
    opts: &NormOptions,
) -> Result<NormEstimate> {
    if !(p >= 1.0) {
        return Err(MwlError::InvalidParameter(format!(
            "exponent p = {p} must be at least 1"
        )));
    }
    w_src.domain().check_same(w_dst.domain())?;
    if w_src.dim() != w_dst.dim() {
        return Err(MwlError::DimensionMismatch {
            expected: w_src.dim(),
            found: w_dst.dim(),
        });
    }
    match method {
        NormMethod::Exact2 => {
            if p != 2.0 {
                return Err(MwlError::InvalidParameter(format!(
                    "exact2 needs p = 2, got {p}"
                )));
            }
            exact2(t, w_src, w_dst, convention, opts)
        }
        NormMethod::Sampled => sampled(t, w_src, w_dst, p, convention, opts),
    }
}

fn exact2(
    t: &OperatorHandle,
    w_src: &MatrixWeightField,
    w_dst: &MatrixWeightField,
    convention: Convention,
    opts: &NormOptions,
) -> Result<NormEstimate> {
    if !t.linear || !t.has_adjoint() {
        return Err(MwlError::Unsupported(format!(
            "exact2 needs a linear operator with adjoint, got {}",
            t.label
        )));
    }
    let src_inv = factor(w_src, 2.0, convention, -1.0);
    let dst = factor(w_dst, 2.0, convention, 1.0);
    if let Some(b) = t.multiplier() {
        let g = dst.mul(&b.mul(&src_inv)?)?;
        return Ok(NormEstimate {
            estimate: g.sup_op_norm(),
            certificate: Certificate::Exact,
            iterations: 0,
        });
    }
    let gram = |x: &VectorField| -> Result<VectorField> {
        let y = dst.apply(&t.apply(&src_inv.apply(x)?)?)?;
        src_inv.apply(&t.apply_adjoint(&dst.apply(&y)?)?)
    };
    let (domain, n) = (*w_src.domain(), w_src.dim());
    let dim = domain.len() * n;
    let runs = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            let x0 = VectorField::random(&mut rng, domain, n);
            top_eigenvalue(
                &gram,
                x0,
                opts.tolerance,
                opts.max_iterations,
                opts.krylov_dim.min(dim).max(1),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .copied()
        .fold(None::<(f64, usize, bool)>, |b, r| match b {
            Some(b) if b.0 >= r.0 => Some(b),
            _ => Some(r),
        })
        .expect("at least one run");
    Ok(NormEstimate {
        estimate: best.0.max(0.0).sqrt(),
        certificate: if best.2 {
            Certificate::Exact
        } else {
            Certificate::LowerBound
        },
        iterations: best.1,
    })
}

/// Largest eigenvalue of a Hermitian positive semidefinite map by restarted Lanczos with full
/// reorthogonalization. Returns (value, applications, converged).
fn top_eigenvalue(
    a: &impl Fn(&VectorField) -> Result<VectorField>,
    x0: VectorField,
    tol: f64,
    max_apps: usize,
    m: usize,
) -> Result<(f64, usize, bool)> {
    let mut x = x0;
    let mut prev = f64::NAN;
    let mut apps = 0;
    loop {
        let norm = x.l2_norm();
        if norm == 0.0 {
            return Ok((0.0, apps, true));
        }
        let mut basis = vec![x.scale_real(1.0 / norm)];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        let mut exhausted = false;
        for j in 0..m {
            let mut w = a(&basis[j])?;
            apps += 1;
            let aj = basis[j].inner(&w).re;
            alpha.push(aj);
            for _ in 0..2 {
                for v in &basis {
                    let c = v.inner(&w);
                    w = w.axpy(-c, v);
                }
            }
            let b = w.l2_norm();
            let scale = alpha.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            if j + 1 == m || apps >= max_apps || b <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
                exhausted = b <= 1e-13 * scale.max(f64::MIN_POSITIVE);
                break;
            }
            beta.push(b);
            basis.push(w.scale_real(1.0 / b));
        }
        let theta = tridiagonal_top(&alpha, &beta);
        let y = tridiagonal_vector(&alpha, &beta, theta);
        let mut next = VectorField::zeros(*x.domain(), x.dim());
        for (v, c) in basis.iter().zip(&y) {
            next = next.axpy(C64::new(*c, 0.0), v);
        }
        x = next;
        let converged = exhausted || (theta - prev).abs() <= tol * theta.abs() || theta == 0.0;
        if converged {
            return Ok((theta, apps, true));
        }
        if apps >= max_apps {
            return Ok((
                theta.max(if prev.is_nan() { 0.0 } else { prev }),
                apps,
                false,
            ));
        }
        prev = theta;
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..alpha.len() {
        let off = if i == 0 {
            0.0
        } else {
            beta[i - 1] * beta[i - 1] / q
        };
        q = alpha[i] - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn tridiagonal_top(alpha: &[f64], beta: &[f64]) -> f64 {
    let m = alpha.len();
    let radius = |i: usize| {
        (if i > 0 { beta[i - 1].abs() } else { 0.0 })
            + (if i + 1 < m { beta[i].abs() } else { 0.0 })
    };
    let mut lo = (0..m)
        .map(|i| alpha[i] - radius(i))
        .fold(f64::INFINITY, f64::min);
    let mut hi = (0..m)
        .map(|i| alpha[i] + radius(i))
        .fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, beta, mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Eigenvector for the top eigenvalue `theta` by inverse iteration on `(sigma - T)`, which is
/// positive definite for `sigma` just above `theta`.
fn tridiagonal_vector(alpha: &[f64], beta: &[f64], theta: f64) -> Vec<f64> {
    let m = alpha.len();
    let sigma = theta + 1e-12 * theta.abs().max(1e-300) + 1e-300;
    let mut y = vec![1.0; m];
    for _ in 0..3 {
        // Thomas algorithm for diag (sigma - alpha), off-diagonal -beta
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        for i in 0..m {
            let lower = if i > 0 { -beta[i - 1] } else { 0.0 };
            let denom = (sigma - alpha[i]) - if i > 0 { lower * c[i - 1] } else { 0.0 };
            let denom = if denom.abs() < 1e-300 { 1e-300 } else { denom };
            c[i] = if i + 1 < m { -beta[i] / denom } else { 0.0 };
            d[i] = (y[i] - if i > 0 { lower * d[i - 1] } else { 0.0 }) / denom;
        }
        for i in (0..m).rev() {
            y[i] = d[i] - if i + 1 < m { c[i] * y[i + 1] } else { 0.0 };
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
    }
    y
}

fn sampled(
    t: &OperatorHandle,
    w_src: &MatrixWeightField,
    w_dst: &MatrixWeightField,
    p: f64,
    convention: Convention,
    opts: &NormOptions,
) -> Result<NormEstimate> {
    let src = factor(w_src, p, convention, 1.0);
    let dst = factor(w_dst, p, convention, 1.0);
    let ratio = |f: &VectorField| -> Result<f64> {
        let den = src.apply(f)?.lp_norm(p);
        if den == 0.0 {
            return Ok(0.0);
        }
        Ok(dst.apply(&t.apply(f)?)?.lp_norm(p) / den)
    };
    let (domain, n) = (*w_src.domain(), w_src.dim());
    let results = (0..opts.probes.max(1))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
            let mut f = VectorField::random(&mut rng, domain, n);
            let mut best = ratio(&f)?;
            let mut step = 0.5;
            let size = f.data().iter().fold(0.0f64, |m, z| m.max(z.norm()));
            for _ in 0..opts.refinement_steps {
                let i = rng.gen_range(0..f.data().len());
                let delta =
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (step * size);
                let mut g = f.clone();
                g.data_mut()[i] += delta;
                let r = ratio(&g)?;
                if r > best {
                    best = r;
                    f = g;
                    step *= 1.2;
                } else {
                    step *= 0.7;
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    let estimate = results.iter().cloned().fold(0.0, f64::max);
    Ok(NormEstimate {
        estimate,
        certificate: Certificate::LowerBound,
        iterations: opts.probes * (opts.refinement_steps + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_top_matches_closed_form() {
        // tridiag(-1, 2, -1) of size m: top eigenvalue 2 + 2 cos(pi/(m+1))
        let m = 12;
        let alpha = vec![2.0; m];
        let beta = vec![-1.0; m - 1];
        let top = tridiagonal_top(&alpha, &beta);
        let want = 2.0 + 2.0 * (std::f64::consts::PI / (m as f64 + 1.0)).cos();
        assert!((top - want).abs() < 1e-12);
        let y = tridiagonal_vector(&alpha, &beta, top);
        // residual of T y = top y
        for i in 0..m {
            let mut ty = alpha[i] * y[i];
            if i > 0 {
                ty += beta[i - 1] * y[i - 1];
            }
            if i + 1 < m {
                ty += beta[i] * y[i + 1];
            }
            assert!((ty - top * y[i]).abs() < 1e-9);
        }
    }
}
