use serde::{Deserialize, Serialize};

use crate::error::{MwlError, Result};
use crate::fields::{lp_of_pointwise, ScalarField, VectorField};

/// Two-sided bounds; `lower == upper` when the value is exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
}

impl NormBounds {
    pub fn exact(v: f64) -> Self {
        NormBounds { lower: v, upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

fn check_positive(field: &ScalarField, what: &str) -> Result<()> {
    match field
        .values()
        .iter()
        .position(|v| !(*v > 0.0 && v.is_finite()))
    {
        Some(i) => Err(MwlError::InvalidParameter(format!(
            "{what} must be positive: value {} at index {i}",
            field.values()[i]
        ))),
        None => Ok(()),
    }
}

/// `L^{p,q}(eta dx)(eta')`: the Lorentz norm of `|eta' f|` for the measure `eta dx`.
///
/// The decreasing rearrangement of a cell function is piecewise constant, so the
/// integral `int (s^{1/p} f*(s))^q ds/s` is evaluated exactly.
pub fn lorentz_norm(
    f: &VectorField,
    p: f64,
    q: f64,
    density: &ScalarField,
    outer: &ScalarField,
) -> Result<f64> {
    f.domain().check_same(density.domain())?;
    f.domain().check_same(outer.domain())?;
    check_positive(density, "density")?;
    check_positive(outer, "outer weight")?;
    if !(p >= 1.0 && p.is_finite() && q >= 1.0) {
        return Err(MwlError::InvalidParameter(format!(
            "Lorentz exponents p = {p}, q = {q}"
        )));
    }
    let h = f.domain().h();
    let mut cells: Vec<(f64, f64)> = f
        .pointwise_norms()
        .iter()
        .zip(outer.values())
        .zip(density.values())
        .map(|((v, w), eta)| (v * w, eta * h))
        .filter(|(v, _)| *v > 0.0)
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut s = 0.0;
    if q.is_infinite() {
        let mut best: f64 = 0.0;
        for (v, m) in cells {
            s += m;
            best = best.max(v * s.powf(1.0 / p));
        }
        return Ok(best);
    }
    let top = cells.first().map_or(0.0, |c| c.0);
    if top == 0.0 {
        return Ok(0.0);
    }
    let r = q / p;
    let mut total = 0.0;
    for (v, m) in cells {
        let next = s + m;
        total += (v / top).powf(q) * (next.powf(r) - s.powf(r));
        s = next;
    }
    Ok(top * (total / r).powf(1.0 / q))
}

/// Cells grouped by weight value: ascending `(value, sum |f|^p w^{theta p} h)`.
fn weight_levels(f: &VectorField, w: &ScalarField, p: f64, theta: f64) -> Vec<(f64, f64)> {
    let h = f.domain().h();
    let mut cells: Vec<(f64, f64)> = f
        .pointwise_norms()
        .iter()
        .zip(w.values())
        .map(|(v, w)| (*w, (v * w.powf(theta)).powf(p) * h))
        .filter(|c| c.1 > 0.0)
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (v, c) in cells {
        match out.last_mut() {
            Some(last) if (v - last.0).abs() <= 1e-12 * v => last.1 += c,
            _ => out.push((v, c)),
        }
    }
    out
}

/// `(sum C_k phi(v_k)^r)^{1/p}` for one member of the family.
fn family_value(levels: &[(f64, f64)], r: f64, p: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for &(v, c) in levels {
        let x = phi(v);
        total += if x > 0.0 {
            c * x.powf(r)
        } else if r < 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
    }
    total.powf(1.0 / p)
}

/// Bounds for the Beurling norm `inf (gamma < 0) / sup (gamma > 0)` over `phi` of
/// `|f w^theta (phi o w)^gamma|_p`, `gamma = 1/p - 1/q`.
///
/// One side comes from the two-parameter family `phi = C (t/a)^kappa` below `a` and
/// `C (a/t)^kappa'` above, on the nested grid of `m + 1` log-spaced `a` between the extreme
/// weight values. The other comes from relaxing the admissibility constraint to the minimal mass
/// `phi` needs between consecutive weight values, which leaves a separable convex problem.
pub fn beurling_norm_approx(
    f: &VectorField,
    p: f64,
    q: f64,
    theta: f64,
    w: &ScalarField,
    m: usize,
) -> Result<NormBounds> {
    f.domain().check_same(w.domain())?;
    check_positive(w, "weight")?;
    if !(p >= 1.0 && p.is_finite() && q >= 1.0 && theta > 0.0 && theta < 1.0 && m >= 1) {
        return Err(MwlError::InvalidParameter(format!(
            "Beurling parameters p = {p}, q = {q}, theta = {theta}, m = {m}"
        )));
    }
    let gamma = 1.0 / p - 1.0 / q;
    let levels = weight_levels(f, w, p, theta);
    if levels.is_empty() {
        return Ok(NormBounds::exact(0.0));
    }
    if gamma == 0.0 {
        let total: f64 = levels.iter().map(|l| l.1).sum();
        return Ok(NormBounds::exact(total.powf(1.0 / p)));
    }
    let r = gamma * p;
    let beta = theta / gamma.abs();
    let k = levels.len();
    // minimal mass per unit of phi(v_k)
    let delta: Vec<f64> = (0..k)
        .map(|i| {
            let ratio = if gamma < 0.0 {
                if i == 0 {
                    0.0
                } else {
                    levels[i - 1].0 / levels[i].0
                }
            } else if i + 1 == k {
                0.0
            } else {
                levels[i].0 / levels[i + 1].0
            };
            -(beta * ratio.ln()).exp_m1() / beta
        })
        .collect();
    let relaxed = if r == 1.0 {
        levels
            .iter()
            .zip(&delta)
            .map(|(l, d)| l.1 / d)
            .fold(0.0, f64::max)
            .powf(1.0 / p)
    } else {
        let e = 1.0 / (1.0 - r);
        let s: f64 = levels
            .iter()
            .zip(&delta)
            .map(|(l, d)| d * (l.1 / d).powf(e))
            .sum();
        s.powf((1.0 - r) / p)
    };
    let (vmin, vmax) = (levels[0].0, levels[k - 1].0);
    let kappas = [0.25, 0.5, 1.0, 2.0, 4.0].map(|c| c * beta);
    let mut family = if gamma < 0.0 { f64::INFINITY } else { 0.0 };
    for j in 0..=m {
        let a = vmin * (vmax / vmin).powf(j as f64 / m as f64);
        for kappa in kappas.iter().cloned().chain([f64::INFINITY]) {
            let c = if kappa.is_infinite() {
                beta
            } else {
                beta * kappa / (beta + kappa)
            };
            let phi = |t: f64| {
                if gamma < 0.0 {
                    // t^{-beta} phi decreasing
                    if t <= a {
                        c * (t / a).powf(beta)
                    } else if kappa.is_infinite() {
                        0.0
                    } else {
                        c * (a / t).powf(kappa)
                    }
                } else if t >= a {
                    // t^{beta} phi increasing
                    c * (a / t).powf(beta)
                } else if kappa.is_infinite() {
                    0.0
                } else {
                    c * (t / a).powf(kappa)
                }
            };
            let v = family_value(&levels, r, p, phi);
            family = if gamma < 0.0 {
                family.min(v)
            } else {
                family.max(v)
            };
        }
    }
    Ok(if gamma < 0.0 {
        NormBounds {
            lower: relaxed.min(family),
            upper: family,
        }
    } else {
        NormBounds {
            lower: family,
            upper: relaxed.max(family),
        }
    })
}

/// `L(D; p0; p1; q; theta)`: per-coordinate Lorentz (`p0 != p1`) or Beurling (`p0 = p1`) norms
/// combined in `l^q`; for `q = p_theta` the exact `L^q(D^theta)` norm.
pub fn l_space_norm(
    f: &VectorField,
    diag: &[ScalarField],
    p0: f64,
    p1: f64,
    q: f64,
    theta: f64,
    family_size: usize,
) -> Result<NormBounds> {
    if diag.len() != f.dim() {
        return Err(MwlError::DimensionMismatch {
            expected: f.dim(),
            found: diag.len(),
        });
    }
    if !(theta > 0.0 && theta < 1.0 && p0 >= 1.0 && p1 >= 1.0 && q >= 1.0) {
        return Err(MwlError::InvalidParameter(format!(
            "p0 = {p0}, p1 = {p1}, q = {q}, theta = {theta}"
        )));
    }
    let p_theta = 1.0 / ((1.0 - theta) / p0 + theta / p1);
    let domain = *f.domain();
    if (q - p_theta).abs() <= 1e-12 * p_theta {
        let norms: Vec<f64> = (0..f.len())
            .map(|i| {
                f.point(i)
                    .iter()
                    .zip(diag)
                    .map(|(z, d)| z.norm_sqr() * d.values()[i].powf(2.0 * theta))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        return Ok(NormBounds::exact(lp_of_pointwise(&norms, q, domain.h())));
    }
    let mut parts = Vec::with_capacity(diag.len());
    for (j, d) in diag.iter().enumerate() {
        let comp = VectorField::from_data(domain, 1, f.component(j))?;
        let b = if p0 == p1 {
            beurling_norm_approx(&comp, p0, q, theta, d, family_size)?
        } else {
            let density = d.map(|w| w.powf(-p0 * p1 / (p1 - p0)));
            let outer = d.map(|w| w.powf(p1 / (p1 - p0)));
            NormBounds::exact(lorentz_norm(&comp, p_theta, q, &density, &outer)?)
        };
        parts.push(b);
    }
    let lower: Vec<f64> = parts.iter().map(|b| b.lower).collect();
    let upper: Vec<f64> = parts.iter().map(|b| b.upper).collect();
    Ok(NormBounds {
        lower: lp_of_pointwise(&lower, q, 1.0),
        upper: lp_of_pointwise(&upper, q, 1.0),
    })
}
