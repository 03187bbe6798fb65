use serde::{Deserialize, Serialize};

use super::couple::{CoupleSpec, Decomposition};
use super::frontier::{monotone_root, Frontier, Root, NU_MIN};
use super::grid::LogGrid;
use crate::error::{MwlError, Result};
use crate::fields::{lp_of_pointwise, VectorField};
use crate::linalg::C64;

/// Largest accepted ratio between the K value and its dual lower bound.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RealMethod {
    K,
    E { alpha: f64 },
}

impl RealMethod {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RealMethod::K => Ok(()),
            RealMethod::E { alpha } if alpha >= 1.0 && alpha.is_finite() => Ok(()),
            RealMethod::E { alpha } => Err(MwlError::InvalidParameter(format!(
                "alpha = {alpha} must be >= 1"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Split {
    Zero,
    Full,
    At(f64),
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Evaluation {
    pub value: f64,
    /// Dual lower bound (K only).
    pub lower: Option<f64>,
    pub split: Split,
}

impl Evaluation {
    fn hint(&self) -> Option<f64> {
        match self.split {
            Split::At(nu) => Some(nu),
            _ => None,
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(MwlError::InvalidParameter(format!(
            "t = {t} must be positive and finite"
        )))
    }
}

fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Optimizer state for one `f`, normalized to unit `L^2` norm.
pub(crate) struct Solver<'a> {
    couple: &'a CoupleSpec,
    f: &'a VectorField,
    scale: f64,
    u: Vec<C64>,
    frontier: Option<Frontier>,
    full0: f64,
    full1: f64,
}

impl<'a> Solver<'a> {
    pub fn new(f: &'a VectorField, couple: &'a CoupleSpec) -> Result<Self> {
        couple.check(f)?;
        let scale = f.l2_norm();
        let n = couple.dim();
        let h = couple.domain().h();
        if scale == 0.0 {
            return Ok(Solver {
                couple,
                f,
                scale,
                u: vec![],
                frontier: None,
                full0: 0.0,
                full1: 0.0,
            });
        }
        let u = couple.to_diagonal(&f.scale_real(1.0 / scale));
        let d = couple.diagonal();
        let (n0, n1): (Vec<f64>, Vec<f64>) = u
            .chunks(n)
            .zip(d.chunks(n))
            .map(|(x, dd)| {
                let a: f64 = x.iter().map(|z| z.norm_sqr()).sum();
                let b: f64 = x.iter().zip(dd).map(|(z, d)| z.norm_sqr() * d * d).sum();
                (a.sqrt(), b.sqrt())
            })
            .unzip();
        let full0 = lp_of_pointwise(&n0, couple.p0, h);
        let full1 = lp_of_pointwise(&n1, couple.p1, h);
        let frontier = Frontier::new(&u, d, n, h, couple.p0, couple.p1);
        Ok(Solver {
            couple,
            f,
            scale,
            u,
            frontier: Some(frontier),
            full0,
            full1,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.frontier.is_none()
    }

    pub fn eval(&self, method: RealMethod, t: f64, hint: Option<f64>) -> Result<Evaluation> {
        match method {
            RealMethod::K => self.k(t, hint),
            RealMethod::E { alpha } if alpha == 1.0 => Ok(self.e1(t, hint)),
            RealMethod::E { alpha } => Ok(self.e_alpha(t, alpha, hint)),
        }
    }

    fn g_of(&self, split: Split) -> Vec<C64> {
        match split {
            Split::Zero => vec![C64::new(0.0, 0.0); self.u.len()],
            Split::Full => self.u.clone(),
            Split::At(nu) => self.frontier.as_ref().expect("nonzero input").split(nu),
        }
    }

    pub fn decomposition(&self, split: Split) -> Decomposition {
        let f = self.f;
        let x0 = match split {
            _ if self.is_zero() => VectorField::zeros(*f.domain(), f.dim()),
            Split::Zero => VectorField::zeros(*f.domain(), f.dim()),
            Split::Full => f.clone(),
            Split::At(_) => self
                .couple
                .from_diagonal(&self.g_of(split))
                .scale_real(self.scale),
        };
        Decomposition::from_x0(f, x0)
    }

    fn k(&self, t: f64, hint: Option<f64>) -> Result<Evaluation> {
        let Some(fr) = &self.frontier else {
            return Ok(Evaluation {
                value: 0.0,
                lower: Some(0.0),
                split: Split::Zero,
            });
        };
        let lt = t.ln();
        let (root, iterations) = monotone_root(|nu| fr.eval(nu).ln_slope - lt, hint);
        let mut best = (t * self.full1, Split::Zero);
        if self.full0 < best.0 {
            best = (self.full0, Split::Full);
        }
        if let Root::At { best: nu, .. } = root {
            let p = fr.eval(nu);
            let v = p.ln_a.exp() + t * p.ln_b.exp();
            if v < best.0 {
                best = (v, Split::At(nu));
            }
        }
        let lower = self.dual_bound(t, best.1);
        let ratio = best.0 / lower;
        if !(ratio <= 1.0 + CERTIFICATE_TOLERANCE) {
            return Err(MwlError::OptimizerNonConvergence { ratio, iterations });
        }
        Ok(Evaluation {
            value: best.0 * self.scale,
            lower: Some(lower.min(best.0) * self.scale),
            split: best.1,
        })
    }

    /// `|<u, G>| / max(|G|_{0*}, |G|_{1*} / t)` for two gradient-based choices of `G`.
    fn dual_bound(&self, t: f64, split: Split) -> f64 {
        let couple = self.couple;
        let (p0, p1, n, h) = (couple.p0, couple.p1, couple.dim(), couple.domain().h());
        let d = couple.diagonal();
        let g = self.g_of(split);
        let r: Vec<C64> = self.u.iter().zip(&g).map(|(u, g)| u - g).collect();
        let pointwise = |v: &[C64], weight: &dyn Fn(usize) -> f64| -> Vec<f64> {
            v.chunks(n)
                .enumerate()
                .map(|(i, x)| {
                    x.iter()
                        .enumerate()
                        .map(|(j, z)| z.norm_sqr() * weight(i * n + j).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        };
        let gn = pointwise(&g, &|_| 1.0);
        let rn = pointwise(&r, &|k| d[k]);
        let a = lp_of_pointwise(&gn, p0, h);
        let b = lp_of_pointwise(&rn, p1, h);
        // gradient of a at g, and t times the gradient of b at r, at point i
        let grad_a = |i: usize, out: &mut [C64]| {
            let c = a.powf(1.0 - p0) * gn[i].powf(p0 - 2.0);
            for j in 0..n {
                out[j] = g[i * n + j] * c;
            }
        };
        let grad_b = |i: usize, out: &mut [C64]| {
            let c = t * b.powf(1.0 - p1) * rn[i].powf(p1 - 2.0);
            for j in 0..n {
                let k = i * n + j;
                out[j] = r[k] * (c * d[k] * d[k]);
            }
        };
        let mut best: f64 = 0.0;
        for primary_a in [true, false] {
            if (primary_a && a == 0.0) || (!primary_a && b == 0.0) {
                continue;
            }
            let mut big_g = vec![C64::new(0.0, 0.0); g.len()];
            for i in 0..gn.len() {
                let out = &mut big_g[i * n..(i + 1) * n];
                let (use_a, use_b) = (gn[i] > 0.0 && a > 0.0, rn[i] > 0.0 && b > 0.0);
                if primary_a {
                    if use_a {
                        grad_a(i, out);
                    } else if p0 == 1.0 && use_b {
                        grad_b(i, out);
                    }
                } else if use_b {
                    grad_b(i, out);
                } else if p1 == 1.0 && use_a {
                    grad_a(i, out);
                }
            }
            let pair: C64 = self
                .u
                .iter()
                .zip(&big_g)
                .map(|(u, g)| u * g.conj())
                .sum::<C64>()
                * h;
            let n0 = lp_of_pointwise(&pointwise(&big_g, &|_| 1.0), dual_exponent(p0), h);
            let n1 = lp_of_pointwise(&pointwise(&big_g, &|k| 1.0 / d[k]), dual_exponent(p1), h);
            let denom = n0.max(n1 / t);
            if denom > 0.0 {
                best = best.max(pair.norm() / denom);
            }
        }
        best
    }

    fn e1(&self, t: f64, hint: Option<f64>) -> Evaluation {
        let tau = t / self.scale;
        let Some(fr) = &self.frontier else {
            return Evaluation {
                value: 0.0,
                lower: None,
                split: Split::Zero,
            };
        };
        if self.full1 <= tau {
            return Evaluation {
                value: 0.0,
                lower: None,
                split: Split::Zero,
            };
        }
        let lt = tau.ln();
        let (root, _) = monotone_root(|nu| lt - fr.eval(nu).ln_b, hint);
        let (value, split) = match root {
            Root::Above => (self.full0 / tau, Split::Full),
            Root::Below => (fr.eval(NU_MIN).ln_a.exp() / tau, Split::At(NU_MIN)),
            Root::At { hi, .. } => (fr.eval(hi).ln_a.exp() / tau, Split::At(hi)),
        };
        Evaluation {
            value,
            lower: None,
            split,
        }
    }

    fn e_alpha(&self, t: f64, alpha: f64, hint: Option<f64>) -> Evaluation {
        let tau = t / self.scale;
        let Some(fr) = &self.frontier else {
            return Evaluation {
                value: 0.0,
                lower: None,
                split: Split::Zero,
            };
        };
        let lt = tau.ln();
        let (e0, e1) = (1.0 / alpha, 1.0 / (alpha - 1.0));
        let level = |ln_a: f64, ln_b: f64| ((ln_a - lt) * e0).exp().max(((ln_b - lt) * e1).exp());
        let (root, _) = monotone_root(
            |nu| {
                let p = fr.eval(nu);
                (p.ln_a - lt) * e0 - (p.ln_b - lt) * e1
            },
            hint,
        );
        let mut best = (level(f64::NEG_INFINITY, self.full1.ln()), Split::Zero);
        let full = level(self.full0.ln(), f64::NEG_INFINITY);
        if full < best.0 {
            best = (full, Split::Full);
        }
        if let Root::At { best: nu, .. } = root {
            let p = fr.eval(nu);
            let v = level(p.ln_a, p.ln_b);
            if v < best.0 {
                best = (v, Split::At(nu));
            }
        }
        Evaluation {
            value: best.0,
            lower: None,
            split: best.1,
        }
    }
}

/// K-functional value with its certifying lower bound.
#[derive(Clone, Debug)]
pub struct KValue {
    pub value: f64,
    pub lower_bound: f64,
    pub decomposition: Decomposition,
}

pub fn k_functional_certified(t: f64, f: &VectorField, couple: &CoupleSpec) -> Result<KValue> {
    check_t(t)?;
    let s = Solver::new(f, couple)?;
    let e = s.k(t, None)?;
    Ok(KValue {
        value: e.value,
        lower_bound: e.lower.unwrap_or(0.0),
        decomposition: s.decomposition(e.split),
    })
}

/// `K(t, f) = inf |x0|_0 + t |x1|_1`.
pub fn k_functional(t: f64, f: &VectorField, couple: &CoupleSpec) -> Result<(f64, Decomposition)> {
    let k = k_functional_certified(t, f, couple)?;
    Ok((k.value, k.decomposition))
}

/// `E_alpha(t, f)`; `alpha = 1` is the constrained form.
pub fn e_functional(
    t: f64,
    f: &VectorField,
    couple: &CoupleSpec,
    alpha: f64,
) -> Result<(f64, Decomposition)> {
    check_t(t)?;
    let method = RealMethod::E { alpha };
    method.validate()?;
    let s = Solver::new(f, couple)?;
    let e = s.eval(method, t, None)?;
    Ok((e.value, s.decomposition(e.split)))
}

pub fn functional_value(
    t: f64,
    f: &VectorField,
    couple: &CoupleSpec,
    method: RealMethod,
) -> Result<f64> {
    check_t(t)?;
    method.validate()?;
    Solver::new(f, couple)?
        .eval(method, t, None)
        .map(|e| e.value)
}

/// Near-optimal decomposition, checked against its sandwich inequalities.
pub fn selector(
    t: f64,
    f: &VectorField,
    couple: &CoupleSpec,
    method: RealMethod,
    eps: f64,
) -> Result<Decomposition> {
    check_t(t)?;
    method.validate()?;
    if !(eps > 0.0) {
        return Err(MwlError::InvalidParameter(format!(
            "eps = {eps} must be positive"
        )));
    }
    let s = Solver::new(f, couple)?;
    let e = s.eval(method, t, None)?;
    let dec = s.decomposition(e.split);
    let n0 = couple.norm0(&dec.x0)?;
    let n1 = couple.norm1(&dec.x1)?;
    let slack = 1e-9;
    let violation = |lower: f64, value: f64, upper: f64| MwlError::SandwichViolation {
        lower,
        value,
        upper,
    };
    match method {
        RealMethod::K => {
            let lower = e.lower.unwrap_or(0.0);
            let value = n0 + t * n1;
            let upper = (1.0 + eps) * lower;
            if !(value >= lower * (1.0 - slack) && value <= upper * (1.0 + slack)) {
                return Err(violation(lower, value, upper));
            }
        }
        RealMethod::E { alpha } => {
            let upper = s.eval(method, t / (1.0 + eps), None)?.value;
            let value = if alpha == 1.0 {
                if n1 > t * (1.0 + slack) {
                    return Err(violation(0.0, n1, t));
                }
                n0 / t
            } else {
                (n0 / t)
                    .powf(1.0 / alpha)
                    .max((n1 / t).powf(1.0 / (alpha - 1.0)))
            };
            let tol = slack * (1.0 + e.value);
            if !(value >= e.value - tol && value <= upper + tol) {
                return Err(violation(e.value, value, upper));
            }
        }
    }
    Ok(dec)
}

/// Visits the functional along the grid in increasing `t`, warm-starting each root search.
pub(crate) fn sweep_with(
    f: &VectorField,
    couple: &CoupleSpec,
    grid: &LogGrid,
    method: RealMethod,
    mut visit: impl FnMut(usize, f64, &Evaluation, &Solver) -> Result<()>,
) -> Result<()> {
    method.validate()?;
    let s = Solver::new(f, couple)?;
    let mut hint = None;
    for (i, t) in grid.values().into_iter().enumerate() {
        let e = s.eval(method, t, hint)?;
        hint = e.hint().or(hint);
        visit(i, t, &e, &s)?;
    }
    Ok(())
}

/// Functional values on every grid point.
pub fn functional_sweep(
    f: &VectorField,
    couple: &CoupleSpec,
    grid: &LogGrid,
    method: RealMethod,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.points);
    sweep_with(f, couple, grid, method, |_, _, e, _| {
        out.push(e.value);
        Ok(())
    })?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub k: f64,
    pub e: f64,
}

/// `(t, K(t), E_alpha(t))` rows.
pub fn sweep_table(
    f: &VectorField,
    couple: &CoupleSpec,
    grid: &LogGrid,
    alpha: f64,
) -> Result<Vec<SweepRow>> {
    let k = functional_sweep(f, couple, grid, RealMethod::K)?;
    let e = functional_sweep(f, couple, grid, RealMethod::E { alpha })?;
    Ok(grid
        .values()
        .into_iter()
        .zip(k)
        .zip(e)
        .map(|((t, k), e)| SweepRow { t, k, e })
        .collect())
}
