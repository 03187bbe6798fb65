use serde::{Deserialize, Serialize};

use super::couple::CoupleSpec;
use super::functionals::{functional_sweep, RealMethod};
use crate::error::{MwlError, Result};
use crate::fields::VectorField;

/// Geometric grid `t_min ..= t_max` with `points` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        LogGrid {
            t_min: 1e-6,
            t_max: 1e6,
            points: 241,
        }
    }
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite() && points >= 3) {
            return Err(MwlError::InvalidParameter(format!(
                "log grid needs 0 < t_min < t_max and at least 3 points: {t_min}, {t_max}, {points}"
            )));
        }
        Ok(LogGrid {
            t_min,
            t_max,
            points,
        })
    }

    /// `s_i = ln t_i`, evenly spaced.
    pub fn log_values(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let m = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let w = i as f64 / m;
                a * (1.0 - w) + b * w
            })
            .collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_values().into_iter().map(f64::exp).collect()
    }

    pub fn log_step(&self) -> f64 {
        (self.t_max.ln() - self.t_min.ln()) / (self.points - 1) as f64
    }

    /// Index of the node `t = 1`, if the grid has one.
    pub fn one_index(&self) -> Option<usize> {
        let tol = 1e-9 * self.log_step();
        self.log_values().iter().position(|s| s.abs() <= tol)
    }
}

/// `Phi_{theta,q}(g) = (int (t^{-theta} g(t))^q dt/t)^{1/q}` for `g` sampled on `grid`.
///
/// Between nodes `t^{-theta} g` is taken log-linear, which is exact for power laws, and the
/// tails beyond the grid continue the power law of the two outermost nodes. `theta` may be any
/// real index.
pub fn phi_norm(theta: f64, q: f64, g: &[f64], grid: &LogGrid) -> Result<f64> {
    if g.len() != grid.points {
        return Err(MwlError::DimensionMismatch {
            expected: grid.points,
            found: g.len(),
        });
    }
    if !(q >= 1.0) {
        return Err(MwlError::InvalidParameter(format!("q = {q} must be >= 1")));
    }
    if g.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(MwlError::InvalidParameter(
            "sampled function must be finite and nonnegative".into(),
        ));
    }
    let s = grid.log_values();
    let ds = grid.log_step();
    // l_i = ln(t_i^{-theta} g_i)
    let l: Vec<f64> = g.iter().zip(&s).map(|(v, s)| v.ln() - theta * s).collect();
    let m = l.len();
    let tol = 1e-9;
    let left_slope = (l[1] - l[0]) / ds;
    let right_slope = (l[m - 1] - l[m - 2]) / ds;
    if l[0].is_finite() && !(left_slope > tol) {
        return Err(MwlError::Divergent(format!(
            "Phi lower tail: log-slope {left_slope:.3e} <= 0"
        )));
    }
    if l[m - 1].is_finite() && !(right_slope < -tol) {
        return Err(MwlError::Divergent(format!(
            "Phi upper tail: log-slope {right_slope:.3e} >= 0"
        )));
    }
    let top = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(top.exp());
    }
    // integrand relative to e^{q top}
    let e: Vec<f64> = l.iter().map(|x| (q * (x - top)).exp()).collect();
    let mut total = 0.0;
    for i in 0..m - 1 {
        let (a, b) = (e[i], e[i + 1]);
        total += if a > 0.0 && b > 0.0 {
            let lam = q * (l[i + 1] - l[i]);
            if lam.abs() < 1e-8 {
                ds * a * (1.0 + 0.5 * lam)
            } else {
                ds * a * lam.exp_m1() / lam
            }
        } else {
            0.5 * ds * (a + b)
        };
    }
    if e[0] > 0.0 {
        total += e[0] / (q * left_slope);
    }
    if e[m - 1] > 0.0 {
        total += e[m - 1] / (-q * right_slope);
    }
    Ok(top.exp() * total.powf(1.0 / q))
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(MwlError::InvalidParameter(format!(
            "theta = {theta} must lie in (0, 1)"
        )))
    }
}

/// `|f|_{theta,q} = Phi_{theta,q}(K(., f))`, or for the E-method
/// `(Phi_{1/(theta-alpha), q(alpha-theta)}(E_alpha(., f)))^{alpha-theta}`.
pub fn real_interp_norm(
    f: &VectorField,
    couple: &CoupleSpec,
    theta: f64,
    q: f64,
    method: RealMethod,
    grid: &LogGrid,
) -> Result<f64> {
    check_theta(theta)?;
    let values = functional_sweep(f, couple, grid, method)?;
    if values.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    match method {
        RealMethod::K => phi_norm(theta, q, &values, grid),
        RealMethod::E { alpha } => {
            let e = alpha - theta;
            Ok(phi_norm(-1.0 / e, q * e, &values, grid)?.powf(e))
        }
    }
}
