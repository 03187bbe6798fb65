//! Pareto frontier of `(|x0|_0, |x1|_1)` for the diagonal couple `(L^{p0}, L^{p1}(D))`.
//!
//! For `mu = e^nu` the minimizer of `|g|_{p0}^{p0} + mu |D(u - g)|_{p1}^{p1}` is pointwise
//! `g_j = s_j u_j` with `s_j = kappa d_j^2 / (1 + kappa d_j^2)` for one `kappa` per point.

use crate::linalg::C64;

pub(crate) const NU_MIN: f64 = -200.0;
pub(crate) const NU_MAX: f64 = 200.0;

const LEVEL_LIMIT: f64 = 1e5;
const LEVEL_MARGIN: f64 = 40.0;

#[derive(Clone, Copy, Debug)]
enum Mode {
    /// `p0 = p1 = 2`: `kappa = mu`.
    Quadratic,
    /// `n = 1`, `p0 = p1 = p`.
    EqualScalar(f64),
    General,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct FrontierPoint {
    pub ln_a: f64,
    pub ln_b: f64,
    /// `ln` of the tangent `t` at which this point minimizes `a + t b`.
    pub ln_slope: f64,
}

pub(crate) struct Frontier {
    p0: f64,
    p1: f64,
    ln_h: f64,
    n: usize,
    u: Vec<C64>,
    lnu2: Vec<f64>,
    lnd: Vec<f64>,
    active: Vec<bool>,
    mode: Mode,
}

pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln sum exp(x_i)`; `-inf` for an empty or all `-inf` input.
pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl Frontier {
    pub fn new(u: &[C64], diag: &[f64], n: usize, h: f64, p0: f64, p1: f64) -> Self {
        let lnu2: Vec<f64> = u.iter().map(|z| z.norm_sqr().ln()).collect();
        let active = (0..u.len() / n)
            .map(|i| {
                lnu2[i * n..(i + 1) * n]
                    .iter()
                    .any(|&l| l > f64::NEG_INFINITY)
            })
            .collect();
        let mode = if p0 == 2.0 && p1 == 2.0 {
            Mode::Quadratic
        } else if n == 1 && p0 == p1 {
            Mode::EqualScalar(p0)
        } else {
            Mode::General
        };
        Frontier {
            p0,
            p1,
            ln_h: h.ln(),
            n,
            u: u.to_vec(),
            lnu2,
            lnd: diag.iter().map(|d| d.ln()).collect(),
            active,
            mode,
        }
    }

    pub fn points(&self) -> usize {
        self.active.len()
    }

    /// `ln kappa` at point `i`, possibly infinite.
    fn level(&self, i: usize, nu: f64) -> f64 {
        let n = self.n;
        match self.mode {
            Mode::Quadratic => nu,
            Mode::EqualScalar(p) => {
                let lnd = self.lnd[i];
                let x = if p > 1.0 {
                    (nu + p * lnd) / (p - 1.0)
                } else {
                    match (nu + lnd).partial_cmp(&0.0) {
                        Some(std::cmp::Ordering::Greater) => f64::INFINITY,
                        Some(std::cmp::Ordering::Less) => f64::NEG_INFINITY,
                        _ => 0.0,
                    }
                };
                x - 2.0 * lnd
            }
            Mode::General => self.solve_level(
                &self.lnu2[i * n..(i + 1) * n],
                &self.lnd[i * n..(i + 1) * n],
                nu,
            ),
        }
    }

    /// Root of `ln p0 + l + (p0-2) ln A - nu - ln p1 - (p1-2) ln B`, which increases in `l`.
    fn solve_level(&self, lnu2: &[f64], lnd: &[f64], nu: f64) -> f64 {
        let (p0, p1) = (self.p0, self.p1);
        let c = p0.ln() - nu - p1.ln();
        let eval = |l: f64| {
            // log-space sums, so deep levels do not underflow
            let terms = || {
                lnu2.iter()
                    .zip(lnd)
                    .filter(|(lu, _)| **lu > f64::NEG_INFINITY)
                    .map(|(&lu, &ld)| {
                        let x = l + 2.0 * ld;
                        (lu, ld, -softplus(-x), -softplus(x))
                    })
            };
            let ta: Vec<(f64, f64)> = terms()
                .map(|(lu, _, ls, lr)| (lu + 2.0 * ls, lr.exp()))
                .collect();
            let tb: Vec<(f64, f64)> = terms()
                .map(|(lu, ld, ls, lr)| (lu + 2.0 * ld + 2.0 * lr, ls.exp()))
                .collect();
            let ln_a2 = log_sum_exp(ta.iter().map(|x| x.0));
            let ln_b2 = log_sum_exp(tb.iter().map(|x| x.0));
            let mean =
                |t: &[(f64, f64)], m: f64| t.iter().map(|(w, v)| (w - m).exp() * v).sum::<f64>();
            let f = c + l + 0.5 * (p0 - 2.0) * ln_a2 - 0.5 * (p1 - 2.0) * ln_b2;
            let df = 1.0 + (p0 - 2.0) * mean(&ta, ln_a2) + (p1 - 2.0) * mean(&tb, ln_b2);
            (f, df)
        };
        let dmax = lnd.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let dmin = lnd.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut lo = -2.0 * dmax - LEVEL_MARGIN;
        let mut hi = -2.0 * dmin + LEVEL_MARGIN;
        let mut step = LEVEL_MARGIN;
        while eval(lo).0 >= 0.0 {
            if step > LEVEL_LIMIT {
                return f64::NEG_INFINITY;
            }
            hi = hi.min(lo);
            lo -= step;
            step *= 2.0;
        }
        step = LEVEL_MARGIN;
        while eval(hi).0 <= 0.0 {
            if step > LEVEL_LIMIT {
                return f64::INFINITY;
            }
            lo = lo.max(hi);
            hi += step;
            step *= 2.0;
        }
        let mut l = nu.clamp(lo, hi);
        for _ in 0..200 {
            let (f, df) = eval(l);
            if f == 0.0 {
                return l;
            }
            if f < 0.0 {
                lo = l;
            } else {
                hi = l;
            }
            let newton = l - f / df;
            let next = if df > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - l).abs() <= 1e-13 * (1.0 + l.abs()) || hi - lo <= 1e-13 * (1.0 + l.abs()) {
                return next;
            }
            l = next;
        }
        l
    }

    pub fn eval(&self, nu: f64) -> FrontierPoint {
        let n = self.n;
        let mut la = Vec::with_capacity(self.points());
        let mut lb = Vec::with_capacity(self.points());
        for i in 0..self.points() {
            if !self.active[i] {
                continue;
            }
            let l = self.level(i, nu);
            let lnu2 = &self.lnu2[i * n..(i + 1) * n];
            let lnd = &self.lnd[i * n..(i + 1) * n];
            let terms_a = lnu2
                .iter()
                .zip(lnd)
                .map(|(&lu, &ld)| lu - 2.0 * softplus(-(l + 2.0 * ld)));
            let terms_b = lnu2
                .iter()
                .zip(lnd)
                .map(|(&lu, &ld)| lu + 2.0 * ld - 2.0 * softplus(l + 2.0 * ld));
            la.push(0.5 * log_sum_exp(terms_a));
            lb.push(0.5 * log_sum_exp(terms_b));
        }
        let ln_a = (self.ln_h + log_sum_exp(la.iter().map(|x| self.p0 * x))) / self.p0;
        let ln_b = (self.ln_h + log_sum_exp(lb.iter().map(|x| self.p1 * x))) / self.p1;
        let ln_slope = if ln_a == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else if ln_b == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            nu + self.p1.ln() - self.p0.ln() + (self.p1 - 1.0) * ln_b - (self.p0 - 1.0) * ln_a
        };
        FrontierPoint {
            ln_a,
            ln_b,
            ln_slope,
        }
    }

    /// The `X0` part `g = s u` of the minimizer at `nu`.
    pub fn split(&self, nu: f64) -> Vec<C64> {
        let n = self.n;
        let mut g = vec![C64::new(0.0, 0.0); self.u.len()];
        for i in 0..self.points() {
            if !self.active[i] {
                continue;
            }
            let l = self.level(i, nu);
            for j in 0..n {
                let k = i * n + j;
                g[k] = self.u[k] * logistic(l + 2.0 * self.lnd[k]);
            }
        }
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Root {
    /// `phi >= 0` on the whole range.
    Below,
    /// `phi <= 0` on the whole range.
    Above,
    /// Final bracket `phi(lo) < 0 <= phi(hi)`.
    At { lo: f64, hi: f64, best: f64 },
}

/// Sign change of a nondecreasing `phi` on `[NU_MIN, NU_MAX]`, searched outward from `hint`.
pub(crate) fn monotone_root(mut phi: impl FnMut(f64) -> f64, hint: Option<f64>) -> (Root, usize) {
    let mut evals = 0;
    let mut call = |x: f64, evals: &mut usize| {
        *evals += 1;
        phi(x)
    };
    let (mut lo, mut flo, mut hi, mut fhi);
    match hint {
        Some(g) => {
            let g = g.clamp(NU_MIN, NU_MAX);
            let fg = call(g, &mut evals);
            let mut step = 0.5;
            if fg < 0.0 {
                lo = g;
                flo = fg;
                loop {
                    let x = (lo + step).min(NU_MAX);
                    let fx = call(x, &mut evals);
                    if fx >= 0.0 {
                        hi = x;
                        fhi = fx;
                        break;
                    }
                    if x >= NU_MAX {
                        return (Root::Above, evals);
                    }
                    lo = x;
                    flo = fx;
                    step *= 2.0;
                }
            } else {
                hi = g;
                fhi = fg;
                loop {
                    let x = (hi - step).max(NU_MIN);
                    let fx = call(x, &mut evals);
                    if fx < 0.0 {
                        lo = x;
                        flo = fx;
                        break;
                    }
                    if x <= NU_MIN {
                        return (Root::Below, evals);
                    }
                    hi = x;
                    fhi = fx;
                    step *= 2.0;
                }
            }
        }
        None => {
            lo = NU_MIN;
            flo = call(lo, &mut evals);
            if flo >= 0.0 {
                return (Root::Below, evals);
            }
            hi = NU_MAX;
            fhi = call(hi, &mut evals);
            if fhi <= 0.0 {
                return (Root::Above, evals);
            }
        }
    }
    // Illinois false position, with a bisection every third step
    let mut side = 0i8;
    for it in 0..300 {
        if hi - lo <= 1e-11 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let secant = if flo.is_finite() && fhi.is_finite() && fhi > flo {
            (lo * fhi - hi * flo) / (fhi - flo)
        } else {
            f64::NAN
        };
        let x = if it % 3 == 2 || !(secant > lo && secant < hi) {
            0.5 * (lo + hi)
        } else {
            secant
        };
        let fx = call(x, &mut evals);
        if fx < 0.0 {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if fx == 0.0 {
                return (Root::At { lo, hi, best: x }, evals);
            }
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    let best = if flo.abs() < fhi.abs() { lo } else { hi };
    (Root::At { lo, hi, best }, evals)
}
