//! Sequential minimal optimization for the `l2`-penalized hinge loss.
//!
//! With `β_i = n · α_i`, the dual of
//! `mean_i max(0, 1 − y_i(x_i·w + b)) + λ‖w‖²` is
//!
//! ```text
//! min_β ½ βᵀQβ − Σ β_i,   0 ≤ β_i ≤ 1,   Σ y_i β_i = 0
//! Q_ij = y_i y_j (x_i · x_j) / (2 λ n)
//! ```
//!
//! and `w = Σ β_i y_i x_i / (2 λ n)`. Working pairs are chosen with the
//! second-order rule; the stopping criterion is the maximal KKT violation
//! `m(β) − M(β) < tol`. Without an intercept the equality constraint
//! disappears and single-coordinate descent is used instead.

use ndarray::{Array2, ArrayView1};

use super::intercept::hinge_intercept;
use super::{Problem, Solution};

const TAU: f64 = 1e-12;
const DENSE_LIMIT: usize = 5000;

/// Rows of the scaled Gram matrix `K / (2 λ n)`.
enum Gram<'a> {
    Dense(Array2<f64>),
    OnDemand { x: &'a Array2<f64>, scale: f64 },
}

impl Gram<'_> {
    fn new<'a>(x: &'a Array2<f64>, scale: f64) -> Gram<'a> {
        if x.nrows() <= DENSE_LIMIT {
            Gram::Dense(x.dot(&x.t()) * scale)
        } else {
            Gram::OnDemand { x, scale }
        }
    }

    fn row(&self, i: usize) -> std::borrow::Cow<'_, [f64]> {
        match self {
            Gram::Dense(k) => std::borrow::Cow::Borrowed(k.row(i).to_slice().expect("standard layout")),
            Gram::OnDemand { x, scale } => {
                let xi = x.row(i);
                std::borrow::Cow::Owned(x.rows().into_iter().map(|r| r.dot(&xi) * scale).collect())
            }
        }
    }

    fn diag(&self, x: &Array2<f64>) -> Vec<f64> {
        match self {
            Gram::Dense(k) => k.diag().to_vec(),
            Gram::OnDemand { scale, .. } => x.rows().into_iter().map(|r| r.dot(&r) * scale).collect(),
        }
    }
}

pub(crate) fn solve(p: &Problem<'_>) -> Solution {
    let (n, d) = p.x.dim();
    let scale = 1.0 / (2.0 * p.lambda * n as f64);
    let gram = Gram::new(p.x, scale);
    let kd = gram.diag(p.x);
    let y = &p.y;
    let mut beta = vec![0.0f64; n];
    // G = Qβ − 1
    let mut grad = vec![-1.0f64; n];
    let budget = p.max_iter.saturating_mul(n.max(100));

    let (converged, iterations) = if p.fit_intercept {
        pairwise(&gram, &kd, y, &mut beta, &mut grad, p.tol, budget)
    } else {
        coordinate(&gram, &kd, y, &mut beta, &mut grad, p.tol, budget)
    };

    let mut w = vec![0.0; d];
    for (i, row) in p.x.rows().into_iter().enumerate() {
        if beta[i] != 0.0 {
            let c = beta[i] * y[i] * scale;
            for (wj, xij) in w.iter_mut().zip(row) {
                *wj += c * xij;
            }
        }
    }
    let b = if p.fit_intercept {
        let wv = ArrayView1::from(&w);
        let scores: Vec<f64> = p.x.dot(&wv).to_vec();
        hinge_intercept(&scores, y)
    } else {
        0.0
    };
    Solution { w, b, converged, iterations }
}

fn pairwise(
    gram: &Gram<'_>,
    kd: &[f64],
    y: &[f64],
    beta: &mut [f64],
    grad: &mut [f64],
    eps: f64,
    budget: usize,
) -> (bool, usize) {
    let n = beta.len();
    let upper = |t: usize, beta: &[f64]| beta[t] >= 1.0;
    let lower = |t: usize, beta: &[f64]| beta[t] <= 0.0;
    let mut iter = 0;
    loop {
        // maximal violating index from I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if y[t] > 0.0 {
                if !upper(t, beta) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i_sel = Some(t);
                }
            } else if !lower(t, beta) && grad[t] >= gmax {
                gmax = grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else { return (true, iter) };
        let ki = gram.row(i);
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut obj_min = f64::INFINITY;
        for t in 0..n {
            let grad_diff = if y[t] > 0.0 {
                if lower(t, beta) {
                    continue;
                }
                gmax2 = gmax2.max(grad[t]);
                gmax + grad[t]
            } else {
                if upper(t, beta) {
                    continue;
                }
                gmax2 = gmax2.max(-grad[t]);
                gmax - grad[t]
            };
            let quad = kd[i] + kd[t] - 2.0 * ki[t];
            if grad_diff > 0.0 {
                let q = if quad > 0.0 { quad } else { TAU };
                let obj = -(grad_diff * grad_diff) / q;
                if obj <= obj_min {
                    obj_min = obj;
                    j_sel = Some(t);
                }
            }
        }
        let j = match j_sel {
            Some(j) if gmax + gmax2 >= eps => j,
            _ => return (true, iter),
        };
        if iter >= budget {
            return (false, iter);
        }
        iter += 1;

        let kj = gram.row(j);
        // Q_ij = y_i y_j K_ij
        let qij = y[i] * y[j] * ki[j];
        let (old_i, old_j) = (beta[i], beta[j]);
        if y[i] != y[j] {
            let quad = {
                let q = kd[i] + kd[j] + 2.0 * qij;
                if q > 0.0 { q } else { TAU }
            };
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = beta[i] - beta[j];
            beta[i] += delta;
            beta[j] += delta;
            if diff > 0.0 {
                if beta[j] < 0.0 {
                    beta[j] = 0.0;
                    beta[i] = diff;
                }
            } else if beta[i] < 0.0 {
                beta[i] = 0.0;
                beta[j] = -diff;
            }
            if diff > 0.0 {
                if beta[i] > 1.0 {
                    beta[i] = 1.0;
                    beta[j] = 1.0 - diff;
                }
            } else if beta[j] > 1.0 {
                beta[j] = 1.0;
                beta[i] = 1.0 + diff;
            }
        } else {
            let quad = {
                let q = kd[i] + kd[j] - 2.0 * qij;
                if q > 0.0 { q } else { TAU }
            };
            let delta = (grad[i] - grad[j]) / quad;
            let sum = beta[i] + beta[j];
            beta[i] -= delta;
            beta[j] += delta;
            if sum > 1.0 {
                if beta[i] > 1.0 {
                    beta[i] = 1.0;
                    beta[j] = sum - 1.0;
                }
            } else if beta[j] < 0.0 {
                beta[j] = 0.0;
                beta[i] = sum;
            }
            if sum > 1.0 {
                if beta[j] > 1.0 {
                    beta[j] = 1.0;
                    beta[i] = sum - 1.0;
                }
            } else if beta[i] < 0.0 {
                beta[i] = 0.0;
                beta[j] = sum;
            }
        }
        let (di, dj) = (beta[i] - old_i, beta[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }
}

fn coordinate(
    gram: &Gram<'_>,
    kd: &[f64],
    y: &[f64],
    beta: &mut [f64],
    grad: &mut [f64],
    eps: f64,
    budget: usize,
) -> (bool, usize) {
    let n = beta.len();
    let mut iter = 0;
    loop {
        let mut max_violation = 0.0f64;
        for i in 0..n {
            let g = grad[i];
            let pg = if beta[i] <= 0.0 {
                g.min(0.0)
            } else if beta[i] >= 1.0 {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg == 0.0 || kd[i] <= 0.0 {
                continue;
            }
            let old = beta[i];
            beta[i] = (old - g / kd[i]).clamp(0.0, 1.0);
            let delta = beta[i] - old;
            if delta != 0.0 {
                let ki = gram.row(i);
                for t in 0..n {
                    grad[t] += y[t] * y[i] * ki[t] * delta;
                }
            }
        }
        iter += 1;
        if max_violation < eps {
            return (true, iter);
        }
        if iter * n >= budget {
            return (false, iter);
        }
    }
}
