//! Damped Newton method for the `l2`-penalized logistic loss.
//!
//! The objective is smooth and strongly convex in `w` (and strictly convex
//! in the intercept), so Newton steps with Armijo backtracking converge
//! quadratically. Stops when the gradient's max-norm drops below `tol`.

use ndarray::{Array1, Array2};

use super::{logistic_loss, logistic_loss_curvature, logistic_loss_derivative, Problem, Solution};
use crate::stats::pairwise_sum;

struct State {
    value: f64,
    grad: Array1<f64>,
    margins: Vec<f64>,
}

fn evaluate(p: &Problem<'_>, theta: &Array1<f64>, with_grad: bool) -> State {
    let (n, d) = p.x.dim();
    let w = theta.slice(ndarray::s![..d]);
    let b = if p.fit_intercept { theta[d] } else { 0.0 };
    let scores = p.x.dot(&w);
    let margins: Vec<f64> = scores.iter().zip(&p.y).map(|(s, y)| y * (s + b)).collect();
    let losses: Vec<f64> = margins.iter().map(|&m| logistic_loss(m)).collect();
    let wsq: Vec<f64> = w.iter().map(|v| v * v).collect();
    let value = pairwise_sum(&losses) / n as f64 + p.lambda * pairwise_sum(&wsq);
    let mut grad = Array1::zeros(theta.len());
    if with_grad {
        let coef: Array1<f64> = margins
            .iter()
            .zip(&p.y)
            .map(|(&m, y)| logistic_loss_derivative(m) * y / n as f64)
            .collect();
        let gw = p.x.t().dot(&coef);
        for j in 0..d {
            grad[j] = gw[j] + 2.0 * p.lambda * w[j];
        }
        if p.fit_intercept {
            grad[d] = coef.sum();
        }
    }
    State { value, grad, margins }
}

fn hessian(p: &Problem<'_>, margins: &[f64]) -> Array2<f64> {
    let (n, d) = p.x.dim();
    let dim = d + p.fit_intercept as usize;
    let mut h = Array2::<f64>::zeros((dim, dim));
    for (i, row) in p.x.rows().into_iter().enumerate() {
        let c = logistic_loss_curvature(margins[i]) / n as f64;
        if c == 0.0 {
            continue;
        }
        for a in 0..d {
            let ca = c * row[a];
            for bb in a..d {
                h[[a, bb]] += ca * row[bb];
            }
            if p.fit_intercept {
                h[[a, d]] += ca;
            }
        }
        if p.fit_intercept {
            h[[d, d]] += c;
        }
    }
    for a in 0..dim {
        for bb in 0..a {
            h[[a, bb]] = h[[bb, a]];
        }
    }
    for j in 0..d {
        h[[j, j]] += 2.0 * p.lambda;
    }
    h
}

/// Solves `h · x = rhs` by Cholesky. Returns `None` if `h` is not
/// numerically positive definite.
pub(crate) fn cholesky_solve(h: &Array2<f64>, rhs: &Array1<f64>) -> Option<Array1<f64>> {
    let n = h.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut s = h[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    let mut z = rhs.clone();
    for i in 0..n {
        for k in 0..i {
            z[i] -= l[[i, k]] * z[k];
        }
        z[i] /= l[[i, i]];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            z[i] -= l[[k, i]] * z[k];
        }
        z[i] /= l[[i, i]];
    }
    Some(z)
}

pub(crate) fn solve(p: &Problem<'_>) -> Solution {
    let d = p.x.ncols();
    let dim = d + p.fit_intercept as usize;
    let mut theta = Array1::<f64>::zeros(dim);
    let mut state = evaluate(p, &theta, true);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < p.max_iter {
        if state.grad.iter().all(|g| g.abs() <= p.tol) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut h = hessian(p, &state.margins);
        let neg_grad = -&state.grad;
        let mut jitter = 0.0;
        let step = loop {
            if let Some(s) = cholesky_solve(&h, &neg_grad) {
                break s;
            }
            let bump = if jitter == 0.0 { 1e-12 } else { jitter * 9.0 };
            for a in 0..dim {
                h[[a, a]] += bump;
            }
            jitter += bump;
        };
        let slope = state.grad.dot(&step);
        let mut t = 1.0;
        let accepted = loop {
            let cand = &theta + &(t * &step);
            let next = evaluate(p, &cand, false);
            // the slack absorbs rounding once decreases reach machine precision
            if next.value <= state.value + 0.25 * t * slope + 4.0 * f64::EPSILON * state.value.abs() {
                break Some(cand);
            }
            t *= 0.5;
            if t < 1e-20 {
                break None;
            }
        };
        match accepted {
            Some(cand) => {
                theta = cand;
                state = evaluate(p, &theta, true);
            }
            None => break,
        }
    }
    if !converged {
        converged = state.grad.iter().all(|g| g.abs() <= p.tol);
    }
    let w = theta.slice(ndarray::s![..d]).to_vec();
    let b = if p.fit_intercept { theta[d] } else { 0.0 };
    Solution { w, b, converged, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn cholesky_solves_spd() {
        let h = array![[4.0, 2.0, 0.6], [2.0, 5.0, 1.0], [0.6, 1.0, 3.0]];
        let rhs = array![1.0, -2.0, 0.5];
        let x = cholesky_solve(&h, &rhs).unwrap();
        let back = h.dot(&x);
        for i in 0..3 {
            assert!((back[i] - rhs[i]).abs() < 1e-12);
        }
        assert!(cholesky_solve(&array![[1.0, 2.0], [2.0, 1.0]], &array![1.0, 1.0]).is_none());
    }
}
