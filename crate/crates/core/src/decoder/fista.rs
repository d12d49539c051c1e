//! Accelerated proximal gradient (FISTA with backtracking and adaptive
//! restart) for the `l1`-penalized logistic loss.
//!
//! The `l1` term is handled by soft-thresholding, which yields exact zeros.
//! Convergence is declared when the max-norm of the gradient mapping
//! `L · (y − prox(y − ∇f(y) / L))` falls below `tol`.

use ndarray::{Array1, ArrayView1};

use super::{logistic_loss, logistic_loss_derivative, Problem, Solution};
use crate::stats::pairwise_sum;

pub fn soft_threshold(v: f64, threshold: f64) -> f64 {
    if v > threshold {
        v - threshold
    } else if v < -threshold {
        v + threshold
    } else {
        0.0
    }
}

struct Smooth<'p, 'a> {
    p: &'p Problem<'a>,
}

impl Smooth<'_, '_> {
    fn split<'t>(&self, theta: &'t Array1<f64>) -> (ArrayView1<'t, f64>, f64) {
        let d = self.p.x.ncols();
        let b = if self.p.fit_intercept { theta[d] } else { 0.0 };
        (theta.slice(ndarray::s![..d]), b)
    }

    fn margins(&self, theta: &Array1<f64>) -> Vec<f64> {
        let (w, b) = self.split(theta);
        let s = self.p.x.dot(&w);
        s.iter().zip(&self.p.y).map(|(s, y)| y * (s + b)).collect()
    }

    fn value(&self, theta: &Array1<f64>) -> f64 {
        let l: Vec<f64> = self.margins(theta).into_iter().map(logistic_loss).collect();
        pairwise_sum(&l) / self.p.y.len() as f64
    }

    fn value_and_grad(&self, theta: &Array1<f64>) -> (f64, Array1<f64>) {
        let n = self.p.y.len() as f64;
        let d = self.p.x.ncols();
        let m = self.margins(theta);
        let l: Vec<f64> = m.iter().map(|&v| logistic_loss(v)).collect();
        let coef: Array1<f64> = m
            .iter()
            .zip(&self.p.y)
            .map(|(&mi, y)| logistic_loss_derivative(mi) * y / n)
            .collect();
        let gw = self.p.x.t().dot(&coef);
        let mut g = Array1::zeros(theta.len());
        g.slice_mut(ndarray::s![..d]).assign(&gw);
        if self.p.fit_intercept {
            g[d] = coef.sum();
        }
        (pairwise_sum(&l) / n, g)
    }

    fn prox(&self, v: &Array1<f64>, step: f64) -> Array1<f64> {
        let d = self.p.x.ncols();
        let thr = step * self.p.lambda;
        let mut out = v.clone();
        for j in 0..d {
            out[j] = soft_threshold(v[j], thr);
        }
        out
    }

    /// Power-iteration estimate of the gradient's Lipschitz constant,
    /// `λ_max(X̃ᵀ X̃) / (4n)`.
    fn lipschitz_estimate(&self) -> f64 {
        let (n, d) = self.p.x.dim();
        let dim = d + self.p.fit_intercept as usize;
        let mut v = Array1::from_elem(dim, 1.0 / (dim as f64).sqrt());
        let mut est = 0.0;
        for _ in 0..30 {
            let (w, b) = self.split(&v);
            let xv = self.p.x.dot(&w) + b;
            let mut u = Array1::zeros(dim);
            u.slice_mut(ndarray::s![..d]).assign(&self.p.x.t().dot(&xv));
            if self.p.fit_intercept {
                u[d] = xv.sum();
            }
            let norm = u.dot(&u).sqrt();
            if norm == 0.0 {
                break;
            }
            est = norm;
            v = u / norm;
        }
        (est / (4.0 * n as f64)).max(1e-12)
    }
}

pub(crate) fn solve(p: &Problem<'_>) -> Solution {
    let d = p.x.ncols();
    let dim = d + p.fit_intercept as usize;
    let f = Smooth { p };
    let mut lip = f.lipschitz_estimate();
    let mut x = Array1::<f64>::zeros(dim);
    let mut y = x.clone();
    let mut momentum = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < p.max_iter {
        iterations += 1;
        let (fy, gy) = f.value_and_grad(&y);
        let x_next = loop {
            let cand = f.prox(&(&y - &(&gy / lip)), 1.0 / lip);
            let diff = &cand - &y;
            let model = fy + gy.dot(&diff) + 0.5 * lip * diff.dot(&diff);
            if f.value(&cand) <= model + 4.0 * f64::EPSILON * fy.abs() {
                break cand;
            }
            lip *= 2.0;
        };
        let mapping = (&y - &x_next) * lip;
        if mapping.iter().all(|g| g.abs() <= p.tol) {
            x = x_next;
            converged = true;
            break;
        }
        // restart momentum when the step points against the last move
        let restart = (&y - &x_next).dot(&(&x_next - &x)) > 0.0;
        let next_momentum = if restart {
            1.0
        } else {
            0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt())
        };
        y = if restart {
            x_next.clone()
        } else {
            &x_next + &((&x_next - &x) * ((momentum - 1.0) / next_momentum))
        };
        momentum = next_momentum;
        x = x_next;
    }

    let w = x.slice(ndarray::s![..d]).to_vec();
    let b = if p.fit_intercept { x[d] } else { 0.0 };
    Solution { w, b, converged, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-1.0, 1.0), 0.0);
    }
}
