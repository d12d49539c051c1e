//! Dense primal simplex on the dual of the `l1`-penalized hinge problem.
//!
//! The primal `mean_i max(0, 1 − y_i(x_i·w + b)) + λ‖w‖₁` is a linear
//! program. Its dual, with `β_i = n · α_i`,
//!
//! ```text
//! max Σ β_i   s.t.  β_i ≤ 1,  |Σ_i β_i y_i x_ij| ≤ nλ,  Σ_i β_i y_i = 0,  β ≥ 0
//! ```
//!
//! has a feasible slack basis at `β = 0`, so no phase one is needed. The
//! primal weights are read off the optimal tableau as the shadow prices of
//! the `±Σ β_i y_i x_ij ≤ nλ` rows. Dantzig pricing is used, switching to
//! Bland's rule during runs of degenerate pivots.

use ndarray::ArrayView1;

use super::intercept::hinge_intercept;
use super::{Problem, Solution};

const PIVOT_TOL: f64 = 1e-11;
const OPT_TOL: f64 = 1e-12;
const DEGENERATE_RUN: usize = 50;

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows × (cols + 1)`, last column is the right-hand side.
    a: Vec<f64>,
    /// Objective row (reduced costs), last entry is the objective value.
    z: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.at(pr, pc);
        for c in 0..w {
            self.a[pr * w + c] *= inv;
        }
        self.a[pr * w + pc] = 1.0;
        let pivot_row: Vec<f64> = self.a[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.a[r * w + pc];
            if f != 0.0 {
                let row = &mut self.a[r * w..(r + 1) * w];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[pc] = 0.0;
                if row[w - 1] < 0.0 && row[w - 1] > -1e-13 {
                    row[w - 1] = 0.0;
                }
            }
        }
        let f = self.z[pc];
        if f != 0.0 {
            for (v, p) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.z[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        if bland {
            (0..self.cols).find(|&c| self.z[c] < -OPT_TOL)
        } else {
            let mut best = None;
            let mut best_val = -OPT_TOL;
            for c in 0..self.cols {
                if self.z[c] < best_val {
                    best_val = self.z[c];
                    best = Some(c);
                }
            }
            best
        }
    }

    fn leaving(&self, pc: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let coef = self.at(r, pc);
            if coef > PIVOT_TOL {
                let ratio = self.rhs(r).max(0.0) / coef;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        if ratio < bv || (ratio == bv && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
        }
        best
    }
}

pub(crate) fn solve(p: &Problem<'_>) -> Solution {
    let (n, d) = p.x.dim();
    let n_box = n;
    let n_rows = n_box + 2 * d + if p.fit_intercept { 2 } else { 0 };
    let cols = n + n_rows;
    let width = cols + 1;
    let bound = n as f64 * p.lambda;

    let mut a = vec![0.0; n_rows * width];
    for i in 0..n {
        a[i * width + i] = 1.0;
        a[i * width + cols] = 1.0;
    }
    for j in 0..d {
        let (rp, rm) = (n_box + j, n_box + d + j);
        for i in 0..n {
            let v = p.y[i] * p.x[[i, j]];
            a[rp * width + i] = v;
            a[rm * width + i] = -v;
        }
        a[rp * width + cols] = bound;
        a[rm * width + cols] = bound;
    }
    if p.fit_intercept {
        let (rp, rm) = (n_box + 2 * d, n_box + 2 * d + 1);
        for i in 0..n {
            a[rp * width + i] = p.y[i];
            a[rm * width + i] = -p.y[i];
        }
    }
    for r in 0..n_rows {
        a[r * width + n + r] = 1.0;
    }
    let mut z = vec![0.0; width];
    for v in z.iter_mut().take(n) {
        *v = -1.0;
    }
    let mut t = Tableau {
        rows: n_rows,
        cols,
        a,
        z,
        basis: (n..n + n_rows).collect(),
    };

    let max_pivots = p.max_iter.saturating_mul(10).max(10 * cols);
    let mut pivots = 0;
    let mut degenerate = 0;
    let mut converged = false;
    while pivots < max_pivots {
        let Some(pc) = t.entering(degenerate >= DEGENERATE_RUN) else {
            converged = true;
            break;
        };
        let Some((pr, ratio)) = t.leaving(pc) else {
            // unbounded direction; impossible with the β ≤ 1 rows
            break;
        };
        if ratio <= 0.0 {
            degenerate += 1;
        } else {
            degenerate = 0;
        }
        t.pivot(pr, pc);
        pivots += 1;
    }

    let mut is_basic = vec![false; cols];
    for &c in &t.basis {
        is_basic[c] = true;
    }
    let shadow = |r: usize| -> f64 {
        let c = n + r;
        if is_basic[c] { 0.0 } else { t.z[c].max(0.0) }
    };
    let w: Vec<f64> = (0..d)
        .map(|j| {
            let v = shadow(n_box + j) - shadow(n_box + d + j);
            if v.abs() < 1e-13 { 0.0 } else { v }
        })
        .collect();
    let b = if p.fit_intercept {
        let wv = ArrayView1::from(&w);
        let scores = p.x.dot(&wv).to_vec();
        hinge_intercept(&scores, &p.y)
    } else {
        0.0
    };
    Solution { w, b, converged, iterations: pivots }
}
