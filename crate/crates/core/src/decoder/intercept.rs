//! Exact intercept for the hinge loss once the weights are fixed.
//!
//! With scores `s_i = x_i · w`, `Σ max(0, 1 − y_i (s_i + b))` is piecewise
//! linear in `b` with breakpoints `t_i = y_i − s_i`; every breakpoint raises
//! the slope by one, starting from `−n₊`. The minimizers are therefore the
//! interval between the `n₊`-th and `(n₊ + 1)`-th smallest breakpoints.

/// Midpoint of the optimal intercept interval. Both classes must be present.
pub fn hinge_intercept(scores: &[f64], y: &[f64]) -> f64 {
    let n_pos = y.iter().filter(|&&v| v > 0.0).count();
    assert!(n_pos > 0 && n_pos < y.len(), "hinge intercept needs both classes");
    let mut t: Vec<f64> = scores.iter().zip(y).map(|(s, yi)| yi - s).collect();
    t.sort_by(f64::total_cmp);
    0.5 * (t[n_pos - 1] + t[n_pos])
}
