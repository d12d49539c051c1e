//! Test-only reference implementations, independent of the library's
//! solver and evaluation code paths.
#![allow(dead_code)]

use decodecv::{Dataset, Loss, Penalty};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Objective and one subgradient at `theta = (w, b)`.
pub fn objective_and_subgradient(
    x: &Array2<f64>,
    y: &[f64],
    theta: &[f64],
    loss: Loss,
    penalty: Penalty,
    c: f64,
) -> (f64, Vec<f64>) {
    let (n, d) = x.dim();
    let (w, b) = (&theta[..d], theta[d]);
    let mut f = 0.0;
    let mut g = vec![0.0; d + 1];
    for i in 0..n {
        let s: f64 = (0..d).map(|j| x[[i, j]] * w[j]).sum::<f64>() + b;
        let m = y[i] * s;
        let (l, dl) = match loss {
            Loss::Hinge => {
                if m < 1.0 { (1.0 - m, -1.0) } else { (0.0, 0.0) }
            }
            Loss::Logistic => {
                let l = if m > 0.0 { (-m).exp().ln_1p() } else { -m + m.exp().ln_1p() };
                (l, -1.0 / (1.0 + m.exp()))
            }
        };
        f += l / n as f64;
        for j in 0..d {
            g[j] += dl * y[i] * x[[i, j]] / n as f64;
        }
        g[d] += dl * y[i] / n as f64;
    }
    for j in 0..d {
        match penalty {
            Penalty::L1 => {
                f += w[j].abs() / c;
                g[j] += w[j].signum() * if w[j] == 0.0 { 0.0 } else { 1.0 } / c;
            }
            Penalty::L2 => {
                f += w[j] * w[j] / c;
                g[j] += 2.0 * w[j] / c;
            }
        }
    }
    (f, g)
}

pub struct Reference {
    pub theta: Vec<f64>,
    pub value: f64,
    /// Certified lower bound on the optimum.
    pub lower_bound: f64,
}

/// Central-cut ellipsoid method. Stops when the certified gap falls below
/// `gap` or after `max_iter` cuts.
pub fn ellipsoid_minimize(
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
    dim: usize,
    radius: f64,
    gap: f64,
    max_iter: usize,
) -> Reference {
    let p = dim as f64;
    let mut center = vec![0.0; dim];
    let mut shape = vec![vec![0.0; dim]; dim];
    for (i, row) in shape.iter_mut().enumerate() {
        row[i] = radius * radius;
    }
    let (mut best_val, _) = f(&center);
    let mut best = center.clone();
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..max_iter {
        let (val, g) = f(&center);
        if val < best_val {
            best_val = val;
            best = center.clone();
        }
        let pg: Vec<f64> = (0..dim).map(|i| (0..dim).map(|j| shape[i][j] * g[j]).sum()).collect();
        let gpg: f64 = g.iter().zip(&pg).map(|(a, b)| a * b).sum();
        if gpg <= 0.0 {
            // zero subgradient: center is optimal
            lower = lower.max(val);
            break;
        }
        let root = gpg.sqrt();
        lower = lower.max(val - root);
        if best_val - lower < gap {
            break;
        }
        let step: Vec<f64> = pg.iter().map(|v| v / root).collect();
        for i in 0..dim {
            center[i] -= step[i] / (p + 1.0);
        }
        let factor = p * p / (p * p - 1.0);
        for i in 0..dim {
            for j in 0..dim {
                shape[i][j] = factor * (shape[i][j] - 2.0 / (p + 1.0) * step[i] * step[j]);
            }
        }
        for i in 0..dim {
            for j in 0..i {
                let avg = 0.5 * (shape[i][j] + shape[j][i]);
                shape[i][j] = avg;
                shape[j][i] = avg;
            }
        }
    }
    Reference { theta: best, value: best_val, lower_bound: lower }
}

/// Radius of a ball around the origin that contains every minimizer.
pub fn bounding_radius(x: &Array2<f64>, penalty: Penalty, c: f64) -> f64 {
    let (n, d) = x.dim();
    let f0 = 1.0; // objective at the origin is at most 1 for both losses
    let (w_euclid, w_l1) = match penalty {
        Penalty::L1 => (c * f0, c * f0),
        Penalty::L2 => ((c * f0).sqrt(), (d as f64).sqrt() * (c * f0).sqrt()),
    };
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let b = xmax * w_l1 + 1.0 + n as f64 * f0;
    2.0 * (w_euclid * w_euclid + b * b).sqrt()
}

pub fn reference_minimum(data: &Dataset, loss: Loss, penalty: Penalty, c: f64) -> Reference {
    let x = data.features().clone();
    let y: Vec<f64> = data.labels().iter().map(|&l| l as f64).collect();
    let dim = x.ncols() + 1;
    let radius = bounding_radius(&x, penalty, c);
    ellipsoid_minimize(
        |t| objective_and_subgradient(&x, &y, t, loss, penalty, c),
        dim,
        radius,
        1e-10,
        200_000,
    )
}

/// Small random two-class instance with both classes present.
pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_d: usize) -> Dataset {
    let n = rng.random_range(4..=max_n);
    let d = rng.random_range(1..=max_d);
    let shift: f64 = rng.random_range(0.0..1.5);
    let mut labels: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    labels[0] = 1;
    labels[1] = -1;
    let x = Array2::from_shape_fn((n, d), |(i, _)| {
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        z + shift * labels[i] as f64
    });
    let blocks = (0..n).map(|i| format!("b{}", i % 3)).collect();
    Dataset::new("random", x, labels, blocks).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `P(Binomial(n, 1/2) ≥ k)`.
pub fn sign_test_p(k: usize, n: usize) -> f64 {
    let mut total = 0.0;
    for j in k..=n {
        total += binomial(n, j) * 0.5f64.powi(n as i32);
    }
    total
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
