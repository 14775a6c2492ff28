//! Shared helpers for the oracle tests.
//!
//! The density oracle here goes through determinants and cofactor inverses
//! rather than the library's Cholesky route, so the two implementations
//! share no code beyond `exp` and `ln`.

#![allow(dead_code)]

use pdmmis::{Gaussian, Point};
use rand::Rng;

pub fn pt(coords: &[f64]) -> Point {
    Point::new(coords.to_vec()).unwrap()
}

/// Determinant by cofactor expansion, dimensions 1 to 3.
pub fn det(n: usize, a: &[f64]) -> f64 {
    match n {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => panic!("oracle determinant supports dimensions 1 to 3"),
    }
}

/// Inverse via the adjugate, dimensions 1 to 3.
pub fn inverse(n: usize, a: &[f64]) -> Vec<f64> {
    let d = det(n, a);
    match n {
        1 => vec![1.0 / d],
        2 => vec![a[3] / d, -a[1] / d, -a[2] / d, a[0] / d],
        3 => {
            let c = |r1: usize, c1: usize, r2: usize, c2: usize| {
                a[r1 * 3 + c1] * a[r2 * 3 + c2] - a[r1 * 3 + c2] * a[r2 * 3 + c1]
            };
            vec![
                c(1, 1, 2, 2) / d,
                -c(0, 1, 2, 2) / d,
                c(0, 1, 1, 2) / d,
                -c(1, 0, 2, 2) / d,
                c(0, 0, 2, 2) / d,
                -c(0, 0, 1, 2) / d,
                c(1, 0, 2, 1) / d,
                -c(0, 0, 2, 1) / d,
                c(0, 0, 1, 1) / d,
            ]
        }
        _ => panic!("oracle inverse supports dimensions 1 to 3"),
    }
}

/// Gaussian log-density straight from the closed form
/// `-(n ln(2 pi) + ln det C + (x-m)^T C^{-1} (x-m)) / 2`.
pub fn gaussian_logpdf_oracle(mean: &[f64], cov: &[f64], x: &[f64]) -> f64 {
    let n = mean.len();
    let inv = inverse(n, cov);
    let d: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    let mut quad = 0.0;
    for r in 0..n {
        for c in 0..n {
            quad += d[r] * inv[r * n + c] * d[c];
        }
    }
    -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + det(n, cov).ln() + quad)
}

/// Linear-domain Gaussian density for the naive weight oracle.
pub fn gaussian_pdf_oracle(mean: &[f64], cov: &[f64], x: &[f64]) -> f64 {
    gaussian_logpdf_oracle(mean, cov, x).exp()
}

/// A random well-conditioned SPD matrix, `B B^T + 0.3 I`.
pub fn random_spd<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    let b: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut a = vec![0.0; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            for k in 0..dim {
                a[r * dim + c] += b[r * dim + k] * b[c * dim + k];
            }
            if r == c {
                a[r * dim + c] += 0.3;
            }
        }
    }
    a
}

/// A random Gaussian with mean inside `[-spread, spread]^dim`.
pub fn random_gaussian<R: Rng>(dim: usize, spread: f64, rng: &mut R) -> Gaussian {
    let mean: Vec<f64> = (0..dim).map(|_| rng.random_range(-spread..spread)).collect();
    Gaussian::new(pt(&mean), random_spd(dim, rng)).unwrap()
}

/// Empirical mean and covariance of a point cloud.
pub fn mean_cov(points: &[Point]) -> (Vec<f64>, Vec<f64>) {
    let n = points.len() as f64;
    let dim = points[0].dim();
    let mut mean = vec![0.0; dim];
    for p in points {
        for (m, &x) in mean.iter_mut().zip(p.iter()) {
            *m += x / n;
        }
    }
    let mut cov = vec![0.0; dim * dim];
    for p in points {
        for r in 0..dim {
            for c in 0..dim {
                cov[r * dim + c] += (p[r] - mean[r]) * (p[c] - mean[c]) / (n - 1.0);
            }
        }
    }
    (mean, cov)
}

/// Frobenius norm of the difference relative to the norm of `b`.
pub fn frobenius_rel(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let norm: f64 = b.iter().map(|y| y * y).sum();
    (diff / norm).sqrt()
}

/// Asserts `got` is within `tol` of `want`, relative to `max(1, |want|)`.
pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    let scale = want.abs().max(1.0);
    assert!(
        (got - want).abs() <= tol * scale,
        "{what}: got {got}, want {want} (tol {tol})"
    );
}
