//! Dense lower-triangular kernels for small SPD matrices.
//!
//! Covariances here are a handful of rows, so plain `O(n^3)` loops over
//! row-major slices beat pulling in a matrix library.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

/// Cholesky factor `L` (lower, row-major) of the symmetric matrix `a`,
/// or `None` when any pivot fails to be strictly positive and finite.
pub(crate) fn cholesky_lower(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0f64; n * n];
    for r in 0..n {
        for c in 0..=r {
            let mut s = a[r * n + c];
            for k in 0..c {
                s -= l[r * n + k] * l[c * n + k];
            }
            if r == c {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[r * n + r] = sqrt(s);
            } else {
                l[r * n + c] = s / l[c * n + c];
            }
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal, by forward
/// substitution one unit basis column at a time.
pub(crate) fn invert_lower(n: usize, l: &[f64]) -> Vec<f64> {
    debug_assert_eq!(l.len(), n * n);
    let mut inv = vec![0.0f64; n * n];
    for col in 0..n {
        inv[col * n + col] = 1.0 / l[col * n + col];
        for r in (col + 1)..n {
            let mut s = 0.0;
            for k in col..r {
                s += l[r * n + k] * inv[k * n + col];
            }
            inv[r * n + col] = -s / l[r * n + r];
        }
    }
    inv
}
