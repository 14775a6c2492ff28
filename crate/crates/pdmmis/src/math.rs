//! Scalar float helpers that work with or without `std`.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("pdmmis needs either the `std` feature or the `libm` feature");

#[cfg(feature = "std")]
mod imp {
    #[inline(always)]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline(always)]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline(always)]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    #[inline(always)]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline(always)]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline(always)]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
}

pub(crate) use imp::{exp, ln, sqrt};

#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

/// Shifted terms below this bound are dropped from the exponential sum.
/// `exp(-45)` is about `3e-20`; even `2^20` such terms perturb the sum by
/// less than one part in `1e13` of the dominant term, far inside the
/// tolerance any caller asserts.
const NEGLIGIBLE: f64 = -45.0;

/// `ln(mean(exp(v)))` computed stably by shifting out the maximum.
///
/// Folding the `1/len` factor into the logarithm keeps two exact cases
/// exact: a single value comes back unchanged, and `m` copies of one value
/// come back as that value, because the shifted sum is exactly `m`.
///
/// Inputs must be finite or `-inf` (never NaN); an empty slice or a slice
/// of `-inf` yields `-inf`.
pub(crate) fn log_mean_exp(values: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if v > max {
            max = v;
        }
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut sum = 0.0;
    for &v in values {
        let d = v - max;
        if d >= NEGLIGIBLE {
            sum += exp(d);
        }
    }
    max + ln(sum / values.len() as f64)
}
