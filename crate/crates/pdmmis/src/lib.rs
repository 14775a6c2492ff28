//! Multiple importance sampling with partially shared mixture denominators.
//!
//! Given `N` proposal distributions and one sample drawn from each, the
//! classic balance-heuristic family offers two extremes for the importance
//! weight denominator: each sample weighted by its own proposal alone, or by
//! the full mixture of all `N` proposals. The first is cheap (`N` density
//! evaluations) but noisy; the second is far more stable but costs `N^2`
//! evaluations.
//!
//! This crate implements the whole family in between. A [`Partition`] of the
//! proposal indices into `P` groups selects the scheme: each sample is
//! weighted by the mixture of the proposals in its own group only, at a cost
//! of the sum of squared group sizes. `P = N` recovers the standard
//! one-proposal weights, `P = 1` the full deterministic mixture, and
//! intermediate `P` trades variance against evaluation cost.
//!
//! The pieces:
//!
//! * [`density`]: points, multivariate Gaussians, equal-weight Gaussian
//!   mixtures, and an instrumented target density with an evaluation counter.
//! * [`partition`]: validated partitions of `{0, .., N-1}` plus the stock
//!   constructors (singletons, one block, shuffled equal blocks, grids).
//! * [`estimator`]: sampling, log-domain weight computation, self-normalized
//!   and unnormalized estimates, the evaluation cost model, and an iterative
//!   routine that walks a descending schedule of `P` values to pick one.
//!
//! All numerics run in the log domain until the final estimate, so widely
//! scaled targets and far-apart proposals do not underflow. The crate is
//! `no_std`-compatible (with `alloc`): disable default features and enable
//! `libm` to build without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod density;
pub mod estimator;
pub mod partition;

mod linalg;
mod math;

pub use density::{benchmark_mixture, Gaussian, GaussianMixture, Point, TargetDensity};
pub use estimator::{
    compute_weights, compute_weights_cached, draw_samples, proposal_eval_cost,
    select_num_mixtures, target_log_densities, EstimateResult, ProposalEvalCache,
    SelectionResult, SelectionStep, WeightedSamples,
};
pub use partition::Partition;

use core::fmt;

/// Error type shared by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two lengths or dimensions that must agree do not.
    DimensionMismatch {
        /// The length required by the receiving side.
        expected: usize,
        /// The length that was supplied.
        got: usize,
    },
    /// A covariance matrix differs from its transpose by more than the
    /// symmetry tolerance.
    NotSymmetric,
    /// A covariance matrix has no Cholesky factor with a strictly positive
    /// diagonal.
    NotPositiveDefinite,
    /// A coordinate of a [`Point`] is NaN or infinite.
    NonFiniteCoordinate,
    /// A target log-density evaluation returned NaN or positive infinity.
    NonFiniteDensity,
    /// A size argument is out of range for the operation; the message names
    /// the requirement.
    InvalidSize(&'static str),
    /// A set of subsets fails to partition `{0, .., n-1}`; the payload names
    /// the first violated property.
    NotAPartition(PartitionViolation),
    /// A sample with positive target density fell where its group mixture
    /// has zero density, so its importance weight is undefined.
    NonFiniteWeight {
        /// Index of the offending sample.
        sample: usize,
    },
    /// Every importance weight is zero, so no normalized estimate exists.
    AllWeightsZero,
    /// A `P` schedule is not a strictly decreasing sequence from `N` into
    /// `[1, N]`, or the stopping threshold is not positive.
    InvalidSchedule(&'static str),
}

/// The first property violated by a would-be partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionViolation {
    /// No subsets were supplied.
    NoSubsets,
    /// A subset contains no indices.
    EmptySubset {
        /// Position of the empty subset in the supplied list.
        subset: usize,
    },
    /// An index is `>= n_total`.
    IndexOutOfRange {
        /// The offending index.
        index: usize,
    },
    /// An index occurs in more than one place.
    DuplicateIndex {
        /// The repeated index.
        index: usize,
    },
    /// An index in `{0, .., n-1}` occurs in no subset.
    MissingIndex {
        /// The uncovered index.
        index: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NotSymmetric => write!(f, "covariance matrix is not symmetric"),
            Error::NotPositiveDefinite => {
                write!(f, "covariance matrix is not positive definite")
            }
            Error::NonFiniteCoordinate => write!(f, "point has a non-finite coordinate"),
            Error::NonFiniteDensity => {
                write!(f, "target log-density returned NaN or +inf")
            }
            Error::InvalidSize(what) => write!(f, "invalid size: {what}"),
            Error::NotAPartition(v) => write!(f, "not a partition: {v}"),
            Error::NonFiniteWeight { sample } => write!(
                f,
                "sample {sample} has positive target density but zero group mixture density"
            ),
            Error::AllWeightsZero => write!(f, "all importance weights are zero"),
            Error::InvalidSchedule(what) => write!(f, "invalid schedule: {what}"),
        }
    }
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::NoSubsets => write!(f, "no subsets supplied"),
            PartitionViolation::EmptySubset { subset } => {
                write!(f, "subset {subset} is empty")
            }
            PartitionViolation::IndexOutOfRange { index } => {
                write!(f, "index {index} is out of range")
            }
            PartitionViolation::DuplicateIndex { index } => {
                write!(f, "index {index} appears more than once")
            }
            PartitionViolation::MissingIndex { index } => {
                write!(f, "index {index} is not covered")
            }
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
