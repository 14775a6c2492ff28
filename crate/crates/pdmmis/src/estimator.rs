//! Sampling, log-domain importance weights, and the estimators built on
//! them.
//!
//! The workflow is: draw one sample from each of `N` proposals
//! ([`draw_samples`]), weight each sample by the mixture of the proposals
//! in its partition group ([`compute_weights`]), then form either the
//! self-normalized estimate ([`WeightedSamples::estimate_moment`]) or the
//! unnormalized one ([`WeightedSamples::estimate_unnormalized`]).
//!
//! Weight `i` in group `S` is `pi(x_i) / ((1/|S|) sum_{j in S} q_j(x_i))`,
//! held as a log until the final exponentiation. The denominator costs
//! `|S|` proposal evaluations per sample, so a whole partition costs the
//! sum of its squared subset sizes ([`proposal_eval_cost`]). When several
//! partitions are evaluated over the same samples, a [`ProposalEvalCache`]
//! shares the underlying `q_j(x_i)` values between them.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::density::{Gaussian, Point, TargetDensity};
use crate::math::{exp, log_mean_exp};
use crate::partition::Partition;
use crate::{Error, Result};

mod select;

pub use select::{select_num_mixtures, SelectionResult, SelectionStep};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Draws exactly one sample from each proposal, in proposal order.
///
/// All proposals must share one dimension. The generator is consumed
/// deterministically: sample `i` uses the same draws whether or not other
/// proposals precede it in a different call.
pub fn draw_samples<R: Rng + ?Sized>(proposals: &[Gaussian], rng: &mut R) -> Result<Vec<Point>> {
    let first = proposals
        .first()
        .ok_or(Error::InvalidSize("needs at least one proposal"))?;
    let dim = first.dim();
    for p in proposals {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    Ok(proposals.iter().map(|p| p.sample(rng)).collect())
}

/// Evaluates the target log-density once per sample, in sample order.
///
/// This is the `N`-evaluation pass every weighting scheme shares; the
/// result can be fed to [`compute_weights_cached`] for several partitions
/// without re-evaluating the target.
pub fn target_log_densities(target: &TargetDensity, samples: &[Point]) -> Result<Vec<f64>> {
    samples.iter().map(|x| target.logpdf(x)).collect()
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

/// Samples together with their log importance weights under one partition.
#[derive(Debug)]
pub struct WeightedSamples<'a> {
    samples: &'a [Point],
    partition: &'a Partition,
    log_weights: Vec<f64>,
    proposal_evals: u64,
    target_evals: u64,
}

/// A self-normalized estimate with its evaluation cost.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    /// Estimate of the target expectation of `f`, one entry per output
    /// component of `f`.
    pub moment: Vec<f64>,
    /// Estimate of the target's normalizing constant.
    pub z_hat: f64,
    /// Proposal density evaluations the weighting scheme requires.
    pub proposal_evals: u64,
    /// Target density evaluations, always one per sample.
    pub target_evals: u64,
}

/// Proposal evaluations required by a partition: the sum of squared subset
/// sizes, from `N` for singletons up to `N^2` for one full block.
pub fn proposal_eval_cost(partition: &Partition) -> u64 {
    partition
        .subsets()
        .iter()
        .map(|s| (s.len() as u64) * (s.len() as u64))
        .sum()
}

fn check_weight_inputs(
    dim: usize,
    proposals: &[Gaussian],
    partition: &Partition,
    samples: &[Point],
) -> Result<()> {
    if proposals.len() != partition.n_total() {
        return Err(Error::DimensionMismatch {
            expected: partition.n_total(),
            got: proposals.len(),
        });
    }
    if samples.len() != partition.n_total() {
        return Err(Error::DimensionMismatch {
            expected: partition.n_total(),
            got: samples.len(),
        });
    }
    for p in proposals {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    for x in samples {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.dim(),
            });
        }
    }
    Ok(())
}

/// Shared weighting loop over one partition. `log_q(i, j)` must return
/// `ln q_j(x_i)`; the returned count is the number of lookups requested,
/// which is exactly the scheme cost `sum |S_p|^2`.
fn weight_log_ratios(
    partition: &Partition,
    target_lps: &[f64],
    mut log_q: impl FnMut(usize, usize) -> f64,
) -> Result<(Vec<f64>, u64)> {
    let n = partition.n_total();
    let mut log_w = vec![0.0f64; n];
    let mut buf: Vec<f64> = Vec::new();
    let mut evals = 0u64;
    for subset in partition.subsets() {
        for &i in subset {
            buf.clear();
            for &j in subset {
                buf.push(log_q(i, j));
            }
            evals += subset.len() as u64;
            let denom = log_mean_exp(&buf);
            let lp = target_lps[i];
            log_w[i] = if denom == f64::NEG_INFINITY {
                if lp == f64::NEG_INFINITY {
                    // Zero target over zero mixture: the sample contributes
                    // nothing either way.
                    f64::NEG_INFINITY
                } else {
                    return Err(Error::NonFiniteWeight { sample: i });
                }
            } else {
                lp - denom
            };
        }
    }
    Ok((log_w, evals))
}

/// Computes log importance weights for `samples` under `partition`.
///
/// Sample `i` is weighted by the equal-weight mixture of the proposals in
/// its own subset, so `P = N` singletons give the standard one-proposal
/// weights and `P = 1` gives the full-mixture weights. The target is
/// evaluated once per sample; proposals are evaluated `sum |S_p|^2` times.
pub fn compute_weights<'a>(
    target: &TargetDensity,
    proposals: &[Gaussian],
    partition: &'a Partition,
    samples: &'a [Point],
) -> Result<WeightedSamples<'a>> {
    check_weight_inputs(target.dim(), proposals, partition, samples)?;
    let target_lps = target_log_densities(target, samples)?;
    let (log_weights, proposal_evals) = weight_log_ratios(partition, &target_lps, |i, j| {
        proposals[j].logpdf_unchecked(&samples[i])
    })?;
    Ok(WeightedSamples {
        samples,
        partition,
        log_weights,
        proposal_evals,
        target_evals: samples.len() as u64,
    })
}

/// A dense table of `ln q_j(x_i)` values filled on demand.
///
/// Reusing one cache across several partitions over the same proposals and
/// samples evaluates each (sample, proposal) pair at most once, at `8 n^2`
/// bytes of memory. [`reset`](ProposalEvalCache::reset) clears the table
/// for a new sample set without reallocating.
pub struct ProposalEvalCache {
    n: usize,
    table: Vec<f64>,
    filled: u64,
}

impl ProposalEvalCache {
    /// An empty cache for `n` proposals and `n` samples.
    pub fn new(n: usize) -> Self {
        ProposalEvalCache {
            n,
            table: vec![f64::NAN; n * n],
            filled: 0,
        }
    }

    /// Number of proposals the cache is sized for.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct (sample, proposal) pairs evaluated so far.
    pub fn distinct_evals(&self) -> u64 {
        self.filled
    }

    /// Forgets all cached values.
    pub fn reset(&mut self) {
        self.table.fill(f64::NAN);
        self.filled = 0;
    }

    #[inline]
    fn get_or_fill(&mut self, i: usize, j: usize, fill: impl FnOnce() -> f64) -> f64 {
        let slot = &mut self.table[i * self.n + j];
        if slot.is_nan() {
            *slot = fill();
            self.filled += 1;
        }
        *slot
    }
}

/// Like [`compute_weights`], but with precomputed target log-densities and
/// a shared proposal evaluation cache.
///
/// Produces bitwise the same weights as [`compute_weights`] on the same
/// inputs. The `proposal_evals` counter still reports the scheme cost
/// `sum |S_p|^2`; how many of those lookups hit the cache is visible via
/// [`ProposalEvalCache::distinct_evals`].
pub fn compute_weights_cached<'a>(
    target_lps: &[f64],
    proposals: &[Gaussian],
    partition: &'a Partition,
    samples: &'a [Point],
    cache: &mut ProposalEvalCache,
) -> Result<WeightedSamples<'a>> {
    let dim = proposals
        .first()
        .ok_or(Error::InvalidSize("needs at least one proposal"))?
        .dim();
    check_weight_inputs(dim, proposals, partition, samples)?;
    if target_lps.len() != samples.len() {
        return Err(Error::DimensionMismatch {
            expected: samples.len(),
            got: target_lps.len(),
        });
    }
    if cache.n != proposals.len() {
        return Err(Error::DimensionMismatch {
            expected: proposals.len(),
            got: cache.n,
        });
    }
    let (log_weights, proposal_evals) = weight_log_ratios(partition, target_lps, |i, j| {
        cache.get_or_fill(i, j, || proposals[j].logpdf_unchecked(&samples[i]))
    })?;
    Ok(WeightedSamples {
        samples,
        partition,
        log_weights,
        proposal_evals,
        target_evals: samples.len() as u64,
    })
}

// ---------------------------------------------------------------------------
// Estimates
// ---------------------------------------------------------------------------

impl<'a> WeightedSamples<'a> {
    /// The weighted samples.
    pub fn samples(&self) -> &[Point] {
        self.samples
    }

    /// The partition the weights were computed under.
    pub fn partition(&self) -> &Partition {
        self.partition
    }

    /// Natural logarithms of the importance weights; finite or `-inf`.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Proposal evaluations the weighting required.
    pub fn proposal_evals(&self) -> u64 {
        self.proposal_evals
    }

    /// Target evaluations the weighting required (one per sample).
    pub fn target_evals(&self) -> u64 {
        self.target_evals
    }

    /// Self-normalized estimate of `E_pi[f]` together with the normalizing
    /// constant estimate `z_hat = (1/N) sum_i w_i`.
    ///
    /// Weights are exponentiated after subtracting their maximum, so only
    /// ratios to the largest weight matter. For `f` constant at 1 the
    /// estimate is exactly 1. Fails with [`Error::AllWeightsZero`] when no
    /// sample carries weight.
    pub fn estimate_moment<F>(&self, f: F) -> Result<EstimateResult>
    where
        F: Fn(&Point) -> Vec<f64>,
    {
        let (max_lw, weights, weight_sum) = self.shifted_weights()?;
        let acc = self.accumulate(&weights, &f)?;
        let n = self.samples.len() as f64;
        let moment = acc.iter().map(|a| a / weight_sum).collect();
        let z_hat = exp(max_lw) * weight_sum / n;
        Ok(EstimateResult {
            moment,
            z_hat,
            proposal_evals: self.proposal_evals,
            target_evals: self.target_evals,
        })
    }

    /// Unnormalized estimate `(1/N) sum_i w_i f(x_i)`, one entry per output
    /// component of `f`.
    ///
    /// Unlike the self-normalized form this needs no weight mass: when all
    /// weights are zero the estimate is simply zero.
    pub fn estimate_unnormalized<F>(&self, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&Point) -> Vec<f64>,
    {
        let n = self.samples.len() as f64;
        match self.shifted_weights() {
            Ok((max_lw, weights, _)) => {
                let acc = self.accumulate(&weights, &f)?;
                Ok(acc.iter().map(|a| exp(max_lw) * a / n).collect())
            }
            Err(Error::AllWeightsZero) => Ok(vec![0.0; f(&self.samples[0]).len()]),
            Err(e) => Err(e),
        }
    }

    fn shifted_weights(&self) -> Result<(f64, Vec<f64>, f64)> {
        let mut max_lw = f64::NEG_INFINITY;
        for &lw in &self.log_weights {
            if lw > max_lw {
                max_lw = lw;
            }
        }
        if max_lw == f64::NEG_INFINITY {
            return Err(Error::AllWeightsZero);
        }
        let mut weights = Vec::with_capacity(self.log_weights.len());
        let mut weight_sum = 0.0;
        for &lw in &self.log_weights {
            let w = exp(lw - max_lw);
            weights.push(w);
            weight_sum += w;
        }
        Ok((max_lw, weights, weight_sum))
    }

    fn accumulate<F>(&self, weights: &[f64], f: &F) -> Result<Vec<f64>>
    where
        F: Fn(&Point) -> Vec<f64>,
    {
        let mut acc: Vec<f64> = Vec::new();
        for (i, (x, &w)) in self.samples.iter().zip(weights).enumerate() {
            let fx = f(x);
            if i == 0 {
                acc = vec![0.0; fx.len()];
            } else if fx.len() != acc.len() {
                return Err(Error::DimensionMismatch {
                    expected: acc.len(),
                    got: fx.len(),
                });
            }
            for (a, v) in acc.iter_mut().zip(fx) {
                *a += w * v;
            }
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
