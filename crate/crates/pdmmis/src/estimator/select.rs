//! Iterative choice of the number of mixtures `P`.
//!
//! Walks a strictly decreasing schedule of `P` values starting at `P = N`,
//! computing the self-normalized estimate at each step over one fixed
//! sample set, and stops as soon as the estimate moves by less than a
//! relative threshold from one step to the next. Coarser partitions cost
//! more proposal evaluations, so the walk amounts to paying for accuracy
//! only until the estimate stops changing.
//!
//! All steps share a [`ProposalEvalCache`], so each (sample, proposal)
//! pair is evaluated at most once across the whole schedule and the total
//! proposal work is bounded by `N^2` regardless of schedule length.

use alloc::vec::Vec;

use rand::Rng;

use crate::density::{Gaussian, Point, TargetDensity};
use crate::math::abs;
use crate::partition::Partition;
use crate::{Error, Result};

use super::{compute_weights_cached, target_log_densities, EstimateResult, ProposalEvalCache};

/// One evaluated schedule entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionStep {
    /// The random-blocks partition used at this step.
    pub partition: Partition,
    /// The self-normalized estimate under that partition.
    pub estimate: EstimateResult,
    /// Largest relative change of any estimate component against the
    /// previous step; `None` for the first step.
    pub rel_change: Option<f64>,
}

/// The trace of a schedule walk; the last step is the chosen one.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Every evaluated step, in schedule order.
    pub steps: Vec<SelectionStep>,
    /// Distinct (sample, proposal) pairs evaluated across all steps;
    /// at most `N^2`.
    pub distinct_proposal_evals: u64,
}

impl SelectionResult {
    /// The step the walk stopped at.
    pub fn chosen(&self) -> &SelectionStep {
        self.steps.last().expect("a selection holds at least one step")
    }

    /// Number of subsets of the chosen partition.
    pub fn chosen_p(&self) -> usize {
        self.chosen().partition.num_subsets()
    }
}

/// Largest relative change of any component, measured against the previous
/// value. A previous value of zero counts as changed unless reproduced
/// exactly.
fn max_rel_change(prev: &EstimateResult, cur: &EstimateResult) -> Result<f64> {
    if prev.moment.len() != cur.moment.len() {
        return Err(Error::DimensionMismatch {
            expected: prev.moment.len(),
            got: cur.moment.len(),
        });
    }
    let pairs = prev
        .moment
        .iter()
        .zip(cur.moment.iter())
        .chain(core::iter::once((&prev.z_hat, &cur.z_hat)));
    let mut worst = 0.0f64;
    for (&p, &c) in pairs {
        let rel = if c == p {
            0.0
        } else {
            let denom = abs(p).max(f64::MIN_POSITIVE);
            abs(c - p) / denom
        };
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

fn check_schedule(n: usize, schedule: &[usize], threshold: f64) -> Result<()> {
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::InvalidSchedule("threshold must be positive and finite"));
    }
    let first = match schedule.first() {
        Some(&f) => f,
        None => return Err(Error::InvalidSchedule("schedule must be nonempty")),
    };
    if first != n {
        return Err(Error::InvalidSchedule(
            "schedule must start at the number of proposals",
        ));
    }
    for pair in schedule.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidSchedule("schedule must be strictly decreasing"));
        }
    }
    if *schedule.last().unwrap() == 0 {
        return Err(Error::InvalidSchedule("schedule values must be at least 1"));
    }
    Ok(())
}

/// Walks `schedule` from `P = N` downward and stops at the first step whose
/// estimate differs from the previous one by less than `threshold` in every
/// component (moment entries and `z_hat`), or at the end of the schedule.
///
/// Each step groups the proposals by a fresh [`Partition::random_blocks`]
/// draw from `rng`. The returned trace records every evaluated step; its
/// last entry is the chosen one. Each step's estimate is bitwise the one
/// [`compute_weights`](super::compute_weights) and
/// [`estimate_moment`](super::WeightedSamples::estimate_moment) would give
/// for that step's partition on the same inputs.
pub fn select_num_mixtures<R, F>(
    target: &TargetDensity,
    proposals: &[Gaussian],
    samples: &[Point],
    f: F,
    schedule: &[usize],
    threshold: f64,
    rng: &mut R,
) -> Result<SelectionResult>
where
    R: Rng + ?Sized,
    F: Fn(&Point) -> Vec<f64>,
{
    let n = proposals.len();
    check_schedule(n, schedule, threshold)?;
    let target_lps = target_log_densities(target, samples)?;
    let mut cache = ProposalEvalCache::new(n);
    let mut steps: Vec<SelectionStep> = Vec::new();
    for &p in schedule {
        let partition = Partition::random_blocks(n, p, rng)?;
        let ws = compute_weights_cached(&target_lps, proposals, &partition, samples, &mut cache)?;
        let estimate = ws.estimate_moment(&f)?;
        drop(ws);
        let rel_change = match steps.last() {
            Some(prev) => Some(max_rel_change(&prev.estimate, &estimate)?),
            None => None,
        };
        let stop = matches!(rel_change, Some(ch) if ch < threshold);
        steps.push(SelectionStep {
            partition,
            estimate,
            rel_change,
        });
        if stop {
            break;
        }
    }
    Ok(SelectionResult {
        steps,
        distinct_proposal_evals: cache.distinct_evals(),
    })
}
