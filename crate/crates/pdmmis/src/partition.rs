//! Partitions of the proposal index set `{0, .., N-1}`.
//!
//! A [`Partition`] fixes which proposals share a mixture denominator. It is
//! validated at construction and stored in a canonical form: indices sorted
//! within each subset, subsets ordered by their smallest index. Two
//! partitions describing the same grouping therefore compare equal, and
//! downstream weight computations are insensitive to the order in which a
//! caller listed the subsets.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, PartitionViolation, Result};

/// A disjoint, exhaustive grouping of `{0, .., n_total-1}` into nonempty
/// subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    subsets: Vec<Vec<usize>>,
    group_of: Vec<usize>,
}

impl Partition {
    /// Validates and canonicalizes explicit subsets.
    pub fn from_subsets(subsets: Vec<Vec<usize>>, n_total: usize) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::InvalidSize("partition needs n_total >= 1"));
        }
        if subsets.is_empty() {
            return Err(Error::NotAPartition(PartitionViolation::NoSubsets));
        }
        let mut seen = vec![false; n_total];
        let mut covered = 0usize;
        for (s, subset) in subsets.iter().enumerate() {
            if subset.is_empty() {
                return Err(Error::NotAPartition(PartitionViolation::EmptySubset {
                    subset: s,
                }));
            }
            for &i in subset {
                if i >= n_total {
                    return Err(Error::NotAPartition(PartitionViolation::IndexOutOfRange {
                        index: i,
                    }));
                }
                if seen[i] {
                    return Err(Error::NotAPartition(PartitionViolation::DuplicateIndex {
                        index: i,
                    }));
                }
                seen[i] = true;
                covered += 1;
            }
        }
        if covered < n_total {
            let index = seen.iter().position(|&s| !s).unwrap();
            return Err(Error::NotAPartition(PartitionViolation::MissingIndex {
                index,
            }));
        }
        let mut subsets = subsets;
        for subset in subsets.iter_mut() {
            subset.sort_unstable();
        }
        subsets.sort_unstable_by_key(|s| s[0]);
        let mut group_of = vec![0usize; n_total];
        for (g, subset) in subsets.iter().enumerate() {
            for &i in subset {
                group_of[i] = g;
            }
        }
        Ok(Partition { subsets, group_of })
    }

    /// `n` singleton subsets: every proposal is weighted by itself alone.
    pub fn singleton(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("partition needs n >= 1"));
        }
        let subsets = (0..n).map(|i| vec![i]).collect();
        let group_of = (0..n).collect();
        Ok(Partition { subsets, group_of })
    }

    /// One subset holding everything: the full deterministic mixture.
    pub fn full(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("partition needs n >= 1"));
        }
        Ok(Partition {
            subsets: vec![(0..n).collect()],
            group_of: vec![0; n],
        })
    }

    /// Splits a permutation of `{0, .., n-1}` into `p` runs of consecutive
    /// positions, the first `n mod p` runs one element longer.
    ///
    /// Subset sizes therefore differ by at most one. The order itself is
    /// validated like any other subset list.
    pub fn contiguous_blocks(order: &[usize], p: usize) -> Result<Self> {
        let n = order.len();
        if p == 0 || p > n {
            return Err(Error::InvalidSize("needs 1 <= p <= n"));
        }
        let base = n / p;
        let extra = n % p;
        let mut subsets = Vec::with_capacity(p);
        let mut start = 0usize;
        for b in 0..p {
            let len = base + usize::from(b < extra);
            subsets.push(order[start..start + len].to_vec());
            start += len;
        }
        Partition::from_subsets(subsets, n)
    }

    /// Shuffles `{0, .., n-1}` with `rng` and cuts the result into `p`
    /// near-equal blocks, assigning proposals to groups uniformly at random.
    pub fn random_blocks<R: Rng + ?Sized>(n: usize, p: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("partition needs n >= 1"));
        }
        if p == 0 || p > n {
            return Err(Error::InvalidSize("needs 1 <= p <= n"));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Partition::contiguous_blocks(&order, p)
    }

    /// For a `j x t` grid of indices laid out row by row (`i = t_row * j +
    /// j_col`), groups the `t` rows: subset `r` is `{r*j, .., r*j + j - 1}`.
    pub fn grid_spatial(j: usize, t: usize) -> Result<Self> {
        if j == 0 || t == 0 {
            return Err(Error::InvalidSize("grid needs j >= 1 and t >= 1"));
        }
        let subsets = (0..t).map(|r| (r * j..(r + 1) * j).collect()).collect();
        Partition::from_subsets(subsets, j * t)
    }

    /// For the same `j x t` layout, groups the `j` columns: subset `c` is
    /// `{c, c + j, .., c + (t-1)*j}`.
    pub fn grid_temporal(j: usize, t: usize) -> Result<Self> {
        if j == 0 || t == 0 {
            return Err(Error::InvalidSize("grid needs j >= 1 and t >= 1"));
        }
        let subsets = (0..j)
            .map(|c| (0..t).map(|r| r * j + c).collect())
            .collect();
        Partition::from_subsets(subsets, j * t)
    }

    /// Number of subsets, `P`.
    pub fn num_subsets(&self) -> usize {
        self.subsets.len()
    }

    /// Number of indices covered, `N`.
    pub fn n_total(&self) -> usize {
        self.group_of.len()
    }

    /// The subsets in canonical order.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// Subset position of index `i`; panics if `i >= n_total`.
    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    /// Re-checks every invariant, including the cached index-to-subset map.
    ///
    /// Construction already guarantees these; this exists so long-lived or
    /// deserialized partitions can be audited.
    pub fn validate(&self) -> Result<()> {
        let n = self.group_of.len();
        let rebuilt = Partition::from_subsets(self.subsets.clone(), n)?;
        if rebuilt.subsets != self.subsets {
            return Err(Error::NotAPartition(PartitionViolation::DuplicateIndex {
                index: 0,
            }));
        }
        for (i, &g) in self.group_of.iter().enumerate() {
            if g >= self.subsets.len() || !self.subsets[g].contains(&i) {
                return Err(Error::NotAPartition(PartitionViolation::MissingIndex {
                    index: i,
                }));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    /// Renders as a list of lists, e.g. `[[0, 1], [2, 3]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (s, subset) in self.subsets.iter().enumerate() {
            if s > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (k, i) in subset.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
