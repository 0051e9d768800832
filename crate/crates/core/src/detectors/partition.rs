use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Contiguous user clusters: cluster `c` owns indices `offset_c..offset_c + N_c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPartition {
    sizes: Vec<usize>,
}

impl ClusterPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::invalid("partition needs at least one cluster"));
        }
        if sizes.contains(&0) {
            return Err(Error::invalid("clusters must be non-empty"));
        }
        Ok(ClusterPartition { sizes })
    }

    /// `clusters` equal clusters over `users` users.
    pub fn uniform(users: usize, clusters: usize) -> Result<Self> {
        if clusters == 0 || users % clusters != 0 {
            return Err(Error::invalid(format!(
                "{users} users cannot be split evenly into {clusters} clusters"
            )));
        }
        Self::new(vec![users / clusters; clusters])
    }

    /// Groups users by cluster label, keeping input order inside a cluster.
    /// Returns the partition and the permutation into that canonical order.
    pub fn from_labels(labels: &[usize]) -> Result<(Self, Permutation)> {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| labels[i]);
        let mut sizes: Vec<usize> = Vec::new();
        let mut last = None;
        for &i in &order {
            if last == Some(labels[i]) {
                *sizes.last_mut().expect("non-empty") += 1;
            } else {
                sizes.push(1);
                last = Some(labels[i]);
            }
        }
        Ok((Self::new(sizes)?, Permutation { order }))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_clusters(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.sizes
            .iter()
            .map(|&s| {
                let r = start..start + s;
                start += s;
                r
            })
            .collect()
    }

    /// Cluster index of each user.
    pub fn labels(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
            .collect()
    }
}

/// Maps canonical (cluster-contiguous) positions to original user indices:
/// canonical slot `k` holds original user `order[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn to_canonical<T: Clone>(&self, original: &[T]) -> Vec<T> {
        self.order.iter().map(|&i| original[i].clone()).collect()
    }

    pub fn to_original<T: Clone>(&self, canonical: &[T]) -> Vec<T> {
        let mut out = canonical.to_vec();
        for (k, &i) in self.order.iter().enumerate() {
            out[i] = canonical[k].clone();
        }
        out
    }

    /// Reorders the columns of a channel matrix into canonical order.
    pub fn permute_columns(&self, h: &CMatrix) -> CMatrix {
        h.select_columns(&self.order)
    }
}
