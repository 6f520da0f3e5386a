//! Vertex partitions and k-way cuts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeighting, Instance};
use crate::rational::{self, Rational};

/// Largest vertex count for exhaustive partition enumeration.
pub const EXACT_PARTITION_LIMIT: usize = 10;

/// A partition of the vertices into nonempty blocks together with the edges
/// joining different blocks. `labels` is the restricted-growth form: vertex 0
/// is in block 0 and each new block number is one more than the largest seen
/// so far, which makes equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KWayCut {
    pub labels: Vec<usize>,
    pub parts: usize,
    pub crossing: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub capacity: Rational,
}

impl KWayCut {
    pub fn new(inst: &Instance, labels: &[usize], w: &EdgeWeighting) -> Result<KWayCut> {
        if labels.len() != inst.n {
            return Err(Error::invalid("partition", "label count differs from n"));
        }
        let labels = canonical_labels(labels);
        let parts = labels.iter().max().map_or(0, |m| m + 1);
        if parts < 2 {
            return Err(Error::invalid("partition", "needs at least two blocks"));
        }
        let crossing = crossing_edges(inst, &labels);
        let capacity = w.sum_over(&crossing);
        Ok(KWayCut {
            labels,
            parts,
            crossing,
            capacity,
        })
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.parts];
        for (v, &b) in self.labels.iter().enumerate() {
            blocks[b].push(v);
        }
        blocks
    }

    pub fn is_consistent(&self, inst: &Instance, w: &EdgeWeighting) -> bool {
        let blocks = self.blocks();
        blocks.iter().all(|b| !b.is_empty())
            && canonical_labels(&self.labels) == self.labels
            && crossing_edges(inst, &self.labels) == self.crossing
            && w.sum_over(&self.crossing) == self.capacity
    }
}

pub fn crossing_edges(inst: &Instance, labels: &[usize]) -> Vec<usize> {
    inst.edges
        .iter()
        .enumerate()
        .filter(|(_, e)| labels[e.tail] != labels[e.head])
        .map(|(i, _)| i)
        .collect()
}

/// Renumbers blocks in order of first appearance.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// Calls `visit` with every partition of `0..n` into exactly `parts`
/// nonempty blocks, as restricted-growth label vectors in lexicographic order.
pub fn for_each_partition(n: usize, parts: usize, mut visit: impl FnMut(&[usize])) {
    if parts == 0 || parts > n {
        return;
    }
    let mut labels = vec![0usize; n];
    rec(&mut labels, 1, 1, parts, &mut visit);

    fn rec(
        labels: &mut Vec<usize>,
        pos: usize,
        used: usize,
        parts: usize,
        visit: &mut impl FnMut(&[usize]),
    ) {
        let n = labels.len();
        if pos == n {
            if used == parts {
                visit(labels);
            }
            return;
        }
        // Not enough positions left to open the missing blocks.
        if parts - used > n - pos {
            return;
        }
        for b in 0..=used.min(parts - 1) {
            labels[pos] = b;
            let used = if b == used { used + 1 } else { used };
            rec(labels, pos + 1, used, parts, visit);
        }
    }
}

/// Stirling number of the second kind, for count checks.
pub fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[k]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_match_stirling() {
        for n in 1..=7 {
            for k in 1..=n {
                let mut count = 0u128;
                for_each_partition(n, k, |_| count += 1);
                assert_eq!(count, stirling2(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn labels_are_restricted_growth() {
        for_each_partition(5, 3, |l| {
            assert_eq!(canonical_labels(l), l);
            assert_eq!(l.iter().max(), Some(&2));
        });
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(10, 3), 9330);
        assert_eq!(stirling2(4, 2), 7);
    }
}
