use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde_json::json;

use super::cover::Cover;
use crate::error::{domain, Result};
use crate::systems::Scaffold;

/// A partition of a scaffold. Member 0 is distinguished and may be empty;
/// it is the one member allowed to reach infinity. Stored as one label per
/// point; member sets are built on request.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    count: usize,
    labels: Vec<usize>,
}

impl Partition {
    /// Validates disjointness and covering.
    pub fn new(universe: usize, members: Vec<FixedBitSet>) -> Result<Self> {
        if members.is_empty() {
            return domain("partition needs at least one member");
        }
        let mut labels = vec![usize::MAX; universe];
        for (j, m) in members.iter().enumerate() {
            if m.len() != universe {
                return domain("partition member built over a different scaffold");
            }
            for x in m.ones() {
                if labels[x] != usize::MAX {
                    return domain(format!("point {x} lies in two partition members"));
                }
                labels[x] = j;
            }
        }
        if labels.contains(&usize::MAX) {
            return domain("partition does not cover the scaffold");
        }
        Ok(Self { count: members.len(), labels })
    }

    /// Partition from a label per point; label 0 is the distinguished member.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let count = labels.iter().copied().max().map_or(1, |m| m + 1);
        Self { count, labels }
    }

    /// The same labels with at least `count` members, the extra ones empty.
    pub fn with_count(mut self, count: usize) -> Self {
        self.count = self.count.max(count);
        self
    }

    pub fn from_id_lists(universe: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let members = lists
            .iter()
            .map(|l| {
                let mut s = FixedBitSet::with_capacity(universe);
                for &x in l {
                    if x >= universe {
                        return domain(format!("point id {x} outside scaffold"));
                    }
                    s.insert(x);
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(universe, members)
    }

    /// The trivial partition `{X}`.
    pub fn trivial(universe: usize) -> Self {
        Self::from_labels(vec![0; universe])
    }

    pub fn members(&self) -> Vec<FixedBitSet> {
        let mut members = vec![FixedBitSet::with_capacity(self.labels.len()); self.count];
        for (x, &l) in self.labels.iter().enumerate() {
            members[l].insert(x);
        }
        members
    }

    /// Point ids of each member, ascending.
    pub fn member_lists(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.count];
        for (x, &l) in self.labels.iter().enumerate() {
            lists[l].push(x);
        }
        lists
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> usize {
        self.labels[x]
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn universe(&self) -> usize {
        self.labels.len()
    }

    /// Number of nonempty members.
    pub fn nonempty_count(&self) -> usize {
        let mut seen = vec![false; self.count];
        self.labels.iter().for_each(|&l| seen[l] = true);
        seen.into_iter().filter(|&b| b).count()
    }

    /// Every member except the distinguished one is compact.
    pub fn is_admissible(&self, scaffold: &Scaffold) -> bool {
        self.universe() == scaffold.len() && self.members()[1..].iter().all(|m| scaffold.is_compact_set(m))
    }

    /// Common refinement; member 0 is the intersection of both member 0s.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.universe() != other.universe() {
            return domain("partitions live on different scaffolds");
        }
        let keys: Vec<Vec<usize>> =
            (0..self.universe()).map(|x| vec![self.labels[x], other.labels[x]]).collect();
        Ok(Self::from_keys(&keys))
    }

    /// `C^n = C ∨ T^{-1} C ∨ … ∨ T^{-(n-1)} C`; member 0 is the cell whose
    /// orbit stays in member 0.
    pub fn iterate(&self, scaffold: &Scaffold, n: usize) -> Result<Partition> {
        if n == 0 {
            return domain("partition iterate needs n >= 1");
        }
        if self.universe() != scaffold.len() {
            return domain("partition does not match the scaffold");
        }
        let orbits = scaffold.orbits(n);
        let keys: Vec<Vec<usize>> = (0..scaffold.len())
            .map(|x| orbits.iter().map(|row| self.labels[row[x]]).collect())
            .collect();
        Ok(Self::from_keys(&keys))
    }

    /// Labels by lexicographic key order; the all-zero key is label 0.
    pub(crate) fn from_keys(keys: &[Vec<usize>]) -> Partition {
        let mut ids: BTreeMap<&[usize], usize> = BTreeMap::new();
        let width = keys.first().map_or(0, |k| k.len());
        let zero = vec![0usize; width];
        let has_zero = keys.iter().any(|k| *k == zero);
        let offset = if has_zero { 0 } else { 1 };
        let mut sorted: Vec<&[usize]> = keys.iter().map(|k| k.as_slice()).collect();
        sorted.sort();
        sorted.dedup();
        for (i, k) in sorted.into_iter().enumerate() {
            ids.insert(k, i + offset);
        }
        let labels: Vec<usize> = keys.iter().map(|k| ids[k.as_slice()]).collect();
        Self::from_labels(labels)
    }

    /// The nonempty members as a cover.
    pub fn as_cover(&self, scaffold: &Scaffold) -> Result<Cover> {
        Cover::new(scaffold, self.members().into_iter().filter(|m| !m.is_clear()).collect())
    }

    /// Keeps the first `universe` points (a subsystem listed first); member
    /// indices are unchanged so the distinguished member stays 0.
    pub fn restrict(&self, universe: usize) -> Partition {
        Partition { count: self.count, labels: self.labels[..universe].to_vec() }
    }

    /// `{members: [[ids…]…], distinguished: 0}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({ "members": self.member_lists(), "distinguished": 0 })
    }
}
