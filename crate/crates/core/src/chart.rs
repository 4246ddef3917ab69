//! Charts: (multidegree, dimension) ↦ PGroup with optional labels.

use std::collections::BTreeMap;

use crate::arith::PGroup;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartEntry {
    pub group: PGroup,
    pub labels: Vec<String>,
}

/// Key order is lexicographic in (multidegree, dimension), which is also the
/// serialization order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub p: u64,
    pub r: u32,
    pub ell: usize,
    cells: BTreeMap<(Vec<u64>, i64), ChartEntry>,
}

impl Chart {
    pub fn new(p: u64, r: u32, ell: usize) -> Self {
        Self { p, r, ell, cells: BTreeMap::new() }
    }

    pub fn insert(&mut self, deg: Vec<u64>, dim: i64, group: PGroup, labels: Vec<String>) {
        self.cells.insert((deg, dim), ChartEntry { group, labels });
    }

    /// The group at a cell; absent cells are trivial.
    pub fn group(&self, deg: &[u64], dim: i64) -> PGroup {
        self.cells.get(&(deg.to_vec(), dim)).map(|e| e.group.clone()).unwrap_or_else(|| PGroup::trivial(self.p))
    }

    pub fn entry(&self, deg: &[u64], dim: i64) -> Option<&ChartEntry> {
        self.cells.get(&(deg.to_vec(), dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<u64>, i64), &ChartEntry)> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&[u64], i64, &ChartEntry) -> bool) {
        self.cells.retain(|(deg, dim), e| keep(deg, *dim, e));
    }

    /// Cell-wise comparison of groups, ignoring labels and treating absent
    /// cells as trivial. Returns the differing keys.
    pub fn group_diff(&self, other: &Chart) -> Vec<(Vec<u64>, i64)> {
        let mut keys: Vec<&(Vec<u64>, i64)> = self.cells.keys().chain(other.cells.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().filter(|(deg, dim)| self.group(deg, *dim) != other.group(deg, *dim)).cloned().collect()
    }
}
