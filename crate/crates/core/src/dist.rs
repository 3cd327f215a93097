//! Finite count tables with exact rational probabilities.

use num_rational::Ratio;
use serde::Serialize;
use std::collections::BTreeMap;

/// Counts over a finite outcome set; probabilities are `count / total`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistTable<K: Ord> {
    counts: BTreeMap<K, u64>,
    total: u64,
}

impl<K: Ord> Default for DistTable<K> {
    fn default() -> Self {
        DistTable {
            counts: BTreeMap::new(),
            total: 0,
        }
    }
}

impl<K: Ord + Clone> DistTable<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: K) {
        self.add_count(key, 1);
    }

    pub fn add_count(&mut self, key: K, count: u64) {
        *self.counts.entry(key).or_default() += count;
        self.total += count;
    }

    pub fn merge(&mut self, other: &DistTable<K>) {
        for (k, &c) in &other.counts {
            self.add_count(k.clone(), c);
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, key: &K) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<K, u64> {
        &self.counts
    }

    /// Exact probability; `None` for an empty table.
    pub fn prob(&self, key: &K) -> Option<Ratio<u64>> {
        (self.total > 0).then(|| Ratio::new(self.count(key), self.total))
    }

    pub fn to_f64(&self) -> BTreeMap<K, f64> {
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / self.total as f64))
            .collect()
    }
}

impl<K: Ord + Clone> FromIterator<K> for DistTable<K> {
    fn from_iter<I: IntoIterator<Item = K>>(iter: I) -> Self {
        let mut t = DistTable::new();
        for k in iter {
            t.add(k);
        }
        t
    }
}
