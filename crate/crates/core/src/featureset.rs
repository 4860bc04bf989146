//! Sets of features as bitmasks.
//!
//! Feature ids are 1-based (`1..=m`); bit `id - 1` carries feature `id`.
//! Ordering is lexicographic on the sorted id lists, so `{1} < {1,2} < {2}`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FeatureSet(u64);

impl FeatureSet {
    pub const CAPACITY: usize = 64;

    pub const fn empty() -> Self {
        FeatureSet(0)
    }

    /// `{1, ..., m}`.
    pub fn full(m: usize) -> Self {
        assert!(m <= Self::CAPACITY, "feature count {m} exceeds capacity");
        if m == Self::CAPACITY {
            FeatureSet(u64::MAX)
        } else {
            FeatureSet((1u64 << m) - 1)
        }
    }

    pub const fn from_bits(bits: u64) -> Self {
        FeatureSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Builds a set from 1-based ids, rejecting ids outside `1..=m`.
    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I, m: usize) -> Result<Self> {
        let mut set = FeatureSet::empty();
        for id in ids {
            if id == 0 || id > m {
                return Err(Error::InvalidArgument(format!(
                    "feature id {id} outside 1..={m}"
                )));
            }
            set = set.with(id);
        }
        Ok(set)
    }

    pub fn singleton(id: usize) -> Self {
        FeatureSet::empty().with(id)
    }

    pub fn contains(self, id: usize) -> bool {
        (1..=Self::CAPACITY).contains(&id) && self.0 & (1u64 << (id - 1)) != 0
    }

    /// Membership by 0-based position.
    pub fn contains_index(self, index: usize) -> bool {
        self.0 & (1u64 << index) != 0
    }

    pub fn with(self, id: usize) -> Self {
        debug_assert!((1..=Self::CAPACITY).contains(&id));
        FeatureSet(self.0 | (1u64 << (id - 1)))
    }

    pub fn without(self, id: usize) -> Self {
        debug_assert!((1..=Self::CAPACITY).contains(&id));
        FeatureSet(self.0 & !(1u64 << (id - 1)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: FeatureSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_superset(self, other: FeatureSet) -> bool {
        other.is_subset(self)
    }

    pub fn intersects(self, other: FeatureSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 | other.0)
    }

    pub fn intersection(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 & other.0)
    }

    /// `{1..m} \ self`.
    pub fn complement(self, m: usize) -> Self {
        FeatureSet(!self.0 & Self::full(m).0)
    }

    /// 1-based ids in ascending order.
    pub fn ids(self) -> impl Iterator<Item = usize> {
        self.indices().map(|i| i + 1)
    }

    /// 0-based positions in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.ids().collect()
    }

    /// Every subset of `{1..m}`, in increasing bitmask order.
    pub fn all_subsets(m: usize) -> impl Iterator<Item = FeatureSet> {
        assert!(m < Self::CAPACITY);
        (0..(1u64 << m)).map(FeatureSet)
    }
}

impl Ord for FeatureSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ids().cmp(other.ids())
    }
}

impl PartialOrd for FeatureSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, id) in self.ids().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for FeatureSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.ids())
    }
}

impl<'de> Deserialize<'de> for FeatureSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        FeatureSet::from_ids(ids, Self::CAPACITY).map_err(serde::de::Error::custom)
    }
}

/// Sorts a family canonically and removes duplicates.
pub fn canonicalize(family: &mut Vec<FeatureSet>) {
    family.sort();
    family.dedup();
}
