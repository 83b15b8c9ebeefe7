use std::cmp::Ordering;
use std::fmt;

use crate::foodweb::SpeciesId;

/// A subset of the species `0..universe`, stored as a bitset with a cached
/// cardinality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpeciesSet {
    words: Vec<u64>,
    universe: usize,
    len: usize,
}

impl SpeciesSet {
    pub fn empty(universe: usize) -> Self {
        SpeciesSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        Self::from_ids(universe, (0..universe).map(SpeciesId))
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = SpeciesId>) -> Self {
        let mut set = Self::empty(universe);
        for id in ids {
            set.insert(id);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, id: SpeciesId) -> bool {
        id.0 < self.universe && self.words[id.0 / 64] >> (id.0 % 64) & 1 == 1
    }

    /// Returns true if the species was newly inserted. Panics if `id` is
    /// outside the universe.
    pub fn insert(&mut self, id: SpeciesId) -> bool {
        assert!(id.0 < self.universe, "species {} outside universe {}", id.0, self.universe);
        let word = &mut self.words[id.0 / 64];
        let bit = 1u64 << (id.0 % 64);
        let fresh = *word & bit == 0;
        *word |= bit;
        self.len += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, id: SpeciesId) -> bool {
        if id.0 >= self.universe {
            return false;
        }
        let word = &mut self.words[id.0 / 64];
        let bit = 1u64 << (id.0 % 64);
        let present = *word & bit != 0;
        *word &= !bit;
        self.len -= present as usize;
        present
    }

    pub fn is_subset(&self, other: &SpeciesSet) -> bool {
        self.iter().all(|id| other.contains(id))
    }

    pub fn union_with(&mut self, other: &SpeciesSet) {
        for id in other.iter() {
            self.insert(id);
        }
    }

    /// Members in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = SpeciesId> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(SpeciesId(w * 64 + bit))
            })
        })
    }

    pub fn to_vec(&self) -> Vec<SpeciesId> {
        self.iter().collect()
    }

    /// Lexicographic order on the ascending member sequences, so a set sorts
    /// before every proper extension of it (`{a} < {a,b} < {b}`).
    pub fn lex_cmp(&self, other: &SpeciesSet) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for SpeciesSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|id| id.0)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn insert_remove_tracks_len() {
        let mut s = SpeciesSet::empty(130);
        assert!(s.insert(SpeciesId(3)));
        assert!(!s.insert(SpeciesId(3)));
        assert!(s.insert(SpeciesId(129)));
        assert_eq!(s.len(), 2);
        assert!(s.remove(SpeciesId(3)));
        assert!(!s.remove(SpeciesId(3)));
        assert_eq!(s.len(), 1);
        assert_eq!(s.to_vec(), vec![SpeciesId(129)]);
    }

    #[test]
    fn lex_order_prefix_first() {
        let a = SpeciesSet::from_ids(3, [SpeciesId(0)]);
        let ab = SpeciesSet::from_ids(3, [SpeciesId(0), SpeciesId(1)]);
        let b = SpeciesSet::from_ids(3, [SpeciesId(1)]);
        let empty = SpeciesSet::empty(3);
        assert_eq!(empty.lex_cmp(&a), Ordering::Less);
        assert_eq!(a.lex_cmp(&ab), Ordering::Less);
        assert_eq!(ab.lex_cmp(&b), Ordering::Less);
    }

    proptest! {
        #[test]
        fn len_matches_popcount(ids in proptest::collection::vec(0usize..200, 0..60)) {
            let set = SpeciesSet::from_ids(200, ids.iter().copied().map(SpeciesId));
            let popcount: u32 = set.words.iter().map(|w| w.count_ones()).sum();
            prop_assert_eq!(set.len(), popcount as usize);
            let mut uniq = ids.clone();
            uniq.sort();
            uniq.dedup();
            prop_assert_eq!(set.iter().map(|s| s.0).collect::<Vec<_>>(), uniq);
        }
    }
}
