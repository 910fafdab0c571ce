//! Dense sets of interned atom indices.

use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of `0..universe`. All complex-algebra elements over explicit
/// atom lists are values of this type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AtomSet(FixedBitSet);

impl AtomSet {
    pub fn empty(universe: usize) -> Self {
        AtomSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        AtomSet(bits)
    }

    pub fn singleton(universe: usize, atom: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(atom);
        s
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(universe: usize, atoms: I) -> Self {
        let mut s = Self::empty(universe);
        for a in atoms {
            s.insert(a);
        }
        s
    }

    /// Builds a set from the low `universe` bits of `mask`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        debug_assert!(universe <= 64);
        Self::from_atoms(universe, (0..universe).filter(|i| mask >> i & 1 == 1))
    }

    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.universe() <= 64);
        self.iter().fold(0u64, |m, a| m | 1 << a)
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, atom: usize) {
        self.0.insert(atom);
    }

    pub fn clear(&mut self) {
        self.0.clear();
    }

    pub fn remove(&mut self, atom: usize) {
        self.0.set(atom, false);
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.0.contains(atom)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.0.count_ones(..) == self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.ones().next()
    }

    pub fn union_with(&mut self, other: &AtomSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &AtomSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &AtomSet) {
        self.0.difference_with(&other.0);
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn complement(&self) -> AtomSet {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        AtomSet(bits)
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &AtomSet) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, a) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}
