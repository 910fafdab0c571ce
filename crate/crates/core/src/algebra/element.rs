use std::collections::BTreeSet;
use std::fmt;

use crate::AtomSet;

/// A finite or cofinite subset of the naturals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexSet {
    Finite(BTreeSet<u64>),
    /// Everything except the listed exceptions.
    Cofinite(BTreeSet<u64>),
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet::Finite(BTreeSet::new())
    }

    pub fn full() -> Self {
        IndexSet::Cofinite(BTreeSet::new())
    }

    pub fn finite<I: IntoIterator<Item = u64>>(items: I) -> Self {
        IndexSet::Finite(items.into_iter().collect())
    }

    pub fn cofinite<I: IntoIterator<Item = u64>>(exceptions: I) -> Self {
        IndexSet::Cofinite(exceptions.into_iter().collect())
    }

    pub fn contains(&self, i: u64) -> bool {
        match self {
            IndexSet::Finite(s) => s.contains(&i),
            IndexSet::Cofinite(e) => !e.contains(&i),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IndexSet::Finite(s) if s.is_empty())
    }

    pub fn is_full(&self) -> bool {
        matches!(self, IndexSet::Cofinite(e) if e.is_empty())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, IndexSet::Finite(_))
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, IndexSet::Cofinite(_))
    }

    /// Least member.
    pub fn least(&self) -> Option<u64> {
        match self {
            IndexSet::Finite(s) => s.first().copied(),
            IndexSet::Cofinite(e) => (0..).find(|i| !e.contains(i)),
        }
    }

    pub fn complement(&self) -> Self {
        match self {
            IndexSet::Finite(s) => IndexSet::Cofinite(s.clone()),
            IndexSet::Cofinite(e) => IndexSet::Finite(e.clone()),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        use IndexSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.union(b).copied().collect()),
            (Cofinite(a), Cofinite(b)) => Cofinite(a.intersection(b).copied().collect()),
            (Finite(f), Cofinite(e)) | (Cofinite(e), Finite(f)) => Cofinite(e.difference(f).copied().collect()),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    /// Members below `bound`.
    pub fn truncate(&self, bound: u64) -> Vec<u64> {
        match self {
            IndexSet::Finite(s) => s.range(..bound).copied().collect(),
            IndexSet::Cofinite(e) => (0..bound).filter(|i| !e.contains(i)).collect(),
        }
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (tag, items) = match self {
            IndexSet::Finite(s) => ("fin", s),
            IndexSet::Cofinite(e) => ("cofin", e),
        };
        let items: Vec<String> = items.iter().map(u64::to_string).collect();
        write!(f, "{tag}[{}]", items.join(","))
    }
}

/// An element over a partitioned infinite atom universe: a set of the
/// finitely many point atoms (identities) plus, for every cell of the
/// partition, a finite or cofinite set of indices within that cell.
///
/// Cells are fixed by the rule family that owns the universe, so every
/// element covers the whole universe and cells never overlap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SymbolicElement {
    pub points: AtomSet,
    pub cells: Vec<IndexSet>,
}

impl SymbolicElement {
    pub fn empty(points: usize, cells: usize) -> Self {
        SymbolicElement { points: AtomSet::empty(points), cells: vec![IndexSet::empty(); cells] }
    }

    pub fn full(points: usize, cells: usize) -> Self {
        SymbolicElement { points: AtomSet::full(points), cells: vec![IndexSet::full(); cells] }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.points.universe() == other.points.universe() && self.cells.len() == other.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.cells.iter().all(IndexSet::is_empty)
    }

    pub fn complement(&self) -> Self {
        SymbolicElement {
            points: self.points.complement(),
            cells: self.cells.iter().map(IndexSet::complement).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert!(self.same_shape(other));
        SymbolicElement {
            points: self.points.union(&other.points),
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| a.union(b)).collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert!(self.same_shape(other));
        SymbolicElement {
            points: self.points.intersection(&other.points),
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| a.intersection(b)).collect(),
        }
    }
}

impl fmt::Display for SymbolicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "points={}", self.points)?;
        for (i, c) in self.cells.iter().enumerate() {
            if !c.is_empty() {
                write!(f, " cell{i}={c}")?;
            }
        }
        Ok(())
    }
}

/// A complex-algebra element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Element {
    Explicit(AtomSet),
    Symbolic(SymbolicElement),
}

impl Element {
    pub fn as_explicit(&self) -> Option<&AtomSet> {
        match self {
            Element::Explicit(s) => Some(s),
            Element::Symbolic(_) => None,
        }
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicElement> {
        match self {
            Element::Symbolic(s) => Some(s),
            Element::Explicit(_) => None,
        }
    }

    pub fn complement(&self) -> Element {
        match self {
            Element::Explicit(s) => Element::Explicit(s.complement()),
            Element::Symbolic(s) => Element::Symbolic(s.complement()),
        }
    }
}

impl From<AtomSet> for Element {
    fn from(s: AtomSet) -> Self {
        Element::Explicit(s)
    }
}

impl From<SymbolicElement> for Element {
    fn from(s: SymbolicElement) -> Self {
        Element::Symbolic(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn index_set() -> impl Strategy<Value = IndexSet> {
        (any::<bool>(), prop::collection::btree_set(0u64..40, 0..8)).prop_map(|(co, s)| {
            if co {
                IndexSet::Cofinite(s)
            } else {
                IndexSet::Finite(s)
            }
        })
    }

    proptest! {
        #[test]
        fn complement_is_involution(a in index_set()) {
            prop_assert_eq!(a.complement().complement(), a);
        }

        #[test]
        fn ops_agree_with_truncation(a in index_set(), b in index_set()) {
            let bound = 64;
            let ta: BTreeSet<u64> = a.truncate(bound).into_iter().collect();
            let tb: BTreeSet<u64> = b.truncate(bound).into_iter().collect();
            let u: BTreeSet<u64> = a.union(&b).truncate(bound).into_iter().collect();
            let m: BTreeSet<u64> = a.intersection(&b).truncate(bound).into_iter().collect();
            prop_assert_eq!(u, ta.union(&tb).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(m, ta.intersection(&tb).copied().collect::<BTreeSet<_>>());
        }
    }

    #[test]
    fn cofinite_min_skips_exceptions() {
        assert_eq!(IndexSet::cofinite([0, 1, 3]).least(), Some(2));
        assert_eq!(IndexSet::empty().least(), None);
    }
}
