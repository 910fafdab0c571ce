use std::fmt;

use crate::algebra::IndexSet;
use crate::{Error, Result, ValidationReport};

/// How the fixed non-principal ultrafilter is decided on this fragment.
pub const FINCO_FILTER_NOTE: &str =
    "the non-principal ultrafilter F is realized as the cofinite filter; exact on finite/cofinite index sets";

/// The `n`-dimensional set algebra of unions `R_X` of the blocks
/// `Q_k = {s : s0 ≠ s1, Σs = k}` (`k ≥ 1`), with the diagonal block
/// `Q_0 = {s : s0 = s1}` added exactly when `X` is cofinite. Only finite
/// and cofinite `X ⊆ ℤ⁺` are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FinCoAlgebra {
    dim: usize,
}

/// The element `R_X`; `0 ∉ X` always.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCoElement {
    index: IndexSet,
}

impl FinCoElement {
    pub fn index_set(&self) -> &IndexSet {
        &self.index
    }

    /// Whether `X` lies in the ultrafilter.
    pub fn in_filter(&self) -> bool {
        self.index.is_cofinite()
    }

    /// Block indices making up `R_X`, with `0` for the diagonal block.
    pub fn blocks(&self) -> IndexSet {
        if self.in_filter() {
            self.index.union(&IndexSet::finite([0]))
        } else {
            self.index.clone()
        }
    }
}

impl fmt::Display for FinCoElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: Vec<u64>| v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        match &self.index {
            IndexSet::Finite(_) if self.index.is_empty() => write!(f, "R{{}}"),
            IndexSet::Finite(_) => write!(f, "R{{{}}}", list(self.index.truncate(u64::MAX))),
            IndexSet::Cofinite(_) => {
                let missing = list(self.index.complement().truncate(u64::MAX).into_iter().filter(|&k| k > 0).collect());
                if missing.is_empty() {
                    write!(f, "R(Z+)")
                } else {
                    write!(f, "R(Z+ minus {{{missing}}})")
                }
            }
        }
    }
}

impl FinCoAlgebra {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!("dimension must be at least 2, got {dim}")));
        }
        Ok(FinCoAlgebra { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R_X` for `X ⊆ ℤ⁺`; index `0` is dropped if present.
    pub fn element(&self, x: IndexSet) -> FinCoElement {
        FinCoElement { index: x.difference(&IndexSet::finite([0])) }
    }

    pub fn empty(&self) -> FinCoElement {
        self.element(IndexSet::empty())
    }

    pub fn unit(&self) -> FinCoElement {
        self.element(IndexSet::full())
    }

    /// The atom `R_{k} = Q_k`.
    pub fn atom(&self, k: u64) -> Result<FinCoElement> {
        if k == 0 {
            return Err(Error::Index { index: 0, dim: self.dim });
        }
        Ok(self.element(IndexSet::finite([k])))
    }

    pub fn union(&self, x: &FinCoElement, y: &FinCoElement) -> FinCoElement {
        self.element(x.index.union(&y.index))
    }

    pub fn intersection(&self, x: &FinCoElement, y: &FinCoElement) -> FinCoElement {
        self.element(x.index.intersection(&y.index))
    }

    /// Complement relative to the unit `R_{ℤ⁺}`.
    pub fn complement(&self, x: &FinCoElement) -> FinCoElement {
        self.element(x.index.complement())
    }

    pub fn le(&self, x: &FinCoElement, y: &FinCoElement) -> bool {
        x.index.difference(&y.index).is_empty()
    }

    /// `s_0^1`: a tuple is in the image when replacing its first coordinate
    /// by its second lands in `x`. The result always sits on the diagonal
    /// block, so it is the unit or empty.
    pub fn s01(&self, x: &FinCoElement) -> FinCoElement {
        if x.in_filter() {
            self.unit()
        } else {
            self.empty()
        }
    }

    /// `s_1^0`, replacing the second coordinate by the first.
    pub fn s10(&self, x: &FinCoElement) -> FinCoElement {
        self.s01(x)
    }

    /// Swapping coordinates `i` and `j`. Every block is invariant when the
    /// swap fixes `{0, 1}` setwise; other swaps move the diagonal block
    /// across the others and leave the algebra.
    pub fn transpose(&self, i: usize, j: usize, x: &FinCoElement) -> Result<FinCoElement> {
        for k in [i, j] {
            if k >= self.dim {
                return Err(Error::Index { index: k, dim: self.dim });
            }
        }
        let moves_diagonal = (i < 2) != (j < 2);
        if moves_diagonal {
            return Err(Error::Unsupported(format!(
                "swapping coordinates {i} and {j} does not preserve the diagonal block"
            )));
        }
        Ok(x.clone())
    }

    /// Membership of a concrete tuple `s ∈ ω^n`.
    pub fn contains(&self, x: &FinCoElement, s: &[u64]) -> Result<bool> {
        if s.len() != self.dim {
            return Err(Error::Index { index: s.len(), dim: self.dim });
        }
        Ok(x.blocks().contains(block_of(s)))
    }
}

/// The block index of a tuple: `0` on the diagonal, otherwise its sum.
pub fn block_of(s: &[u64]) -> u64 {
    if s[0] == s[1] {
        0
    } else {
        s.iter().sum()
    }
}

pub fn finco_s01(a: &FinCoAlgebra, x: &FinCoElement) -> FinCoElement {
    a.s01(x)
}

/// Tuples of `{0..bound}^n`.
fn window(n: usize, bound: u64) -> impl Iterator<Item = Vec<u64>> {
    let total = (bound + 1).pow(n as u32);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = code % (bound + 1);
                code /= bound + 1;
                d
            })
            .collect()
    })
}

/// Certifies that `s_0^1` is not completely additive: the atoms sum to the
/// unit, each atom's image is empty so the images sum to empty, and yet the
/// image of the unit is the unit. The images are also recomputed tuple by
/// tuple on a finite window.
pub fn finco_nonadditivity_witness(n: usize) -> Result<ValidationReport> {
    let a = FinCoAlgebra::new(n)?;
    let mut r = ValidationReport::new(
        format!("non-additivity of s01 in the {n}-dimensional finite/cofinite algebra"),
        "symbolic",
    );
    r.note(FINCO_FILTER_NOTE);
    for c in ["atoms-sum-to-unit", "images-sum-to-empty", "image-of-sup", "window-semantics", "non-additive"] {
        r.clause(c);
    }
    const ATOMS: u64 = 64;
    let unit = a.unit();

    // every atom is below the unit, and any proper element misses some atom
    for k in 1..=ATOMS {
        r.instances += 1;
        if !a.le(&a.atom(k)?, &unit) {
            r.violate("atoms-sum-to-unit", format!("atom {k} is not below the unit"));
        }
    }
    let mut proper: Vec<FinCoElement> = (0..8u64).map(|k| a.element(IndexSet::cofinite([k + 1]))).collect();
    proper.extend((1..8u64).map(|k| a.element(IndexSet::finite(1..=k))));
    proper.push(a.element(IndexSet::cofinite([2, 3, 5, 7])));
    for y in &proper {
        r.instances += 1;
        let missed = y.index.complement().difference(&IndexSet::finite([0])).least();
        match missed {
            Some(k) if !a.le(&a.atom(k)?, y) => {}
            _ => r.violate("atoms-sum-to-unit", format!("{y} bounds every atom")),
        }
    }

    let mut images = a.empty();
    for k in 1..=ATOMS {
        r.instances += 1;
        let img = a.s01(&a.atom(k)?);
        if img != a.empty() {
            r.violate("images-sum-to-empty", format!("s01 of atom {k} is {img}"));
        }
        images = a.union(&images, &img);
    }
    if images != a.empty() {
        r.violate("images-sum-to-empty", format!("images sum to {images}"));
    }

    let top = a.s01(&unit);
    r.instances += 1;
    if top != unit {
        r.violate("image-of-sup", format!("s01 of the unit is {top}"));
    }

    // recompute images by replacing the first coordinate
    let bound = 4;
    let mut sample: Vec<FinCoElement> = (1..=6).map(|k| a.atom(k)).collect::<Result<_>>()?;
    sample.push(unit.clone());
    sample.push(a.element(IndexSet::cofinite([1, 2])));
    for x in &sample {
        let img = a.s01(x);
        for s in window(n, bound) {
            r.instances += 1;
            let mut moved = s.clone();
            moved[0] = s[1];
            if a.contains(x, &moved)? != a.contains(&img, &s)? {
                r.violate("window-semantics", format!("s01 of {x} at {s:?}"));
            }
        }
    }

    r.instances += 1;
    if images == top {
        r.violate("non-additive", "the sum of images equals the image of the sum");
    } else {
        r.note(format!("sum of s01(atoms) = {images}; s01(sum of atoms) = {top}"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(a: &FinCoAlgebra, rng: &mut ChaCha8Rng) -> FinCoElement {
        let picks: Vec<u64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(1..9)).collect();
        if rng.gen_bool(0.5) {
            a.element(IndexSet::finite(picks))
        } else {
            a.element(IndexSet::cofinite(picks))
        }
    }

    /// Membership computed from the block definition, independent of
    /// `blocks()`.
    fn semantic(x: &FinCoElement, s: &[u64]) -> bool {
        if s[0] == s[1] {
            x.index_set().is_cofinite()
        } else {
            x.index_set().contains(s.iter().sum())
        }
    }

    #[test]
    fn s01_cases() {
        let a = FinCoAlgebra::new(3).unwrap();
        assert_eq!(finco_s01(&a, &a.atom(1).unwrap()), a.empty());
        assert_eq!(finco_s01(&a, &a.element(IndexSet::cofinite([1]))), a.unit());
        assert_eq!(a.s10(&a.unit()), a.unit());
    }

    #[test]
    fn witness_for_three_dimensions() {
        let r = finco_nonadditivity_witness(3).unwrap();
        assert!(r.is_valid(), "{:?}", r.violations);
        assert!(r.notes.iter().any(|n| n == FINCO_FILTER_NOTE));
        assert!(r.notes.iter().any(|n| n.contains("sum of s01(atoms) = R{}") && n.contains("= R(Z+)")));
    }

    #[test]
    fn witness_in_other_dimensions() {
        for n in [2, 4] {
            assert!(finco_nonadditivity_witness(n).unwrap().is_valid());
        }
        assert!(finco_nonadditivity_witness(1).is_err());
    }

    #[test]
    fn zero_is_not_an_index() {
        let a = FinCoAlgebra::new(2).unwrap();
        assert!(a.atom(0).is_err());
        assert_eq!(a.element(IndexSet::finite([0, 3])), a.atom(3).unwrap());
        assert!(!a.unit().index_set().contains(0));
        assert!(a.unit().blocks().contains(0));
    }

    #[test]
    fn complement_swaps_filter_membership() {
        let a = FinCoAlgebra::new(3).unwrap();
        let x = a.element(IndexSet::finite([2, 5]));
        assert!(!x.in_filter());
        assert!(a.complement(&x).in_filter());
        assert_eq!(a.complement(&a.complement(&x)), x);
        assert_eq!(a.union(&x, &a.complement(&x)), a.unit());
    }

    #[test]
    fn swaps_that_move_the_diagonal_are_rejected() {
        let a = FinCoAlgebra::new(3).unwrap();
        let x = a.atom(2).unwrap();
        assert!(a.transpose(0, 2, &x).is_err());
        // (0,2,0) lies on no diagonal of coordinates 0,1 and sums to 2, but
        // swapping coordinates 0 and 2 lands on the diagonal
        assert!(a.contains(&x, &[2, 0, 0]).unwrap());
        assert!(!a.contains(&x, &[0, 0, 2]).unwrap());
        assert_eq!(a.transpose(1, 0, &x).unwrap(), x);
    }

    #[test]
    fn closed_on_fifty_seeded_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3] {
            let a = FinCoAlgebra::new(n).unwrap();
            let xs: Vec<FinCoElement> = (0..50).map(|_| random_element(&a, &mut rng)).collect();
            let tuples: Vec<Vec<u64>> = window(n, 5).collect();
            for (i, x) in xs.iter().enumerate() {
                let y = &xs[(i * 7 + 3) % xs.len()];
                let (u, c, s, t) = (a.union(x, y), a.complement(x), a.s01(x), a.s10(x));
                let sw = a.transpose(0, 1, x).unwrap();
                for tup in &tuples {
                    assert_eq!(semantic(&u, tup), semantic(x, tup) || semantic(y, tup));
                    assert_eq!(semantic(&c, tup), !semantic(x, tup));
                    let mut m = tup.clone();
                    m[0] = tup[1];
                    assert_eq!(semantic(&s, tup), semantic(x, &m));
                    let mut m = tup.clone();
                    m[1] = tup[0];
                    assert_eq!(semantic(&t, tup), semantic(x, &m));
                    let mut m = tup.clone();
                    m.swap(0, 1);
                    assert_eq!(semantic(&sw, tup), semantic(x, &m));
                    assert_eq!(a.contains(x, tup).unwrap(), semantic(x, tup));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn union_matches_index_union(xs in proptest::collection::vec(1u64..12, 0..4), ys in proptest::collection::vec(1u64..12, 0..4), cx: bool, cy: bool) {
            let a = FinCoAlgebra::new(3).unwrap();
            let mk = |v: &Vec<u64>, co: bool| if co { a.element(IndexSet::cofinite(v.clone())) } else { a.element(IndexSet::finite(v.clone())) };
            let (x, y) = (mk(&xs, cx), mk(&ys, cy));
            let u = a.union(&x, &y);
            prop_assert_eq!(u.in_filter(), x.in_filter() || y.in_filter());
            prop_assert_eq!(a.s01(&u), a.union(&a.s01(&x), &a.s01(&y)));
            prop_assert!(a.le(&x, &u) && a.le(&y, &u));
        }
    }
}
