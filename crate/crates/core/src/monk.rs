//! The Monk-style block family.
//!
//! Non-identity atoms are `a(i, P, W, p)`: an index `i` in the naturals, a
//! colour `P`, a block `W` (an `l`-subset of the colours containing `P`) and
//! an inert copy number `p < mu`. A triple of non-identity atoms is
//! consistent iff the three blocks have empty common intersection, or the
//! indices are evenly distributed and the colours are not all equal. All
//! atoms are self-converse.
//!
//! The explicit atom list truncates indices at `bound`. Symbolic elements
//! carry one finite-or-cofinite index set per cell `(P, W, p)`; the cells
//! refine both the colour classes `H^P` and the blocks `E^W`.

use std::any::Any;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::algebra::{Element, IndexSet, RelAtomStructure, RuleFamily, SymbolicElement};
use crate::{AtomSet, Error, Result, ValidationReport};

/// Parameters of a family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonkParams {
    pub colours: usize,
    /// Block size `l`.
    pub block: usize,
    /// Number of inert copies.
    pub copies: usize,
    /// Explicit atoms use indices below this bound.
    pub bound: u64,
    /// Arity `n` of the strengthened witness condition, when requested.
    pub witness_arity: Option<usize>,
}

impl MonkParams {
    pub fn new(colours: usize, block: usize, copies: usize, bound: u64) -> Self {
        MonkParams { colours, block, copies, bound, witness_arity: None }
    }

    /// Six colours, blocks of two, one copy.
    pub fn standard(bound: u64) -> Self {
        Self::new(6, 2, 1, bound)
    }

    pub fn with_witness_arity(mut self, n: usize) -> Self {
        self.witness_arity = Some(n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.block < 2 {
            return bad(format!("block size {} must be at least 2", self.block));
        }
        if self.colours < 6.max(3 * self.block) {
            return bad(format!(
                "{} colours; need at least max(6, 3*{}) = {}",
                self.colours,
                self.block,
                6.max(3 * self.block)
            ));
        }
        if self.colours > 20 {
            return bad(format!("{} colours exceeds the supported 20", self.colours));
        }
        if self.copies == 0 {
            return bad("copies must be at least 1".into());
        }
        if self.bound == 0 {
            return bad("index bound must be at least 1".into());
        }
        if let Some(n) = self.witness_arity {
            if n < 3 {
                return bad(format!("witness arity {n} must be at least 3"));
            }
            if self.colours < 2 * n + 2 {
                return bad(format!("witness arity {n} needs at least {} colours", 2 * n + 2));
            }
        }
        Ok(())
    }
}

impl fmt::Display for MonkParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "monk I={} l={} mu={} bound={}", self.colours, self.block, self.copies, self.bound)?;
        if let Some(n) = self.witness_arity {
            write!(f, " n={n}")?;
        }
        Ok(())
    }
}

/// A colour set as a bitmask.
pub type Block = u64;

pub fn block_colours(w: Block) -> Vec<usize> {
    (0..64).filter(|c| w >> c & 1 == 1).collect()
}

fn block_name(w: Block) -> String {
    block_colours(w).iter().map(|c| c.to_string()).collect::<Vec<_>>().join("-")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonkAtom {
    Id,
    Coloured { index: u64, colour: usize, block: Block, copy: usize },
}

/// A cell of the symbolic partition: all atoms sharing colour, block and copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub colour: usize,
    pub block: Block,
    pub copy: usize,
}

/// True iff some ordering `p, q, r` of the arguments has `r - q = q - p`.
pub fn evenly_distributed(i: u64, j: u64, k: u64) -> bool {
    let (i, j, k) = (i as u128, j as u128, k as u128);
    2 * i == j + k || 2 * j == i + k || 2 * k == i + j
}

fn triple_ok(x: (u64, usize, Block), y: (u64, usize, Block), z: (u64, usize, Block)) -> bool {
    x.2 & y.2 & z.2 == 0 || (evenly_distributed(x.0, y.0, z.0) && !(x.1 == y.1 && y.1 == z.1))
}

/// Consistency of a triple of family atoms.
pub fn monk_consistent(p: &MonkParams, a: MonkAtom, b: MonkAtom, c: MonkAtom) -> Result<bool> {
    for x in [a, b, c] {
        if let MonkAtom::Coloured { colour, block, copy, .. } = x {
            let ok = colour < p.colours
                && block >> colour & 1 == 1
                && block.count_ones() as usize == p.block
                && block >> p.colours == 0
                && copy < p.copies;
            if !ok {
                return Err(Error::InvalidParams(format!("{x:?} is not an atom of {p}")));
            }
        }
    }
    Ok(atoms_consistent(a, b, c))
}

fn atoms_consistent(a: MonkAtom, b: MonkAtom, c: MonkAtom) -> bool {
    use MonkAtom::*;
    match (a, b, c) {
        (Id, x, y) | (x, Id, y) | (x, y, Id) => x == y,
        (
            Coloured { index: i, colour: p, block: s, .. },
            Coloured { index: j, colour: q, block: z, .. },
            Coloured { index: k, colour: r, block: w, .. },
        ) => triple_ok((i, p, s), (j, q, z), (k, r, w)),
    }
}

/// `{ k : exists i in a, j in b with e(i, j, k) }`.
pub fn evenly_reach(a: &IndexSet, b: &IndexSet) -> IndexSet {
    use IndexSet::*;
    if a.is_empty() || b.is_empty() {
        return IndexSet::empty();
    }
    match (a, b) {
        (Finite(x), Finite(y)) => {
            let mut out = BTreeSet::new();
            for &i in x {
                for &j in y {
                    out.extend(thirds(i, j));
                }
            }
            Finite(out)
        }
        (Cofinite(_), Cofinite(_)) => IndexSet::full(),
        (Finite(x), Cofinite(exc)) | (Cofinite(exc), Finite(x)) => {
            let Some(&top) = exc.iter().next_back() else {
                return IndexSet::full();
            };
            let least = *x.iter().next().expect("non-empty");
            // beyond this, j = 2k - least clears every exception
            let horizon = (top + least) / 2 + 2;
            let missing = (0..=horizon).filter(|&k| !x.iter().any(|&i| thirds(i, k).any(|j| !exc.contains(&j))));
            Cofinite(missing.collect())
        }
    }
}

/// The values `k` with `e(i, j, k)`.
fn thirds(i: u64, j: u64) -> impl Iterator<Item = u64> {
    let a = (2 * j).checked_sub(i);
    let b = (2 * i).checked_sub(j);
    let c = (i + j).is_multiple_of(2).then_some((i + j) / 2);
    [a, b, c].into_iter().flatten()
}

/// The rule behind [`build_monk`].
#[derive(Debug)]
pub struct MonkFamily {
    params: MonkParams,
    blocks: Vec<Block>,
    cells: Vec<Cell>,
    cell_index: HashMap<Cell, usize>,
}

impl MonkFamily {
    pub fn new(params: MonkParams) -> Result<Self> {
        params.validate()?;
        let blocks: Vec<Block> =
            (0..1u64 << params.colours).filter(|w| w.count_ones() as usize == params.block).collect();
        let mut cells = Vec::new();
        for &block in &blocks {
            for colour in block_colours(block) {
                for copy in 0..params.copies {
                    cells.push(Cell { colour, block, copy });
                }
            }
        }
        let cell_index = cells.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        Ok(MonkFamily { params, blocks, cells, cell_index })
    }

    pub fn params(&self) -> &MonkParams {
        &self.params
    }

    /// All blocks in increasing bitmask order.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell_of(&self, c: Cell) -> Option<usize> {
        self.cell_index.get(&c).copied()
    }

    /// Explicit atom count: identity plus `cells * bound`.
    pub fn atom_count(&self) -> usize {
        1 + self.cells.len() * self.params.bound as usize
    }

    /// Explicit atom index to family atom. Index 0 is the identity.
    pub fn atom(&self, a: usize) -> MonkAtom {
        if a == 0 {
            return MonkAtom::Id;
        }
        let k = a - 1;
        let cell = self.cells[k % self.cells.len()];
        MonkAtom::Coloured {
            index: (k / self.cells.len()) as u64,
            colour: cell.colour,
            block: cell.block,
            copy: cell.copy,
        }
    }

    /// Family atom to explicit index, if it lies inside the truncation.
    pub fn index_of(&self, atom: MonkAtom) -> Option<usize> {
        match atom {
            MonkAtom::Id => Some(0),
            MonkAtom::Coloured { index, colour, block, copy } => {
                let cell = self.cell_of(Cell { colour, block, copy })?;
                (index < self.params.bound).then(|| 1 + index as usize * self.cells.len() + cell)
            }
        }
    }

    pub fn atom_name(&self, a: usize) -> String {
        match self.atom(a) {
            MonkAtom::Id => "Id".into(),
            MonkAtom::Coloured { index, colour, block, copy } => {
                let mut s = format!("a{index}.{colour}.{}", block_name(block));
                if self.params.copies > 1 {
                    s.push_str(&format!(".{copy}"));
                }
                s
            }
        }
    }

    fn empty(&self) -> SymbolicElement {
        SymbolicElement::empty(1, self.cells.len())
    }

    fn with_cells(&self, keep: impl Fn(&Cell) -> bool) -> SymbolicElement {
        let mut x = self.empty();
        for (k, c) in self.cells.iter().enumerate() {
            if keep(c) {
                x.cells[k] = IndexSet::full();
            }
        }
        x
    }

    /// The identity element `{Id}`.
    pub fn identity(&self) -> SymbolicElement {
        let mut x = self.empty();
        x.points.insert(0);
        x
    }

    /// All non-identity atoms.
    pub fn diversity(&self) -> SymbolicElement {
        self.with_cells(|_| true)
    }

    /// Atoms of colour `p`.
    pub fn colour_class(&self, p: usize) -> SymbolicElement {
        self.with_cells(|c| c.colour == p)
    }

    /// Atoms whose block is `w`.
    pub fn block_class(&self, w: Block) -> SymbolicElement {
        self.with_cells(|c| c.block == w)
    }

    /// The singleton of a non-identity atom.
    pub fn atom_element(&self, atom: MonkAtom) -> Result<SymbolicElement> {
        match atom {
            MonkAtom::Id => Ok(self.identity()),
            MonkAtom::Coloured { index, colour, block, copy } => {
                let cell = self
                    .cell_of(Cell { colour, block, copy })
                    .ok_or_else(|| Error::InvalidParams(format!("{atom:?} is not an atom of {}", self.params)))?;
                let mut x = self.empty();
                x.cells[cell] = IndexSet::finite([index]);
                Ok(x)
            }
        }
    }

    fn check_shape(&self, x: &SymbolicElement) -> Result<()> {
        if x.points.universe() != 1 || x.cells.len() != self.cells.len() {
            return Err(Error::Structural(format!(
                "symbolic element does not match the {} cells of {}",
                self.cells.len(),
                self.params
            )));
        }
        Ok(())
    }

    fn compose(&self, x: &SymbolicElement, y: &SymbolicElement) -> SymbolicElement {
        let nc = self.cells.len();
        let mut out = self.empty();
        let has_id = |e: &SymbolicElement| e.points.contains(0);
        if has_id(x) {
            out = out.union(&SymbolicElement { points: AtomSet::empty(1), cells: y.cells.clone() });
        }
        if has_id(y) {
            out = out.union(&SymbolicElement { points: AtomSet::empty(1), cells: x.cells.clone() });
        }
        let meets =
            (has_id(x) && has_id(y)) || x.cells.iter().zip(&y.cells).any(|(a, b)| !a.intersection(b).is_empty());
        if meets {
            out.points.insert(0);
        }
        for a in (0..nc).filter(|&a| !x.cells[a].is_empty()) {
            for b in (0..nc).filter(|&b| !y.cells[b].is_empty()) {
                let (ca, cb) = (self.cells[a], self.cells[b]);
                let mut reach = None;
                for (z, cz) in self.cells.iter().enumerate() {
                    if out.cells[z].is_full() {
                        continue;
                    }
                    let add = if ca.block & cb.block & cz.block == 0 {
                        IndexSet::full()
                    } else if ca.colour == cb.colour && cb.colour == cz.colour {
                        continue;
                    } else {
                        reach.get_or_insert_with(|| evenly_reach(&x.cells[a], &y.cells[b])).clone()
                    };
                    out.cells[z] = out.cells[z].union(&add);
                }
            }
        }
        out
    }
}

impl RuleFamily for MonkFamily {
    fn header(&self) -> String {
        self.params.to_string()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn consistent(&self, a: usize, b: usize, c: usize) -> bool {
        atoms_consistent(self.atom(a), self.atom(b), self.atom(c))
    }

    fn symbolic_shape(&self) -> Option<(usize, usize)> {
        Some((1, self.cells.len()))
    }

    fn compose_symbolic(&self, x: &SymbolicElement, y: &SymbolicElement) -> Result<SymbolicElement> {
        self.check_shape(x)?;
        self.check_shape(y)?;
        Ok(self.compose(x, y))
    }

    fn converse_symbolic(&self, x: &SymbolicElement) -> Result<SymbolicElement> {
        self.check_shape(x)?;
        Ok(x.clone())
    }

    fn truncate(&self, x: &SymbolicElement) -> Result<AtomSet> {
        self.check_shape(x)?;
        let mut out = AtomSet::empty(self.atom_count());
        if x.points.contains(0) {
            out.insert(0);
        }
        let nc = self.cells.len();
        for (k, s) in x.cells.iter().enumerate() {
            for i in s.truncate(self.params.bound) {
                out.insert(1 + i as usize * nc + k);
            }
        }
        Ok(out)
    }

    fn lift(&self, x: &AtomSet) -> Result<SymbolicElement> {
        if x.universe() != self.atom_count() {
            return Err(Error::Structural("explicit element does not match the truncation".into()));
        }
        let mut out = self.empty();
        let mut per: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); self.cells.len()];
        for a in x.iter() {
            if a == 0 {
                out.points.insert(0);
            } else {
                per[(a - 1) % self.cells.len()].insert(((a - 1) / self.cells.len()) as u64);
            }
        }
        out.cells = per.into_iter().map(IndexSet::Finite).collect();
        Ok(out)
    }
}

/// The rule-backed structure for `p`, with explicit atoms for indices below
/// `p.bound`.
pub fn build_monk(p: &MonkParams) -> Result<RelAtomStructure> {
    let family = Arc::new(MonkFamily::new(*p)?);
    let n = family.atom_count();
    let names = (0..n).map(|a| family.atom_name(a)).collect();
    RelAtomStructure::from_rule(p.to_string(), names, AtomSet::singleton(n, 0), (0..n).collect(), family)
}

/// The family behind a structure built by [`build_monk`].
pub fn monk_family(s: &RelAtomStructure) -> Option<&MonkFamily> {
    s.rule()?.as_any().downcast_ref::<MonkFamily>()
}

/// The finite algebra on `{Id} ∪ colours` where `P;P = (colours - P) ∪ {Id}`
/// and `P;Q` is every colour for `P != Q`.
pub fn build_maddux(colours: usize) -> Result<RelAtomStructure> {
    if colours == 0 {
        return Err(Error::InvalidParams("need at least one colour".into()));
    }
    let n = colours + 1;
    let mut names = vec!["Id".to_string()];
    names.extend((0..colours).map(|c| format!("P{c}")));
    let mut triples = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let ok = match (a, b, c) {
                    (0, x, y) | (x, 0, y) | (x, y, 0) => x == y,
                    _ => !(a == b && b == c),
                };
                if ok {
                    triples.push((a, b, c));
                }
            }
        }
    }
    RelAtomStructure::from_triples(
        format!("maddux-{colours}"),
        names,
        AtomSet::singleton(n, 0),
        (0..n).collect(),
        triples,
    )
}

/// Checks symbolically that `H^P ; H^Q` is every non-identity atom for
/// `P != Q` and that `H^P ; H^P` is `{Id}` plus every atom not of colour
/// `P`; then checks that explicit composition on the truncation agrees.
pub fn maddux_embedding_check(p: &MonkParams) -> Result<ValidationReport> {
    let s = build_monk(p)?;
    let fam = monk_family(&s).expect("built from the family");
    let mut report = ValidationReport::new(
        p.to_string(),
        format!("symbolic on the full family; explicit on indices below {}", p.bound),
    );
    report.clause("distinct-colours");
    report.clause("same-colour");
    report.clause("truncation-agreement");
    let describe = |got: &SymbolicElement, want: &SymbolicElement| {
        let mut parts = Vec::new();
        if got.points != want.points {
            parts.push(format!("identity {} expected {}", got.points.contains(0), want.points.contains(0)));
        }
        for (k, c) in fam.cells().iter().enumerate() {
            if got.cells[k] != want.cells[k] {
                parts.push(format!(
                    "cell {}.{} got {} expected {}",
                    c.colour,
                    block_name(c.block),
                    got.cells[k],
                    want.cells[k]
                ));
                break;
            }
        }
        parts.join("; ")
    };
    for a in 0..p.colours {
        let ha = fam.colour_class(a);
        let ha_explicit = fam.truncate(&ha)?;
        for b in 0..p.colours {
            let hb = fam.colour_class(b);
            let got = fam.compose(&ha, &hb);
            let (clause, want) = if a == b {
                ("same-colour", fam.diversity().intersection(&ha.complement()).union(&fam.identity()))
            } else {
                ("distinct-colours", fam.diversity())
            };
            if got != want {
                report.violate(clause, format!("H{a};H{b}: {}", describe(&got, &want)));
            }
            let explicit = s.compose_sets(&ha_explicit, &fam.truncate(&hb)?);
            if explicit != fam.truncate(&got)? {
                let diff =
                    explicit.union(&fam.truncate(&got)?).difference(&explicit.intersection(&fam.truncate(&got)?));
                let atom = diff.first().expect("sets differ");
                report.violate("truncation-agreement", format!("H{a};H{b} disagrees at {}", fam.atom_name(atom)));
            }
            report.instances += 1;
        }
    }
    Ok(report)
}

/// Whether `x` lies in the term algebra: inside every block `E^W` its part
/// is finite or cofinite.
pub fn term_algebra_member(p: &MonkParams, x: &Element) -> Result<bool> {
    let fam = MonkFamily::new(*p)?;
    let x = x.as_symbolic().ok_or_else(|| {
        Error::UnsupportedSymbolic("an explicit set over the infinite family must be lifted first".into())
    })?;
    fam.check_shape(x)?;
    Ok(fam.blocks().iter().all(|&w| {
        let mut kinds = fam.cells().iter().zip(&x.cells).filter(|(c, _)| c.block == w).map(|(_, s)| s.is_finite());
        let first = kinds.next().expect("every block has cells");
        kinds.all(|k| k == first)
    }))
}

/// Checks the strengthened witness condition of arity `n`: for any `n`
/// pairs of non-identity atoms there is a block `W` such that every
/// `a_i ; b_i` meets `E^W` in infinitely many atoms, i.e. `W` misses every
/// `S_i ∩ Z_i`. Parameters need not satisfy the colour guard for `n`, so
/// failures can be exhibited.
///
/// Only the intersections `S ∩ Z` matter, so the check runs over multisets
/// of possible intersections.
pub fn witness_condition_check(p: &MonkParams, n: usize) -> Result<ValidationReport> {
    if n == 0 {
        return Err(Error::InvalidParams("witness arity must be positive".into()));
    }
    let fam = MonkFamily::new(MonkParams { witness_arity: None, ..*p })?;
    let mut meets: Vec<Block> = Vec::new();
    for &s in fam.blocks() {
        for &z in fam.blocks() {
            if !meets.contains(&(s & z)) {
                meets.push(s & z);
            }
        }
    }
    meets.sort_unstable();
    let mut report =
        ValidationReport::new(p.to_string(), format!("exhaustive over multisets of {n} block intersections"));
    report.clause("block-witness");
    let mut pick = vec![0usize; n];
    loop {
        let forbidden = pick.iter().fold(0, |acc, &k| acc | meets[k]);
        report.instances += 1;
        if !fam.blocks().iter().any(|&w| w & forbidden == 0) {
            let shown: Vec<_> = pick.iter().map(|&k| format!("{{{}}}", block_name(meets[k]))).collect();
            report.violate("block-witness", format!("intersections {} leave no free block", shown.join(" ")));
            break;
        }
        // next non-decreasing tuple
        let Some(pos) = (0..n).rev().find(|&k| pick[k] + 1 < meets.len()) else {
            break;
        };
        let v = pick[pos] + 1;
        for slot in &mut pick[pos..] {
            *slot = v;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ra_compose, ra_converse, validate_rel_structure};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn col(index: u64, colour: usize, block: &[usize]) -> MonkAtom {
        MonkAtom::Coloured { index, colour, block: block.iter().fold(0, |m, c| m | 1 << c), copy: 0 }
    }

    #[test]
    fn evenly_distributed_cases() {
        assert!(evenly_distributed(3, 5, 7));
        assert!(evenly_distributed(7, 3, 5));
        assert!(!evenly_distributed(3, 5, 8));
        assert!(evenly_distributed(4, 4, 4));
    }

    #[test]
    fn consistency_clauses() {
        let p = MonkParams::standard(4);
        // blocks {0,1}, {2,3}, {0,4}: empty common intersection
        assert!(monk_consistent(&p, col(0, 0, &[0, 1]), col(1, 2, &[2, 3]), col(3, 0, &[0, 4])).unwrap());
        // same block, same colour, evenly distributed
        assert!(!monk_consistent(&p, col(3, 0, &[0, 1]), col(5, 0, &[0, 1]), col(7, 0, &[0, 1])).unwrap());
        // two colours make it consistent
        assert!(monk_consistent(&p, col(3, 0, &[0, 1]), col(5, 1, &[0, 1]), col(7, 0, &[0, 1])).unwrap());
        assert!(!monk_consistent(&p, col(3, 0, &[0, 1]), col(5, 1, &[0, 1]), col(8, 0, &[0, 1])).unwrap());
        let a = col(2, 1, &[1, 5]);
        assert!(monk_consistent(&p, MonkAtom::Id, a, a).unwrap());
        assert!(!monk_consistent(&p, MonkAtom::Id, a, col(3, 1, &[1, 5])).unwrap());
        assert!(monk_consistent(&p, col(0, 9, &[0, 9]), a, a).is_err());
        assert!(monk_consistent(&p, col(0, 2, &[0, 1]), a, a).is_err());
    }

    #[test]
    fn atom_count_matches_formula() {
        for t in [1, 2, 4] {
            let s = build_monk(&MonkParams::standard(t)).unwrap();
            // 15 blocks of two colours, two colours each
            assert_eq!(s.atom_count(), 1 + 30 * t as usize);
        }
        let s = build_monk(&MonkParams::new(6, 2, 2, 1)).unwrap();
        assert_eq!(s.atom_count(), 61);
        let s = build_monk(&MonkParams::new(9, 3, 1, 1)).unwrap();
        // C(9,3) blocks, three colours each
        assert_eq!(s.atom_count(), 1 + 84 * 3);
    }

    #[test]
    fn parameter_guards() {
        assert!(MonkParams::new(5, 2, 1, 1).validate().is_err());
        assert!(MonkParams::new(8, 3, 1, 1).validate().is_err());
        assert!(MonkParams::new(6, 2, 0, 1).validate().is_err());
        assert!(MonkParams::standard(2).with_witness_arity(3).validate().is_err());
        assert!(MonkParams::new(8, 2, 1, 1).with_witness_arity(3).validate().is_ok());
    }

    #[test]
    fn truncation_validates() {
        let s = build_monk(&MonkParams::standard(4)).unwrap();
        let r = validate_rel_structure(&s).unwrap();
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn copies_validate() {
        let s = build_monk(&MonkParams::new(6, 2, 2, 2)).unwrap();
        assert!(validate_rel_structure(&s).unwrap().is_valid());
    }

    #[test]
    fn every_atom_is_self_converse() {
        let s = build_monk(&MonkParams::standard(3)).unwrap();
        assert!((0..s.atom_count()).all(|a| s.converse(a) == a));
        let fam = monk_family(&s).unwrap();
        let x = Element::Symbolic(fam.colour_class(2));
        assert_eq!(ra_converse(&s, &x).unwrap(), x);
    }

    fn consistent_brute(a: MonkAtom, b: MonkAtom, c: MonkAtom) -> bool {
        atoms_consistent(a, b, c)
    }

    #[test]
    fn consistency_is_permutation_invariant() {
        let s = build_monk(&MonkParams::standard(3)).unwrap();
        let fam = monk_family(&s).unwrap();
        let n = s.atom_count();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x, y, z) = (fam.atom(a), fam.atom(b), fam.atom(c));
                    let v = consistent_brute(x, y, z);
                    for (p, q, r) in [(x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)] {
                        assert_eq!(v, consistent_brute(p, q, r));
                    }
                }
            }
        }
    }

    #[test]
    fn every_pair_has_a_witness() {
        let s = build_monk(&MonkParams::standard(6)).unwrap();
        for a in 1..s.atom_count() {
            for b in 1..s.atom_count() {
                assert!(!s.comp(a, b).is_empty(), "{} ; {}", s.atom_name(a), s.atom_name(b));
            }
        }
    }

    #[test]
    fn colour_classes_compose_like_maddux() {
        let r = maddux_embedding_check(&MonkParams::standard(6)).unwrap();
        assert!(r.is_valid(), "{r}");
        assert_eq!(r.instances, 36);
    }

    #[test]
    fn maddux_table_is_a_relation_atom_structure() {
        let m = build_maddux(6).unwrap();
        assert!(validate_rel_structure(&m).unwrap().is_valid());
        let p0 = m.set(&[1]);
        let got = m.compose_sets(&p0, &p0);
        assert_eq!(got.to_vec(), vec![0, 2, 3, 4, 5, 6]);
        assert_eq!(m.compose_sets(&p0, &m.set(&[2])).to_vec(), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn colour_class_is_not_a_term() {
        let p = MonkParams::standard(4);
        let fam = MonkFamily::new(p).unwrap();
        let hp = Element::Symbolic(fam.colour_class(0));
        assert!(!term_algebra_member(&p, &hp).unwrap());
        let ew = Element::Symbolic(fam.block_class(0b11));
        assert!(term_algebra_member(&p, &ew).unwrap());
        let a = Element::Symbolic(fam.atom_element(col(7, 0, &[0, 1])).unwrap());
        assert!(term_algebra_member(&p, &a).unwrap());
        assert!(term_algebra_member(&p, &a.complement()).unwrap());
        let explicit = Element::Explicit(AtomSet::empty(fam.atom_count()));
        assert!(matches!(term_algebra_member(&p, &explicit), Err(Error::UnsupportedSymbolic(_))));
    }

    #[test]
    fn witness_condition_needs_enough_colours() {
        let ok = witness_condition_check(&MonkParams::new(8, 2, 1, 1), 3).unwrap();
        assert!(ok.is_valid(), "{ok}");
        let bad = witness_condition_check(&MonkParams::new(7, 2, 1, 1), 3).unwrap();
        assert!(bad.violated("block-witness"));
        // three disjoint pairs leave a single colour
        assert_eq!(bad.violations[0].witness, "intersections {0-1} {2-3} {4-5} leave no free block");
        assert!(witness_condition_check(&MonkParams::new(6, 2, 1, 1), 2).unwrap().is_valid());
    }

    #[test]
    fn evenly_reach_examples() {
        let a = IndexSet::finite([3]);
        let b = IndexSet::finite([5]);
        assert_eq!(evenly_reach(&a, &b), IndexSet::finite([1, 4, 7]));
        let full = IndexSet::full();
        assert!(evenly_reach(&full, &full).is_full());
        assert!(evenly_reach(&a, &full).is_full());
        assert!(evenly_reach(&IndexSet::empty(), &full).is_empty());
    }

    fn truncated() -> &'static RelAtomStructure {
        static S: OnceLock<RelAtomStructure> = OnceLock::new();
        S.get_or_init(|| build_monk(&MonkParams::standard(12)).unwrap())
    }

    fn brute_reach(a: &IndexSet, b: &IndexSet, limit: u64) -> Vec<u64> {
        (0..limit)
            .filter(|&k| {
                (0..3 * limit)
                    .any(|i| a.contains(i) && (0..3 * limit).any(|j| b.contains(j) && evenly_distributed(i, j, k)))
            })
            .collect()
    }

    fn small_set() -> impl Strategy<Value = IndexSet> {
        (any::<bool>(), proptest::collection::btree_set(0u64..8, 0..4)).prop_map(|(fin, s)| {
            if fin {
                IndexSet::Finite(s)
            } else {
                IndexSet::Cofinite(s)
            }
        })
    }

    proptest! {
        #[test]
        fn evenly_reach_matches_brute_force(a in small_set(), b in small_set()) {
            let got = evenly_reach(&a, &b);
            let want = brute_reach(&a, &b, 16);
            prop_assert_eq!(got.truncate(16), want);
        }

        #[test]
        fn symbolic_composition_agrees_with_truncation(
            xs in proptest::collection::vec((0u64..5, 0usize..30), 0..4),
            ys in proptest::collection::vec((0u64..5, 0usize..30), 0..4),
            xid in any::<bool>(),
            yid in any::<bool>(),
        ) {
            let s = truncated();
            let fam = monk_family(s).unwrap();
            let build = |items: &[(u64, usize)], id: bool| {
                let mut e = AtomSet::empty(s.atom_count());
                if id { e.insert(0); }
                for &(i, c) in items { e.insert(1 + i as usize * 30 + c); }
                e
            };
            let (x, y) = (build(&xs, xid), build(&ys, yid));
            let explicit = s.compose_sets(&x, &y);
            let sym = ra_compose(
                s,
                &Element::Symbolic(fam.lift(&x).unwrap()),
                &Element::Symbolic(fam.lift(&y).unwrap()),
            ).unwrap();
            // indices below 5 compose to indices below 10; check up to 12
            let sym_t = fam.truncate(sym.as_symbolic().unwrap()).unwrap();
            let low = |e: &AtomSet| e.iter().filter(|&a| a == 0 || (a - 1) / 30 < 12).collect::<Vec<_>>();
            prop_assert_eq!(low(&explicit), low(&sym_t));
        }
    }
}
