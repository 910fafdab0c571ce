use std::any::Any;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::element::{Element, SymbolicElement};
use crate::{AtomSet, Error, Parallelism, Result, ValidationReport};

/// A consistency rule for a family of atom structures whose explicit atom
/// list is a finite truncation of an infinite universe.
///
/// Families whose rule is closed on blocks (finite/cofinite per block) also
/// implement the symbolic calculus; the defaults refuse it.
pub trait RuleFamily: Send + Sync + fmt::Debug {
    /// Text after `rule:` in a structure file.
    fn header(&self) -> String;

    fn as_any(&self) -> &dyn Any;

    /// Consistency of a triple of explicit (truncated) atoms.
    fn consistent(&self, a: usize, b: usize, c: usize) -> bool;

    /// `(point atoms, cells)` of the symbolic universe, if supported.
    fn symbolic_shape(&self) -> Option<(usize, usize)> {
        None
    }

    fn compose_symbolic(&self, _x: &SymbolicElement, _y: &SymbolicElement) -> Result<SymbolicElement> {
        Err(Error::UnsupportedSymbolic(self.header()))
    }

    fn converse_symbolic(&self, _x: &SymbolicElement) -> Result<SymbolicElement> {
        Err(Error::UnsupportedSymbolic(self.header()))
    }

    /// Restriction of a symbolic element to the explicit atom list.
    fn truncate(&self, _x: &SymbolicElement) -> Result<AtomSet> {
        Err(Error::UnsupportedSymbolic(self.header()))
    }

    /// The finite symbolic element with the same atoms as an explicit set.
    fn lift(&self, _x: &AtomSet) -> Result<SymbolicElement> {
        Err(Error::UnsupportedSymbolic(self.header()))
    }
}

#[derive(Clone)]
enum Triples {
    Table(Arc<Vec<u64>>),
    Rule(Arc<dyn RuleFamily>),
}

/// A relation atom structure `(A, Id, converse, C)`.
#[derive(Clone)]
pub struct RelAtomStructure {
    name: String,
    atoms: Vec<String>,
    index: HashMap<String, usize>,
    identity: AtomSet,
    converse: Vec<usize>,
    triples: Triples,
    // comp[a * n + b] = { c : (a, b, c) consistent }
    comp: Arc<OnceLock<Vec<AtomSet>>>,
}

impl fmt::Debug for RelAtomStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelAtomStructure")
            .field("name", &self.name)
            .field("atoms", &self.atoms.len())
            .field("identity", &self.identity)
            .finish()
    }
}

impl RelAtomStructure {
    fn build(
        name: String,
        atoms: Vec<String>,
        identity: AtomSet,
        converse: Vec<usize>,
        triples: Triples,
    ) -> Result<Self> {
        let n = atoms.len();
        if n == 0 {
            return Err(Error::Structural("atom list is empty".into()));
        }
        if identity.universe() != n || converse.len() != n {
            return Err(Error::Structural("identity/converse do not match the atom list".into()));
        }
        if let Some(&bad) = converse.iter().find(|&&c| c >= n) {
            return Err(Error::Atom { atom: bad, atoms: n });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, a) in atoms.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(Error::Structural(format!("duplicate atom `{a}`")));
            }
        }
        Ok(RelAtomStructure { name, atoms, index, identity, converse, triples, comp: Arc::new(OnceLock::new()) })
    }

    /// Explicit structure from a list of consistent triples.
    pub fn from_triples<I>(
        name: impl Into<String>,
        atoms: Vec<String>,
        identity: AtomSet,
        converse: Vec<usize>,
        triples: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize)>,
    {
        let n = atoms.len();
        let mut bits = vec![0u64; (n * n * n).div_ceil(64)];
        for (a, b, c) in triples {
            for x in [a, b, c] {
                if x >= n {
                    return Err(Error::Atom { atom: x, atoms: n });
                }
            }
            let k = (a * n + b) * n + c;
            bits[k / 64] |= 1 << (k % 64);
        }
        Self::build(name.into(), atoms, identity, converse, Triples::Table(Arc::new(bits)))
    }

    /// Rule-backed structure; consistency is evaluated by `rule`.
    pub fn from_rule(
        name: impl Into<String>,
        atoms: Vec<String>,
        identity: AtomSet,
        converse: Vec<usize>,
        rule: Arc<dyn RuleFamily>,
    ) -> Result<Self> {
        Self::build(name.into(), atoms, identity, converse, Triples::Rule(rule))
    }

    /// The one-atom identity structure: atom `e`, `Id = {e}`, `C = {(e,e,e)}`.
    pub fn one_atom() -> Self {
        Self::from_triples("one-atom", vec!["e".into()], AtomSet::full(1), vec![0], [(0, 0, 0)])
            .expect("one-atom structure is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_name(&self, a: usize) -> &str {
        &self.atoms[a]
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn identity(&self) -> &AtomSet {
        &self.identity
    }

    pub fn is_identity(&self, a: usize) -> bool {
        self.identity.contains(a)
    }

    pub fn converse(&self, a: usize) -> usize {
        self.converse[a]
    }

    pub fn rule(&self) -> Option<&Arc<dyn RuleFamily>> {
        match &self.triples {
            Triples::Rule(r) => Some(r),
            Triples::Table(_) => None,
        }
    }

    pub fn is_consistent(&self, a: usize, b: usize, c: usize) -> bool {
        match &self.triples {
            Triples::Table(bits) => {
                let n = self.atoms.len();
                let k = (a * n + b) * n + c;
                bits[k / 64] >> (k % 64) & 1 == 1
            }
            Triples::Rule(r) => r.consistent(a, b, c),
        }
    }

    /// `{ c : (a, b, c) consistent }`, cached.
    pub fn comp(&self, a: usize, b: usize) -> &AtomSet {
        let n = self.atoms.len();
        &self.comp_table()[a * n + b]
    }

    fn comp_table(&self) -> &[AtomSet] {
        self.comp.get_or_init(|| {
            let n = self.atoms.len();
            Parallelism::default().map_range(n * n, |ab| {
                let (a, b) = (ab / n, ab % n);
                AtomSet::from_atoms(n, (0..n).filter(|&c| self.is_consistent(a, b, c)))
            })
        })
    }

    /// Every consistent triple in lexicographic order.
    pub fn consistent_triples(&self) -> Vec<(usize, usize, usize)> {
        let n = self.atoms.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                out.extend(self.comp(a, b).iter().map(|c| (a, b, c)));
            }
        }
        out
    }

    pub fn unit(&self) -> AtomSet {
        AtomSet::full(self.atoms.len())
    }

    pub fn set(&self, atoms: &[usize]) -> AtomSet {
        AtomSet::from_atoms(self.atoms.len(), atoms.iter().copied())
    }

    /// Explicit composition of atom sets.
    pub fn compose_sets(&self, x: &AtomSet, y: &AtomSet) -> AtomSet {
        let mut out = AtomSet::empty(self.atoms.len());
        for a in x.iter() {
            for b in y.iter() {
                out.union_with(self.comp(a, b));
            }
        }
        out
    }

    pub fn converse_set(&self, x: &AtomSet) -> AtomSet {
        AtomSet::from_atoms(self.atoms.len(), x.iter().map(|a| self.converse[a]))
    }
}

/// `X ; Y = { c : exists a in X, b in Y with (a, b, c) consistent }`.
pub fn ra_compose(s: &RelAtomStructure, x: &Element, y: &Element) -> Result<Element> {
    match (x, y) {
        (Element::Explicit(x), Element::Explicit(y)) => {
            check_universe(s, x)?;
            check_universe(s, y)?;
            Ok(Element::Explicit(s.compose_sets(x, y)))
        }
        (Element::Symbolic(x), Element::Symbolic(y)) => {
            let rule =
                s.rule().ok_or_else(|| Error::UnsupportedSymbolic(format!("{} is an explicit table", s.name())))?;
            Ok(Element::Symbolic(rule.compose_symbolic(x, y)?))
        }
        _ => Err(Error::UnsupportedSymbolic(
            "cannot mix explicit and symbolic operands; lift the explicit one first".into(),
        )),
    }
}

/// Image of an element under the converse involution.
pub fn ra_converse(s: &RelAtomStructure, x: &Element) -> Result<Element> {
    match x {
        Element::Explicit(x) => {
            check_universe(s, x)?;
            Ok(Element::Explicit(s.converse_set(x)))
        }
        Element::Symbolic(x) => {
            let rule =
                s.rule().ok_or_else(|| Error::UnsupportedSymbolic(format!("{} is an explicit table", s.name())))?;
            Ok(Element::Symbolic(rule.converse_symbolic(x)?))
        }
    }
}

fn check_universe(s: &RelAtomStructure, x: &AtomSet) -> Result<()> {
    if x.universe() != s.atom_count() {
        return Err(Error::Structural(format!(
            "element over {} atoms used with a {}-atom structure",
            x.universe(),
            s.atom_count()
        )));
    }
    Ok(())
}

pub fn validate_rel_structure(s: &RelAtomStructure) -> Result<ValidationReport> {
    validate_rel_structure_with(s, Parallelism::default())
}

/// Exhaustive check of the relation-atom-structure axioms: converse is an
/// involution, the identity witness clause, Peircean closure, and the
/// associativity witness clause. Every violation carries its witness.
pub fn validate_rel_structure_with(s: &RelAtomStructure, par: Parallelism) -> Result<ValidationReport> {
    let n = s.atom_count();
    if n == 0 {
        return Err(Error::Structural("atom list is empty".into()));
    }
    let mode = match s.rule() {
        Some(r) => format!("exhaustive on explicit truncation ({})", r.header()),
        None => "exhaustive".to_string(),
    };
    let mut report = ValidationReport::new(s.name(), mode);
    let name = |a: usize| s.atom_name(a).to_string();

    report.clause("converse-involution");
    for a in 0..n {
        let c = s.converse(a);
        if s.converse(c) != a {
            report
                .violate("converse-involution", format!("atom {} -> {} -> {}", name(a), name(c), name(s.converse(c))));
        }
    }

    report.clause("identity-witness");
    for a in 0..n {
        for b in 0..n {
            let witnessed = s.identity().iter().any(|e| s.is_consistent(a, e, b));
            if witnessed != (a == b) {
                let why = if a == b { "no identity atom e with (a,e,a)" } else { "identity atom links distinct atoms" };
                report.violate("identity-witness", format!("({},{}) {why}", name(a), name(b)));
            }
        }
    }

    report.clause("peircean");
    let peirce: Vec<Vec<String>> = par.map_range(n, |a| {
        let mut bad = Vec::new();
        for b in 0..n {
            for c in s.comp(a, b).iter() {
                if !s.is_consistent(s.converse(a), c, b) {
                    bad.push(format!(
                        "({},{},{}) but not (conv {}, {}, {})",
                        name(a),
                        name(b),
                        name(c),
                        name(a),
                        name(c),
                        name(b)
                    ));
                }
                if !s.is_consistent(c, s.converse(b), a) {
                    bad.push(format!(
                        "({},{},{}) but not ({}, conv {}, {})",
                        name(a),
                        name(b),
                        name(c),
                        name(c),
                        name(b),
                        name(a)
                    ));
                }
            }
        }
        bad
    });
    for w in peirce.into_iter().flatten() {
        report.violate("peircean", w);
    }

    // (a,b,c), (c,d,g) consistent => exists f with (a,f,g), (b,d,f) consistent;
    // i.e. (a;b);d is contained in a;(b;d) atom by atom.
    report.clause("associativity-witness");
    let assoc: Vec<Option<String>> = par.map_range(n, |a| {
        let mut lhs = AtomSet::empty(n);
        let mut rhs = AtomSet::empty(n);
        for b in 0..n {
            let ab = s.comp(a, b);
            for d in 0..n {
                lhs.clear();
                for c in ab.iter() {
                    lhs.union_with(s.comp(c, d));
                }
                rhs.clear();
                for f in s.comp(b, d).iter() {
                    rhs.union_with(s.comp(a, f));
                }
                if !lhs.is_subset(&rhs) {
                    let g = lhs.difference(&rhs).first().expect("non-subset has a witness");
                    let c = ab.iter().find(|&c| s.is_consistent(c, d, g)).expect("g came from some c");
                    return Some(format!(
                        "({},{},{}) and ({},{},{}) consistent but no f with ({},f,{}) and ({},{},f)",
                        name(a),
                        name(b),
                        name(c),
                        name(c),
                        name(d),
                        name(g),
                        name(a),
                        name(g),
                        name(b),
                        name(d)
                    ));
                }
            }
        }
        None
    });
    for w in assoc.into_iter().flatten() {
        report.violate("associativity-witness", w);
    }
    report.instances = (n * n * n) as u64;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atom(aaa: bool) -> RelAtomStructure {
        // Id = {e}, one diversity atom a.
        let mut t = vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)];
        if aaa {
            t.push((1, 1, 1));
        }
        RelAtomStructure::from_triples("two", vec!["e".into(), "a".into()], AtomSet::from_atoms(2, [0]), vec![0, 1], t)
            .unwrap()
    }

    #[test]
    fn one_atom_is_valid() {
        let r = validate_rel_structure(&RelAtomStructure::one_atom()).unwrap();
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn one_atom_without_triples_fails_identity_witness() {
        let s = RelAtomStructure::from_triples("bare", vec!["e".into()], AtomSet::full(1), vec![0], []).unwrap();
        let r = validate_rel_structure(&s).unwrap();
        assert!(r.violated("identity-witness"));
        assert!(r.violations[0].witness.contains("(e,e)"));
    }

    #[test]
    fn empty_atom_list_is_structural_error() {
        let e = RelAtomStructure::from_triples("none", vec![], AtomSet::empty(0), vec![], []);
        assert!(matches!(e, Err(Error::Structural(_))));
    }

    #[test]
    fn two_atom_structures_validate() {
        assert!(validate_rel_structure(&two_atom(true)).unwrap().is_valid());
        assert!(validate_rel_structure(&two_atom(false)).unwrap().is_valid());
    }

    #[test]
    fn broken_peircean_closure_is_reported() {
        // drop (1,0,1) but keep (0,1,1)
        let s = RelAtomStructure::from_triples(
            "broken",
            vec!["e".into(), "a".into()],
            AtomSet::from_atoms(2, [0]),
            vec![0, 1],
            [(0, 0, 0), (0, 1, 1), (1, 1, 0)],
        )
        .unwrap();
        let r = validate_rel_structure(&s).unwrap();
        assert!(r.violated("peircean") || r.violated("identity-witness"));
    }

    #[test]
    fn identity_composition_is_neutral() {
        let s = two_atom(true);
        let id = Element::Explicit(s.identity().clone());
        for mask in 0..4u64 {
            let x = Element::Explicit(AtomSet::from_mask(2, mask));
            assert_eq!(ra_compose(&s, &id, &x).unwrap(), x);
        }
    }

    #[test]
    fn converse_of_unit_is_unit() {
        let s = two_atom(false);
        let u = Element::Explicit(s.unit());
        assert_eq!(ra_converse(&s, &u).unwrap(), u);
    }

    #[test]
    fn symbolic_on_table_is_unsupported() {
        let s = two_atom(true);
        let x = Element::Symbolic(SymbolicElement::empty(1, 1));
        assert!(matches!(ra_compose(&s, &x, &x), Err(Error::UnsupportedSymbolic(_))));
    }
}
