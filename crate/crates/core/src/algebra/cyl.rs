use std::collections::HashMap;
use std::fmt;

use super::element::Element;
use crate::{AtomSet, Error, Result, ValidationReport};

/// A cylindric (optionally polyadic-equality) atom structure of finite
/// dimension: diagonal atom sets `D[i][j]`, one relation `≡_i` per index and
/// optional swap relations `≡_ij`.
///
/// Relations are stored row-wise: `equiv[i][a]` is the set of atoms related
/// to `a`. Nothing forces them to be equivalences; [`validate_cyl_structure`]
/// checks that.
#[derive(Clone)]
pub struct CylAtomStructure {
    name: String,
    dim: usize,
    atoms: Vec<String>,
    index: HashMap<String, usize>,
    diag: Vec<AtomSet>,
    equiv: Vec<Vec<AtomSet>>,
    swap: Option<Vec<Vec<AtomSet>>>,
}

impl fmt::Debug for CylAtomStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CylAtomStructure")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("atoms", &self.atoms.len())
            .field("swap", &self.swap.is_some())
            .finish()
    }
}

fn pair_slot(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * dim + j
}

impl CylAtomStructure {
    /// Builds a structure from membership predicates.
    ///
    /// `diag(i, j, a)` decides `a ∈ D[i][j]`, `equiv(i, a, b)` decides
    /// `a ≡_i b`, and `swap(i, j, a, b)` (called with `i < j`) decides
    /// `a ≡_ij b`.
    pub fn from_fns<D, E, S>(
        name: impl Into<String>,
        dim: usize,
        atoms: Vec<String>,
        diag: D,
        equiv: E,
        swap: Option<S>,
    ) -> Result<Self>
    where
        D: Fn(usize, usize, usize) -> bool,
        E: Fn(usize, usize, usize) -> bool,
        S: Fn(usize, usize, usize, usize) -> bool,
    {
        let n = atoms.len();
        let diag =
            (0..dim * dim).map(|ij| AtomSet::from_atoms(n, (0..n).filter(|&a| diag(ij / dim, ij % dim, a)))).collect();
        let equiv = (0..dim)
            .map(|i| (0..n).map(|a| AtomSet::from_atoms(n, (0..n).filter(|&b| equiv(i, a, b)))).collect())
            .collect();
        let swap = swap.map(|s| {
            let mut rel = vec![Vec::new(); dim * dim];
            for i in 0..dim {
                for j in i + 1..dim {
                    rel[i * dim + j] =
                        (0..n).map(|a| AtomSet::from_atoms(n, (0..n).filter(|&b| s(i, j, a, b)))).collect();
                }
            }
            rel
        });
        Self::from_parts(name, dim, atoms, diag, equiv, swap)
    }

    /// Builds a structure from row tables. `diag` is indexed `i * dim + j`;
    /// `swap`, when present, is indexed `i * dim + j` for `i < j` and other
    /// slots are ignored.
    pub fn from_parts(
        name: impl Into<String>,
        dim: usize,
        atoms: Vec<String>,
        diag: Vec<AtomSet>,
        equiv: Vec<Vec<AtomSet>>,
        swap: Option<Vec<Vec<AtomSet>>>,
    ) -> Result<Self> {
        let n = atoms.len();
        if n == 0 {
            return Err(Error::Structural("atom list is empty".into()));
        }
        if dim < 1 {
            return Err(Error::Structural("dimension must be positive".into()));
        }
        if diag.len() != dim * dim || diag.iter().any(|d| d.universe() != n) {
            return Err(Error::Structural("diagonal table has the wrong shape".into()));
        }
        let rows_ok = |rows: &Vec<AtomSet>| rows.len() == n && rows.iter().all(|r| r.universe() == n);
        if equiv.len() != dim || !equiv.iter().all(rows_ok) {
            return Err(Error::Structural("equivalence table has the wrong shape".into()));
        }
        if let Some(sw) = &swap {
            let ok = sw.len() == dim * dim && (0..dim).all(|i| (i + 1..dim).all(|j| rows_ok(&sw[i * dim + j])));
            if !ok {
                return Err(Error::Structural("swap table has the wrong shape".into()));
            }
        }
        let mut index = HashMap::with_capacity(n);
        for (i, a) in atoms.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(Error::Structural(format!("duplicate atom `{a}`")));
            }
        }
        Ok(CylAtomStructure { name: name.into(), dim, atoms, index, diag, equiv, swap })
    }

    /// The atom structure of the full cylindric set algebra on `base^dim`:
    /// atoms are sequences, `≡_i` is agreement off `i`, and `≡_ij` is the
    /// graph of the transposition of coordinates `i` and `j`.
    pub fn cartesian(dim: usize, base: usize) -> Result<Self> {
        let count = base
            .checked_pow(dim as u32)
            .filter(|&c| c <= 1 << 16)
            .ok_or_else(|| Error::CapExceeded(format!("{base}^{dim} atoms")))?;
        let seqs: Vec<Vec<usize>> = (0..count)
            .map(|mut k| {
                (0..dim)
                    .map(|_| {
                        let d = k % base;
                        k /= base;
                        d
                    })
                    .collect()
            })
            .collect();
        let names = seqs.iter().map(|s| s.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("")).collect();
        let agree_off = |i: usize, a: &[usize], b: &[usize]| (0..dim).all(|k| k == i || a[k] == b[k]);
        Self::from_fns(
            format!("cartesian-{dim}-{base}"),
            dim,
            names,
            |i, j, a| seqs[a][i] == seqs[a][j],
            |i, a, b| agree_off(i, &seqs[a], &seqs[b]),
            Some(|i: usize, j: usize, a: usize, b: usize| {
                let (s, t) = (&seqs[a], &seqs[b]);
                (0..dim).all(|k| {
                    let src = if k == i {
                        j
                    } else if k == j {
                        i
                    } else {
                        k
                    };
                    t[k] == s[src]
                })
            }),
        )
    }

    /// The one-atom structure of dimension `dim`.
    pub fn one_atom(dim: usize) -> Self {
        Self::from_fns(
            "one-atom",
            dim,
            vec!["e".into()],
            |_, _, _| true,
            |_, _, _| true,
            Some(|_: usize, _: usize, _: usize, _: usize| true),
        )
        .expect("one-atom structure is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    pub fn has_swap(&self) -> bool {
        self.swap.is_some()
    }

    pub fn unit(&self) -> AtomSet {
        AtomSet::full(self.atoms.len())
    }

    pub fn empty(&self) -> AtomSet {
        AtomSet::empty(self.atoms.len())
    }

    pub fn set(&self, atoms: &[usize]) -> AtomSet {
        AtomSet::from_atoms(self.atoms.len(), atoms.iter().copied())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.dim {
            return Err(Error::Index { index: i, dim: self.dim });
        }
        Ok(())
    }

    fn check_set(&self, x: &AtomSet) -> Result<()> {
        if x.universe() != self.atoms.len() {
            return Err(Error::Structural(format!(
                "element over {} atoms used with a {}-atom structure",
                x.universe(),
                self.atoms.len()
            )));
        }
        Ok(())
    }

    /// `D[i][j]`, unchecked.
    pub fn diag_set(&self, i: usize, j: usize) -> &AtomSet {
        &self.diag[i * self.dim + j]
    }

    /// Atoms `≡_i`-related to `a`, unchecked.
    pub fn equiv_row(&self, i: usize, a: usize) -> &AtomSet {
        &self.equiv[i][a]
    }

    /// Atoms `≡_ij`-related to `a`, unchecked; `None` without swaps or for `i == j`.
    pub fn swap_row(&self, i: usize, j: usize, a: usize) -> Option<&AtomSet> {
        if i == j {
            return None;
        }
        self.swap.as_ref().map(|s| &s[pair_slot(self.dim, i, j)][a])
    }

    pub fn equivalent(&self, i: usize, a: usize, b: usize) -> bool {
        self.equiv[i][a].contains(b)
    }

    /// `c_i X = { c : exists a in X with a ≡_i c }`.
    pub fn cylindrify(&self, i: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check_index(i)?;
        self.check_set(x)?;
        Ok(close(&self.equiv[i], x))
    }

    pub fn diagonal(&self, i: usize, j: usize) -> Result<AtomSet> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.diag_set(i, j).clone())
    }

    /// `s^i_j X = c_j(X · d_ij)` for `i != j`; the identity when `i == j`.
    pub fn substitute(&self, i: usize, j: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.check_set(x)?;
        if i == j {
            return Ok(x.clone());
        }
        Ok(close(&self.equiv[j], &x.intersection(self.diag_set(i, j))))
    }

    /// `p_ij X = { c : exists a in X with a ≡_ij c }`; `p_ii` is the identity.
    pub fn swap(&self, i: usize, j: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.check_set(x)?;
        let sw =
            self.swap.as_ref().ok_or_else(|| Error::Unsupported(format!("{} has no swap relations", self.name)))?;
        if i == j {
            return Ok(x.clone());
        }
        Ok(close(&sw[pair_slot(self.dim, i, j)], x))
    }
}

fn close(rows: &[AtomSet], x: &AtomSet) -> AtomSet {
    let mut out = AtomSet::empty(x.universe());
    for a in x.iter() {
        out.union_with(&rows[a]);
    }
    out
}

fn explicit(x: &Element) -> Result<&AtomSet> {
    x.as_explicit().ok_or_else(|| Error::UnsupportedSymbolic("cylindric structures only take explicit elements".into()))
}

pub fn ca_cylindrify(s: &CylAtomStructure, i: usize, x: &Element) -> Result<Element> {
    Ok(Element::Explicit(s.cylindrify(i, explicit(x)?)?))
}

pub fn ca_diagonal(s: &CylAtomStructure, i: usize, j: usize) -> Result<Element> {
    Ok(Element::Explicit(s.diagonal(i, j)?))
}

pub fn ca_substitute(s: &CylAtomStructure, i: usize, j: usize, x: &Element) -> Result<Element> {
    Ok(Element::Explicit(s.substitute(i, j, explicit(x)?)?))
}

pub fn ca_swap(s: &CylAtomStructure, i: usize, j: usize, x: &Element) -> Result<Element> {
    Ok(Element::Explicit(s.swap(i, j, explicit(x)?)?))
}

/// Checks the data invariants: every `≡_i` is an equivalence relation,
/// `D[i][i]` is the unit and `D[i][j] = D[j][i]`.
pub fn validate_cyl_structure(s: &CylAtomStructure) -> ValidationReport {
    let n = s.atom_count();
    let mut report = ValidationReport::new(s.name(), "exhaustive");
    let name = |a: usize| s.atom_name(a).to_string();
    for i in 0..s.dim() {
        let refl = format!("equiv{i}-reflexive");
        let sym = format!("equiv{i}-symmetric");
        let trans = format!("equiv{i}-transitive");
        report.clause(refl.clone());
        report.clause(sym.clone());
        report.clause(trans.clone());
        for a in 0..n {
            let row = s.equiv_row(i, a);
            if !row.contains(a) {
                report.violate(refl.clone(), name(a));
            }
            for b in row.iter() {
                if !s.equivalent(i, b, a) {
                    report.violate(sym.clone(), format!("{} ~ {} only one way", name(a), name(b)));
                }
                if let Some(c) = s.equiv_row(i, b).difference(row).first() {
                    report.violate(
                        trans.clone(),
                        format!("{} ~ {} ~ {} but not {} ~ {}", name(a), name(b), name(c), name(a), name(c)),
                    );
                }
            }
        }
    }
    report.clause("diagonal-unit");
    report.clause("diagonal-symmetric");
    for i in 0..s.dim() {
        if let Some(a) = s.diag_set(i, i).complement().first() {
            report.violate("diagonal-unit", format!("atom {} not in D[{i}][{i}]", name(a)));
        }
        for j in i + 1..s.dim() {
            if let Some(a) = s.diag_set(i, j).difference(s.diag_set(j, i)).first() {
                report.violate("diagonal-symmetric", format!("atom {} in D[{i}][{j}] only", name(a)));
            }
            if let Some(a) = s.diag_set(j, i).difference(s.diag_set(i, j)).first() {
                report.violate("diagonal-symmetric", format!("atom {} in D[{j}][{i}] only", name(a)));
            }
        }
    }
    report.instances = (s.dim() * n * n) as u64;
    report
}
