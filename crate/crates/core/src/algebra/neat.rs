use std::collections::BTreeSet;

use super::cyl::CylAtomStructure;
use super::element::Element;
use crate::{AtomSet, Error, Result};

/// `Δx = { i : c_i x != x }`.
pub fn dimension_set(s: &CylAtomStructure, x: &Element) -> Result<BTreeSet<usize>> {
    let x = x
        .as_explicit()
        .ok_or_else(|| Error::UnsupportedSymbolic("cylindric structures only take explicit elements".into()))?;
    dims(s, x)
}

fn dims(s: &CylAtomStructure, x: &AtomSet) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for i in 0..s.dim() {
        if s.cylindrify(i, x)? != *x {
            out.insert(i);
        }
    }
    Ok(out)
}

/// The `n`-dimensional neat reduct of a higher-dimensional complex algebra:
/// the elements whose dimension set lies below `n`, with the operators for
/// indices below `n`.
#[derive(Debug, Clone)]
pub struct NeatReduct<'a> {
    s: &'a CylAtomStructure,
    n: usize,
}

pub fn neat_reduct(s: &CylAtomStructure, n: usize) -> Result<NeatReduct<'_>> {
    if n >= s.dim() {
        return Err(Error::InvalidParams(format!(
            "reduct dimension {n} must be below the structure dimension {}",
            s.dim()
        )));
    }
    Ok(NeatReduct { s, n })
}

impl NeatReduct<'_> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Whether `x` has dimension set inside `0..n`.
    pub fn contains(&self, x: &AtomSet) -> Result<bool> {
        Ok((self.n..self.s.dim()).all(|i| self.s.cylindrify(i, x).is_ok_and(|c| c == *x))
            && x.universe() == self.s.atom_count())
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::Index { index: i, dim: self.n });
        }
        Ok(())
    }

    pub fn cylindrify(&self, i: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check(i)?;
        self.s.cylindrify(i, x)
    }

    pub fn diagonal(&self, i: usize, j: usize) -> Result<AtomSet> {
        self.check(i)?;
        self.check(j)?;
        self.s.diagonal(i, j)
    }

    pub fn substitute(&self, i: usize, j: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check(i)?;
        self.check(j)?;
        self.s.substitute(i, j, x)
    }

    pub fn swap(&self, i: usize, j: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check(i)?;
        self.check(j)?;
        self.s.swap(i, j, x)
    }

    /// All members, by exhaustive scan; refuses above 20 atoms.
    pub fn members(&self) -> Result<Vec<AtomSet>> {
        let n = self.s.atom_count();
        if n > 20 {
            return Err(Error::CapExceeded(format!("{n} atoms is too many to enumerate subsets")));
        }
        let mut out = Vec::new();
        for m in 0..1u64 << n {
            let x = AtomSet::from_mask(n, m);
            if self.contains(&x)? {
                out.push(x);
            }
        }
        Ok(out)
    }
}
