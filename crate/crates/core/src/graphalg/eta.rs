use std::collections::HashMap;
use std::fmt;

use super::graph::Graph;
use crate::algebra::CylAtomStructure;
use crate::{AtomSet, Error, Result};

/// Atom cap for [`eta_of_graph`]; relations are stored densely.
const ETA_CAP: usize = 6000;

/// A pair `(K, ~)`: a partial map from indices to (vertex, colour) pairs and
/// an equivalence relation on indices, stored as a restricted growth string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EtaAtom {
    pub label: Vec<Option<(usize, usize)>>,
    pub classes: Vec<usize>,
}

impl EtaAtom {
    fn same(&self, a: usize, b: usize) -> bool {
        self.classes[a] == self.classes[b]
    }

    fn class_of(&self, a: usize) -> Vec<usize> {
        (0..self.classes.len()).filter(|&b| self.same(a, b)).collect()
    }
}

impl fmt::Display for EtaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.label.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            match l {
                Some((v, c)) => write!(f, "v{v}c{c}")?,
                None => write!(f, "_")?,
            }
        }
        write!(f, "|")?;
        for c in &self.classes {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn canonical(classes: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    classes
        .iter()
        .map(|c| {
            let next = map.len();
            *map.entry(*c).or_insert(next)
        })
        .collect()
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let top = prefix.iter().max().map_or(0, |m| m + 1);
        for c in 0..=top {
            prefix.push(c);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// The admissible pairs, partitions first, labels lexicographic.
fn enumerate(g: &Graph, n: usize) -> Vec<EtaAtom> {
    let values: Vec<(usize, usize)> = (0..g.vertex_count()).flat_map(|v| (0..n).map(move |c| (v, c))).collect();
    let mut out = Vec::new();
    for classes in partitions(n) {
        let count = classes.iter().max().map_or(0, |m| m + 1);
        if count == n {
            // total labels whose vertices are not independent
            let total = values.len().pow(n as u32);
            for mut code in 0..total {
                let label: Vec<(usize, usize)> = (0..n)
                    .map(|_| {
                        let v = values[code % values.len()];
                        code /= values.len();
                        v
                    })
                    .collect();
                let vertices: Vec<usize> = label.iter().map(|l| l.0).collect();
                let dependent = (0..n).any(|a| (a + 1..n).any(|b| g.has_edge(vertices[a], vertices[b])));
                if dependent {
                    out.push(EtaAtom { label: label.into_iter().map(Some).collect(), classes: classes.clone() });
                }
            }
        } else if count + 1 == n {
            let pair: Vec<usize> = (0..n).filter(|&a| (0..n).any(|b| b != a && classes[a] == classes[b])).collect();
            for &v in &values {
                let label = (0..n).map(|a| pair.contains(&a).then_some(v)).collect();
                out.push(EtaAtom { label, classes: classes.clone() });
            }
        } else {
            out.push(EtaAtom { label: vec![None; n], classes });
        }
    }
    out.sort();
    out
}

#[cfg(test)]
/// `≡_i`: equal values at `i`, same equivalence off `i`.
fn cyl_related(a: &EtaAtom, b: &EtaAtom, i: usize) -> bool {
    let n = a.classes.len();
    a.label[i] == b.label[i]
        && (0..n).filter(|&k| k != i).all(|k| (0..n).filter(|&l| l != i).all(|l| a.same(k, l) == b.same(k, l)))
}

/// `≡_ij` as four clauses: values at `i`, `j` exchanged, values off
/// `{i, j}` kept, and the equivalence kept when `i ~ j`, otherwise rebuilt
/// with the classes of `i` and `j` exchanged.
pub(crate) fn swap_related(a: &EtaAtom, b: &EtaAtom, i: usize, j: usize) -> bool {
    let n = a.classes.len();
    if a.label[i] != b.label[j] || a.label[j] != b.label[i] {
        return false;
    }
    if (0..n).any(|k| k != i && k != j && a.label[k] != b.label[k]) {
        return false;
    }
    if a.same(i, j) {
        return a.classes == b.classes;
    }
    let (ci, cj) = (a.class_of(i), a.class_of(j));
    let swapped = |class: &[usize], from: usize, to: usize| {
        let mut c: Vec<usize> = class.iter().map(|&x| if x == from { to } else { x }).collect();
        c.sort_unstable();
        c
    };
    let want_i = swapped(&cj, j, i);
    let want_j = swapped(&ci, i, j);
    (0..n).all(|k| if ci.contains(&k) || cj.contains(&k) { true } else { b.class_of(k) == a.class_of(k) })
        && b.class_of(i) == want_i
        && b.class_of(j) == want_j
}

/// The unique candidate the clauses allow.
fn swap_image(a: &EtaAtom, i: usize, j: usize) -> EtaAtom {
    let mut label = a.label.clone();
    label.swap(i, j);
    let classes = if a.same(i, j) {
        a.classes.clone()
    } else {
        let mut c = a.classes.clone();
        c.swap(i, j);
        canonical(&c)
    };
    EtaAtom { label, classes }
}

/// The cylindric atom structure of pairs `(K, ~)` over `g` in dimension
/// `n`, with diagonals `D_ij = { i ~ j }`, relations `≡_i` and swap
/// relations `≡_ij`.
///
/// With `|n/~| = n` the label is total and its vertices are not
/// independent in `g`; with `|n/~| = n - 1` it is defined exactly on the
/// class of size two, with equal values there; otherwise it is empty.
pub fn eta_of_graph(g: &Graph, n: usize) -> Result<CylAtomStructure> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("dimension {n}; need at least 3")));
    }
    let values = g.vertex_count() * n;
    if values.checked_pow(n as u32).is_none_or(|c| c > 4 * ETA_CAP) {
        return Err(Error::CapExceeded(format!("{values}^{n} labels")));
    }
    let atoms = enumerate(g, n);
    let count = atoms.len();
    if count > ETA_CAP {
        return Err(Error::CapExceeded(format!("{count} atoms exceeds {ETA_CAP}")));
    }
    let index: HashMap<&EtaAtom, usize> = atoms.iter().enumerate().map(|(k, a)| (a, k)).collect();
    let diag = (0..n * n)
        .map(|ij| AtomSet::from_atoms(count, (0..count).filter(|&a| atoms[a].same(ij / n, ij % n))))
        .collect();
    let equiv = (0..n)
        .map(|i| {
            let mut groups: HashMap<_, AtomSet> = HashMap::new();
            let key = |a: &EtaAtom| {
                let off: Vec<bool> = (0..n)
                    .filter(|&k| k != i)
                    .flat_map(|k| (0..n).filter(move |&l| l != i && l > k).map(move |l| (k, l)))
                    .map(|(k, l)| a.same(k, l))
                    .collect();
                (a.label[i], off)
            };
            for (k, a) in atoms.iter().enumerate() {
                groups.entry(key(a)).or_insert_with(|| AtomSet::empty(count)).insert(k);
            }
            atoms.iter().map(|a| groups[&key(a)].clone()).collect()
        })
        .collect();
    let mut swap = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            swap[i * n + j] = atoms
                .iter()
                .map(|a| {
                    let img = swap_image(a, i, j);
                    let mut row = AtomSet::empty(count);
                    if let Some(&b) = index.get(&img) {
                        debug_assert!(swap_related(a, &atoms[b], i, j));
                        row.insert(b);
                    }
                    row
                })
                .collect();
        }
    }
    let names = atoms.iter().map(|a| a.to_string()).collect();
    let name = format!("eta-{}v-{}e-n{n}", g.vertex_count(), g.edge_count());
    CylAtomStructure::from_parts(name, n, names, diag, equiv, Some(swap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::validate_cyl_structure;

    #[test]
    fn single_vertex_atoms() {
        // no total labels survive; three pair-partitions times three values,
        // plus the one-class partition
        let s = eta_of_graph(&Graph::new(1), 3).unwrap();
        assert_eq!(s.atom_count(), 10);
        assert_eq!(enumerate(&Graph::new(1), 3).len(), 10);
    }

    #[test]
    fn k2_atoms() {
        // total labels: 2^3 - 2 vertex patterns using both ends, 3^3 colourings
        let s = eta_of_graph(&Graph::complete(2), 3).unwrap();
        assert_eq!(s.atom_count(), 6 * 27 + 3 * 6 + 1);
        assert!(validate_cyl_structure(&s).is_valid());
    }

    #[test]
    fn diagonal_atoms_identify_their_indices() {
        let s = eta_of_graph(&Graph::complete(2), 3).unwrap();
        let atoms = enumerate(&Graph::complete(2), 3);
        for i in 0..3 {
            for j in 0..3 {
                for a in s.diag_set(i, j).iter() {
                    assert!(atoms[a].same(i, j));
                }
            }
        }
    }

    #[test]
    fn fast_relations_match_the_clauses() {
        let g = Graph::complete(2);
        let s = eta_of_graph(&g, 3).unwrap();
        let atoms = enumerate(&g, 3);
        for i in 0..3 {
            for (x, a) in atoms.iter().enumerate() {
                for (y, b) in atoms.iter().enumerate() {
                    assert_eq!(s.equivalent(i, x, y), cyl_related(a, b, i));
                    for j in 0..3 {
                        if i != j {
                            assert_eq!(
                                s.swap_row(i, j, x).unwrap().contains(y),
                                swap_related(a, b, i.min(j), i.max(j))
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn swap_of_a_single_atom() {
        let g = Graph::complete(2);
        let s = eta_of_graph(&g, 3).unwrap();
        let a = s.atom_index("v0c0,v1c2,v1c1|012").unwrap();
        let p = s.swap(0, 1, &s.set(&[a])).unwrap();
        let got: Vec<_> = p.iter().map(|b| s.atom_name(b)).collect();
        assert_eq!(got, vec!["v1c2,v0c0,v1c1|012"]);
        let b = s.atom_index("v0c1,v0c1,_|001").unwrap();
        let p = s.swap(1, 2, &s.set(&[b])).unwrap();
        let got: Vec<_> = p.iter().map(|x| s.atom_name(x)).collect();
        // classes {0,1},{2} become {0,2},{1}; the label moves with them
        assert_eq!(got, vec!["v0c1,_,v0c1|010"]);
    }

    #[test]
    fn atom_count_grows_with_edges() {
        let mut g = Graph::new(4);
        let mut last = eta_of_graph(&g, 3).unwrap().atom_count();
        for (u, v) in [(0, 1), (2, 3), (1, 2), (0, 3)] {
            g.add_edge(u, v).unwrap();
            let now = eta_of_graph(&g, 3).unwrap().atom_count();
            assert!(now >= last);
            last = now;
        }
    }
}
