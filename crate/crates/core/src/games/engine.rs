//! Dense network labellings and the completion search shared by the game
//! solvers.
//!
//! Nodes are names below a fixed capacity; a labelling stores one `u32` per
//! tuple over `0..cap`, with [`NONE`] for tuples outside the node set.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::algebra::CylAtomStructure;
use crate::budget::Meter;
use crate::canon::{canonical_form, Canonical};
use crate::AtomSet;

use super::network::{Hypernetwork, Network};

pub(crate) const NONE: u32 = u32::MAX;

/// The search ran out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Exhausted;

#[derive(Debug, Clone)]
pub(crate) struct Shape {
    pub arity: usize,
    pub cap: usize,
    pow: Vec<usize>,
}

impl Shape {
    pub fn new(arity: usize, cap: usize) -> Self {
        // most significant coordinate first, so index order is lexicographic
        let pow = (0..arity).map(|i| cap.pow((arity - 1 - i) as u32)).collect();
        Shape { arity, cap, pow }
    }

    pub fn len(&self) -> usize {
        self.cap.pow(self.arity as u32)
    }

    pub fn index(&self, t: &[usize]) -> usize {
        t.iter().zip(&self.pow).map(|(x, p)| x * p).sum()
    }

    pub fn decode(&self, mut idx: usize, out: &mut [usize]) {
        for i in (0..self.arity).rev() {
            out[i] = idx % self.cap;
            idx /= self.cap;
        }
    }

    /// Indices of all tuples over `nodes`, in lexicographic order.
    pub fn tuples_over(&self, nodes: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        super::network::for_each_tuple_over(nodes, self.arity, |t| out.push(self.index(t)));
        out
    }

    pub fn with_coord(&self, idx: usize, i: usize, from: usize, to: usize) -> usize {
        idx - from * self.pow[i] + to * self.pow[i]
    }
}

pub(crate) fn mask_nodes(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Dense labelling to a sparse [`Network`].
pub(crate) fn to_network(shape: &Shape, nodes: u64, labels: &[u32]) -> Network {
    let ns = mask_nodes(nodes);
    let mut n = Network::new(shape.arity, ns.iter().copied());
    let mut t = vec![0; shape.arity];
    for idx in shape.tuples_over(&ns) {
        shape.decode(idx, &mut t);
        n.set(t.clone(), labels[idx] as usize).expect("arity matches");
    }
    n
}

/// Sparse [`Network`] to a dense labelling; `None` if a node is at or above
/// the capacity or a tuple is unlabelled.
pub(crate) fn from_network(shape: &Shape, n: &Network) -> Option<(u64, Vec<u32>)> {
    if n.nodes().iter().any(|&x| x >= shape.cap) || n.arity() != shape.arity {
        return None;
    }
    let mut labels = vec![NONE; shape.len()];
    let mut mask = 0u64;
    for &x in n.nodes() {
        mask |= 1 << x;
    }
    for (t, a) in n.labels() {
        labels[shape.index(t)] = a as u32;
    }
    let ns = mask_nodes(mask);
    if shape.tuples_over(&ns).iter().any(|&i| labels[i] == NONE) {
        return None;
    }
    Some((mask, labels))
}

pub(crate) fn to_hypernetwork(
    shape: &Shape,
    hshape: Option<&Shape>,
    nodes: u64,
    labels: &[u32],
    hyper: &[u32],
) -> Hypernetwork {
    let mut h = Hypernetwork::new(to_network(shape, nodes, labels));
    if let Some(hs) = hshape {
        let ns = mask_nodes(nodes);
        let mut t = vec![0; hs.arity];
        for idx in hs.tuples_over(&ns) {
            hs.decode(idx, &mut t);
            h.set_hyperlabel(t.clone(), hyper[idx] as usize);
        }
    }
    h
}

/// Canonical form of a dense labelling (plus optional hyperlabels) under
/// renaming of its nodes onto `0..k`.
pub(crate) fn canonicalize(
    shape: &Shape,
    hshape: Option<&Shape>,
    nodes: u64,
    labels: &[u32],
    hyper: &[u32],
) -> Canonical {
    let ns = mask_nodes(nodes);
    let mut arities = vec![shape.arity];
    if let Some(h) = hshape {
        arities.push(h.arity);
    }
    canonical_form(ns.len(), &arities, |t: &[usize]| {
        let mut b = [0usize; 16];
        for (slot, &v) in b.iter_mut().zip(t) {
            *slot = ns[v];
        }
        let b = &b[..t.len()];
        if t.len() == shape.arity {
            labels[shape.index(b)]
        } else {
            hyper[hshape.expect("hyper arity").index(b)]
        }
    })
}

/// Relabels a dense labelling by `rename[old] = new`.
pub(crate) fn rename(shape: &Shape, nodes: u64, labels: &[u32], rename: &BTreeMap<usize, usize>) -> (u64, Vec<u32>) {
    let ns = mask_nodes(nodes);
    let mut out = vec![NONE; shape.len()];
    let mut mask = 0u64;
    for &x in &ns {
        mask |= 1 << rename[&x];
    }
    let mut t = vec![0; shape.arity];
    for idx in shape.tuples_over(&ns) {
        shape.decode(idx, &mut t);
        for v in t.iter_mut() {
            *v = rename[v];
        }
        out[shape.index(&t)] = labels[idx];
    }
    (mask, out)
}

/// Enumerates every atomic labelling of the tuples over `nodes` that are
/// [`NONE`] in `labels`, keeping the others fixed and forcing each `(tuple,
/// atom)` in `forced`. `visit` sees each completion and may stop the search.
///
/// The structure's `≡_i` must be equivalence relations.
pub(crate) fn complete<V>(
    s: &CylAtomStructure,
    shape: &Shape,
    nodes: &[usize],
    labels: &mut [u32],
    forced: &[(usize, u32)],
    meter: &Meter,
    visit: &mut V,
) -> Result<ControlFlow<()>, Exhausted>
where
    V: FnMut(&[u32]) -> ControlFlow<()>,
{
    let dim = shape.arity;
    let all = shape.tuples_over(nodes);
    let free: Vec<usize> = all.iter().copied().filter(|&i| labels[i] == NONE).collect();
    let slot: BTreeMap<usize, usize> = free.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut t = vec![0; dim];
    let mut doms: Vec<AtomSet> = Vec::with_capacity(free.len());
    let mut links: Vec<Vec<(usize, usize)>> = Vec::with_capacity(free.len());
    for &idx in &free {
        shape.decode(idx, &mut t);
        let mut dom = s.unit();
        for i in 0..dim {
            for j in i + 1..dim {
                if t[i] == t[j] {
                    dom.intersect_with(s.diag_set(i, j));
                }
            }
        }
        let mut link = Vec::new();
        for (i, &ti) in t.iter().enumerate().take(dim) {
            for &d in nodes {
                if d == ti {
                    continue;
                }
                let other = shape.with_coord(idx, i, ti, d);
                match labels[other] {
                    NONE => link.push((slot[&other], i)),
                    b => dom.intersect_with(s.equiv_row(i, b as usize)),
                }
            }
        }
        doms.push(dom);
        links.push(link);
    }
    for &(idx, a) in forced {
        match slot.get(&idx) {
            Some(&k) => {
                if doms[k].contains(a as usize) {
                    doms[k] = AtomSet::singleton(s.atom_count(), a as usize);
                } else {
                    return Ok(ControlFlow::Continue(()));
                }
            }
            None => {
                if labels[idx] != a {
                    return Ok(ControlFlow::Continue(()));
                }
            }
        }
    }
    if doms.iter().any(|d| d.is_empty()) {
        return Ok(ControlFlow::Continue(()));
    }
    let mut search = Completion { s, free: &free, links: &links, doms, assigned: vec![false; free.len()], meter };
    search.run(labels, visit)
}

struct Completion<'a> {
    s: &'a CylAtomStructure,
    free: &'a [usize],
    links: &'a [Vec<(usize, usize)>],
    doms: Vec<AtomSet>,
    assigned: Vec<bool>,
    meter: &'a Meter,
}

impl Completion<'_> {
    fn run<V>(&mut self, labels: &mut [u32], visit: &mut V) -> Result<ControlFlow<()>, Exhausted>
    where
        V: FnMut(&[u32]) -> ControlFlow<()>,
    {
        if !self.meter.tick() {
            return Err(Exhausted);
        }
        // smallest remaining domain first
        let next = (0..self.free.len()).filter(|&k| !self.assigned[k]).min_by_key(|&k| (self.doms[k].len(), k));
        let Some(k) = next else {
            return Ok(visit(labels));
        };
        let choices = self.doms[k].to_vec();
        self.assigned[k] = true;
        for a in choices {
            let mut trail: Vec<(usize, AtomSet)> = Vec::new();
            let mut ok = true;
            for &(g, i) in &self.links[k] {
                if self.assigned[g] {
                    continue;
                }
                let narrowed = self.doms[g].intersection(self.s.equiv_row(i, a));
                if narrowed.is_empty() {
                    ok = false;
                    break;
                }
                if narrowed.len() != self.doms[g].len() {
                    trail.push((g, std::mem::replace(&mut self.doms[g], narrowed)));
                }
            }
            if ok {
                labels[self.free[k]] = a as u32;
                let flow = self.run(labels, visit);
                labels[self.free[k]] = NONE;
                match flow {
                    Ok(ControlFlow::Continue(())) => {}
                    other => {
                        for (g, d) in trail.into_iter().rev() {
                            self.doms[g] = d;
                        }
                        self.assigned[k] = false;
                        return other;
                    }
                }
            }
            for (g, d) in trail.into_iter().rev() {
                self.doms[g] = d;
            }
        }
        self.assigned[k] = false;
        Ok(ControlFlow::Continue(()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::network::is_atomic_network;
    use crate::Budget;

    fn count(s: &CylAtomStructure, k: usize) -> usize {
        let shape = Shape::new(s.dim(), k);
        let nodes: Vec<usize> = (0..k).collect();
        let mut labels = vec![NONE; shape.len()];
        let meter = Budget::unlimited().meter();
        let mut seen = 0;
        let _ = complete(s, &shape, &nodes, &mut labels, &[], &meter, &mut |l| {
            let mask = (1u64 << k) - 1;
            assert!(is_atomic_network(s, &to_network(&shape, mask, l)).unwrap().is_valid());
            seen += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
        seen
    }

    // brute force: every labelling of all tuples, filtered by the network
    // clauses
    fn brute(s: &CylAtomStructure, k: usize) -> usize {
        let shape = Shape::new(s.dim(), k);
        let tuples = shape.len();
        let atoms = s.atom_count();
        let mut total = 0;
        let mut code = vec![0usize; tuples];
        loop {
            let mut n = Network::new(s.dim(), 0..k);
            let mut t = vec![0; s.dim()];
            for (idx, &a) in code.iter().enumerate() {
                shape.decode(idx, &mut t);
                n.set(t.clone(), a).unwrap();
            }
            if is_atomic_network(s, &n).unwrap().is_valid() {
                total += 1;
            }
            let mut p = 0;
            loop {
                if p == tuples {
                    return total;
                }
                code[p] += 1;
                if code[p] < atoms {
                    break;
                }
                code[p] = 0;
                p += 1;
            }
        }
    }

    #[test]
    fn completion_count_matches_brute_force() {
        let s = CylAtomStructure::cartesian(2, 2).unwrap();
        for k in 1..=2 {
            assert_eq!(count(&s, k), brute(&s, k), "k={k}");
        }
    }

    #[test]
    fn set_algebra_networks_are_maps_into_the_base() {
        // atomic networks over cartesian(2, b) on k nodes correspond to maps
        // from the nodes into the base
        let s = CylAtomStructure::cartesian(2, 3).unwrap();
        assert_eq!(count(&s, 2), 9);
        assert_eq!(count(&s, 3), 27);
    }

    #[test]
    fn forced_labels_are_respected() {
        let s = CylAtomStructure::cartesian(2, 3).unwrap();
        let shape = Shape::new(2, 2);
        let mut labels = vec![NONE; shape.len()];
        let meter = Budget::unlimited().meter();
        let a = s.atom_index("01").unwrap() as u32;
        let mut seen = Vec::new();
        let _ = complete(&s, &shape, &[0, 1], &mut labels, &[(shape.index(&[0, 1]), a)], &meter, &mut |l| {
            seen.push(l.to_vec());
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(seen.len(), 1);
        assert_eq!(seen[0][shape.index(&[1, 0])], s.atom_index("10").unwrap() as u32);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let s = CylAtomStructure::cartesian(2, 3).unwrap();
        let shape = Shape::new(2, 3);
        let mut labels = vec![NONE; shape.len()];
        let meter = Budget::nodes(3).meter();
        let r = complete(&s, &shape, &[0, 1, 2], &mut labels, &[], &meter, &mut |_| ControlFlow::Continue(()));
        assert_eq!(r, Err(Exhausted));
    }

    #[test]
    fn canonical_rename_roundtrip() {
        let s = CylAtomStructure::cartesian(2, 3).unwrap();
        let shape = Shape::new(2, 4);
        let mut labels = vec![NONE; shape.len()];
        let meter = Budget::unlimited().meter();
        let mut first = None;
        let _ = complete(&s, &shape, &[1, 3], &mut labels, &[], &meter, &mut |l| {
            first = Some(l.to_vec());
            ControlFlow::Break(())
        })
        .unwrap();
        let l = first.unwrap();
        let mask = 0b1010;
        let c = canonicalize(&shape, None, mask, &l, &[]);
        let ns = mask_nodes(mask);
        let map: BTreeMap<usize, usize> = c.renaming().iter().enumerate().map(|(i, &new)| (ns[i], new)).collect();
        let (m2, l2) = rename(&shape, mask, &l, &map);
        assert_eq!(m2, 0b11);
        let c2 = canonicalize(&shape, None, m2, &l2, &[]);
        assert_eq!(c.key, c2.key);
    }
}
