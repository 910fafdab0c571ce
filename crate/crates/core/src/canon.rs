//! Canonical forms of complete labelled hypergraphs under node renaming.
//!
//! A labelled hypergraph here is a node count `s` together with a label for
//! every tuple over `0..s` of each listed arity. Two of them are isomorphic
//! iff their canonical keys are equal.

/// A canonical relabelling: `order[new] = old`, and `key` lists the labels
/// of all tuples (arity by arity, tuples in lexicographic order) after
/// renaming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub order: Vec<usize>,
    pub key: Vec<u32>,
}

impl Canonical {
    /// `rename[old] = new`.
    pub fn renaming(&self) -> Vec<usize> {
        let mut r = vec![0; self.order.len()];
        for (new, &old) in self.order.iter().enumerate() {
            r[old] = new;
        }
        r
    }
}

fn for_each_tuple(s: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    if s == 0 {
        if arity == 0 {
            f(&[]);
        }
        return;
    }
    let mut t = vec![0; arity];
    loop {
        f(&t);
        let mut p = arity;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            t[p] += 1;
            if t[p] < s {
                break;
            }
            t[p] = 0;
        }
    }
}

/// A node's colour with its `(arity, position, label, tuple colours)` incidences.
type Signature = (usize, Vec<(usize, usize, u32, Vec<usize>)>);

/// Node colours after ordered-partition refinement. Colours are ranks of
/// isomorphism-invariant signatures, so equal inputs up to renaming get
/// equal colour multisets.
pub fn refine<F>(s: usize, arities: &[usize], label: &F) -> Vec<usize>
where
    F: Fn(&[usize]) -> u32,
{
    let mut colour = vec![0usize; s];
    let mut classes = if s == 0 { 0 } else { 1 };
    loop {
        let mut sigs: Vec<Signature> = (0..s).map(|x| (colour[x], Vec::new())).collect();
        for &arity in arities {
            for_each_tuple(s, arity, |t| {
                let l = label(t);
                let cols: Vec<usize> = t.iter().map(|&v| colour[v]).collect();
                for (pos, &v) in t.iter().enumerate() {
                    // a node may occur several times; record each position
                    sigs[v].1.push((arity, pos, l, cols.clone()));
                }
            });
        }
        for sig in &mut sigs {
            sig.1.sort_unstable();
        }
        let mut distinct: Vec<&Signature> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> =
            sigs.iter().map(|sig| distinct.binary_search(&sig).expect("signature present")).collect();
        let count = distinct.len();
        colour = next;
        if count == classes {
            return colour;
        }
        classes = count;
    }
}

fn key_for<F>(order: &[usize], arities: &[usize], label: &F) -> Vec<u32>
where
    F: Fn(&[usize]) -> u32,
{
    let s = order.len();
    let mut key = Vec::new();
    let mut mapped = Vec::new();
    for &arity in arities {
        for_each_tuple(s, arity, |t| {
            mapped.clear();
            mapped.extend(t.iter().map(|&v| order[v]));
            key.push(label(&mapped));
        });
    }
    key
}

/// Canonical form by refinement followed by the lexicographically least
/// key over all orderings compatible with the refined cells.
pub fn canonical_form<F>(s: usize, arities: &[usize], label: F) -> Canonical
where
    F: Fn(&[usize]) -> u32,
{
    let colour = refine(s, arities, &label);
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut nodes: Vec<usize> = (0..s).collect();
    nodes.sort_by_key(|&v| (colour[v], v));
    for v in nodes {
        match cells.last_mut() {
            Some(c) if colour[c[0]] == colour[v] => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut best: Option<Canonical> = None;
    let mut order = Vec::with_capacity(s);
    search(&mut cells, 0, &mut order, arities, &label, &mut best);
    best.unwrap_or(Canonical { order: Vec::new(), key: key_for(&[], arities, &label) })
}

fn search<F>(
    cells: &mut [Vec<usize>],
    cell: usize,
    order: &mut Vec<usize>,
    arities: &[usize],
    label: &F,
    best: &mut Option<Canonical>,
) where
    F: Fn(&[usize]) -> u32,
{
    if cell == cells.len() {
        let key = key_for(order, arities, label);
        if best.as_ref().is_none_or(|b| key < b.key) {
            *best = Some(Canonical { order: order.clone(), key });
        }
        return;
    }
    permute(cells, cell, 0, order, arities, label, best);
}

fn permute<F>(
    cells: &mut [Vec<usize>],
    cell: usize,
    at: usize,
    order: &mut Vec<usize>,
    arities: &[usize],
    label: &F,
    best: &mut Option<Canonical>,
) where
    F: Fn(&[usize]) -> u32,
{
    let len = cells[cell].len();
    if at == len {
        search(cells, cell + 1, order, arities, label, best);
        return;
    }
    for i in at..len {
        cells[cell].swap(at, i);
        order.push(cells[cell][at]);
        permute(cells, cell, at + 1, order, arities, label, best);
        order.pop();
        cells[cell].swap(at, i);
    }
}
