use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::CylAtomStructure;
use crate::{Error, Result, ValidationReport};

/// The hyperlabel every short hyperedge of a neat hypernetwork carries.
pub const LAMBDA0: usize = 0;

/// A finite node set with an atom on each stored `arity`-tuple of nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Network {
    arity: usize,
    nodes: BTreeSet<usize>,
    labels: BTreeMap<Vec<usize>, usize>,
}

pub(crate) fn fmt_tuple(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Calls `f` on every tuple of length `arity` over `nodes`, in
/// lexicographic order.
pub(crate) fn for_each_tuple_over(nodes: &[usize], arity: usize, mut f: impl FnMut(&[usize])) {
    if nodes.is_empty() {
        if arity == 0 {
            f(&[]);
        }
        return;
    }
    let mut pos = vec![0usize; arity];
    let mut t: Vec<usize> = vec![nodes[0]; arity];
    loop {
        f(&t);
        let mut p = arity;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            pos[p] += 1;
            if pos[p] < nodes.len() {
                t[p] = nodes[pos[p]];
                break;
            }
            pos[p] = 0;
            t[p] = nodes[0];
        }
    }
}

impl Network {
    pub fn new(arity: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        Network { arity, nodes: nodes.into_iter().collect(), labels: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nodes(&self) -> &BTreeSet<usize> {
        &self.nodes
    }

    pub fn node_vec(&self) -> Vec<usize> {
        self.nodes.iter().copied().collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn label(&self, tuple: &[usize]) -> Option<usize> {
        self.labels.get(tuple).copied()
    }

    /// Labels `tuple`, adding its nodes to the node set.
    pub fn set(&mut self, tuple: Vec<usize>, atom: usize) -> Result<()> {
        if tuple.len() != self.arity {
            return Err(Error::InvalidParams(format!(
                "tuple {} has length {}, expected {}",
                fmt_tuple(&tuple),
                tuple.len(),
                self.arity
            )));
        }
        self.nodes.extend(tuple.iter().copied());
        self.labels.insert(tuple, atom);
        Ok(())
    }

    pub fn labels(&self) -> impl Iterator<Item = (&[usize], usize)> + '_ {
        self.labels.iter().map(|(t, &a)| (t.as_slice(), a))
    }

    /// Every tuple over the node set, labelled or not.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for_each_tuple_over(&self.node_vec(), self.arity, |t| out.push(t.to_vec()));
        out
    }

    pub fn is_complete(&self) -> bool {
        self.labels.len() == self.nodes.len().pow(self.arity as u32)
            && self.labels.keys().all(|t| t.iter().all(|x| self.nodes.contains(x)))
    }

    /// `N restricted to S`: nodes in `keep` and the tuples among them.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Network {
        Network {
            arity: self.arity,
            nodes: self.nodes.intersection(keep).copied().collect(),
            labels: self
                .labels
                .iter()
                .filter(|(t, _)| t.iter().all(|x| keep.contains(x)))
                .map(|(t, &a)| (t.clone(), a))
                .collect(),
        }
    }

    /// `self ≡_S other`: node sets differ only inside `s`, and the two agree
    /// on every tuple avoiding `s`.
    pub fn agrees_off(&self, other: &Network, s: &BTreeSet<usize>) -> bool {
        if self.nodes.symmetric_difference(&other.nodes).any(|x| !s.contains(x)) {
            return false;
        }
        let keep: BTreeSet<usize> = self.nodes.union(&other.nodes).filter(|x| !s.contains(x)).copied().collect();
        self.restrict(&keep) == other.restrict(&keep)
    }

    /// The pullback along `theta`: nodes `theta⁻¹(nodes)`, labels
    /// `(N theta)(x̄) = N(theta x̄)`.
    pub fn pullback(&self, theta: &BTreeMap<usize, usize>) -> Network {
        let dom: Vec<usize> = theta.iter().filter(|(_, y)| self.nodes.contains(y)).map(|(&x, _)| x).collect();
        let mut out = Network::new(self.arity, dom.iter().copied());
        for_each_tuple_over(&dom, self.arity, |t| {
            let image: Vec<usize> = t.iter().map(|x| theta[x]).collect();
            if let Some(a) = self.label(&image) {
                out.labels.insert(t.to_vec(), a);
            }
        });
        out
    }

    /// `(0,1)=3 (0,2)=5 …` over the stored labels.
    pub fn encode_labels(&self) -> String {
        let parts: Vec<String> = self.labels.iter().map(|(t, a)| format!("{}={a}", fmt_tuple(t))).collect();
        parts.join(" ")
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self.nodes.iter().map(|x| x.to_string()).collect();
        write!(f, "nodes={}", nodes.join(","))?;
        if !self.labels.is_empty() {
            write!(f, " {}", self.encode_labels())?;
        }
        Ok(())
    }
}

/// A network with hyperlabels on finite node sequences. Sequences without
/// a stored label carry [`LAMBDA0`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hypernetwork {
    pub network: Network,
    hyper: BTreeMap<Vec<usize>, usize>,
}

impl Hypernetwork {
    pub fn new(network: Network) -> Self {
        Hypernetwork { network, hyper: BTreeMap::new() }
    }

    pub fn nodes(&self) -> &BTreeSet<usize> {
        self.network.nodes()
    }

    pub fn hyperlabel(&self, seq: &[usize]) -> usize {
        self.hyper.get(seq).copied().unwrap_or(LAMBDA0)
    }

    pub fn set_hyperlabel(&mut self, seq: Vec<usize>, label: usize) {
        if label == LAMBDA0 {
            self.hyper.remove(&seq);
        } else {
            self.hyper.insert(seq, label);
        }
    }

    /// Stored sequences with a label other than [`LAMBDA0`].
    pub fn hyperlabels(&self) -> impl Iterator<Item = (&[usize], usize)> + '_ {
        self.hyper.iter().map(|(t, &l)| (t.as_slice(), l))
    }

    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Hypernetwork {
        Hypernetwork {
            network: self.network.restrict(keep),
            hyper: self
                .hyper
                .iter()
                .filter(|(t, _)| t.iter().all(|x| keep.contains(x)))
                .map(|(t, &l)| (t.clone(), l))
                .collect(),
        }
    }

    pub fn pullback(&self, theta: &BTreeMap<usize, usize>) -> Hypernetwork {
        let network = self.network.pullback(theta);
        let mut pre: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&x, &y) in theta {
            if self.network.nodes().contains(&y) {
                pre.entry(y).or_default().push(x);
            }
        }
        let mut hyper = BTreeMap::new();
        for (seq, &l) in &self.hyper {
            let choices: Vec<&Vec<usize>> = match seq.iter().map(|y| pre.get(y)).collect::<Option<_>>() {
                Some(c) => c,
                None => continue,
            };
            let mut idx = vec![0usize; seq.len()];
            'outer: loop {
                hyper.insert(idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect(), l);
                let mut p = seq.len();
                loop {
                    if p == 0 {
                        break 'outer;
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < choices[p].len() {
                        break;
                    }
                    idx[p] = 0;
                }
            }
        }
        Hypernetwork { network, hyper }
    }

    /// `x ~ y` iff some stored tuple starting `x, y` lies in `D[0][1]`.
    pub fn similar(&self, s: &CylAtomStructure, x: usize, y: usize) -> bool {
        self.network.labels().any(|(t, a)| t.len() >= 2 && t[0] == x && t[1] == y && s.diag_set(0, 1).contains(a))
    }
}

impl fmt::Display for Hypernetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.network)?;
        for (t, l) in &self.hyper {
            write!(f, " h{}={l}", fmt_tuple(t))?;
        }
        Ok(())
    }
}

/// Pullback along a partial map, for networks and hypernetworks alike.
pub trait ApplyMap: Sized {
    fn apply_map(&self, theta: &BTreeMap<usize, usize>) -> Self;
}

impl ApplyMap for Network {
    fn apply_map(&self, theta: &BTreeMap<usize, usize>) -> Self {
        self.pullback(theta)
    }
}

impl ApplyMap for Hypernetwork {
    fn apply_map(&self, theta: &BTreeMap<usize, usize>) -> Self {
        self.pullback(theta)
    }
}

/// `N theta`, the network with nodes `theta⁻¹(nodes(N))` and labels pulled
/// back along `theta`.
pub fn network_apply_map<N: ApplyMap>(n: &N, theta: &BTreeMap<usize, usize>) -> N {
    n.apply_map(theta)
}

/// Checks both atomic-network clauses over every tuple of `n`: a tuple with
/// equal coordinates `i`, `j` is labelled inside `D[i][j]`, and changing
/// coordinate `i` keeps the label in the same `≡_i` class.
pub fn is_atomic_network(s: &CylAtomStructure, n: &Network) -> Result<ValidationReport> {
    if n.arity() != s.dim() {
        return Err(Error::InvalidParams(format!("network arity {} does not match dimension {}", n.arity(), s.dim())));
    }
    let dim = s.dim();
    let nodes = n.node_vec();
    let mut missing = None;
    for_each_tuple_over(&nodes, dim, |t| {
        if missing.is_none() && n.label(t).is_none() {
            missing = Some(t.to_vec());
        }
    });
    if let Some(t) = missing {
        return Err(Error::Structural(format!("tuple {} is unlabelled", fmt_tuple(&t))));
    }
    if let Some((t, a)) = n.labels().find(|&(t, a)| a >= s.atom_count() || t.iter().any(|x| !n.nodes().contains(x))) {
        if a >= s.atom_count() {
            return Err(Error::Atom { atom: a, atoms: s.atom_count() });
        }
        return Err(Error::Structural(format!("tuple {} leaves the node set", fmt_tuple(t))));
    }
    let mut r = ValidationReport::new(format!("network {}", n.node_count()), "exhaustive");
    r.clause("diagonal");
    r.clause("cylindric");
    let mut u = vec![0usize; dim];
    for (t, a) in n.labels() {
        r.instances += 1;
        for i in 0..dim {
            for j in 0..dim {
                if t[i] == t[j] && !s.diag_set(i, j).contains(a) {
                    r.violate("diagonal", format!("N{} = {} not in d{i}{j}", fmt_tuple(t), s.atom_name(a)));
                }
            }
            u.copy_from_slice(t);
            for &d in &nodes {
                u[i] = d;
                let b = n.label(&u).expect("complete");
                if !s.equivalent(i, a, b) {
                    r.violate(
                        "cylindric",
                        format!(
                            "N{} = {} not below c{i} N{} = c{i} {}",
                            fmt_tuple(&u),
                            s.atom_name(b),
                            fmt_tuple(t),
                            s.atom_name(a)
                        ),
                    );
                }
            }
        }
    }
    Ok(r)
}

/// Network clauses plus the hyperlabel clauses: `x̄ ~ ȳ` forces equal
/// hyperlabels, and (when `neat`) every stored hyperedge of length at most
/// the dimension carries [`LAMBDA0`].
pub fn check_hypernetwork(s: &CylAtomStructure, h: &Hypernetwork, neat: bool) -> Result<ValidationReport> {
    let mut r = is_atomic_network(s, &h.network)?;
    r.clause("hyper-congruence");
    if neat {
        r.clause("neat");
    }
    let nodes = h.network.node_vec();
    let sim: BTreeMap<usize, Vec<usize>> =
        nodes.iter().map(|&x| (x, nodes.iter().copied().filter(|&y| h.similar(s, x, y)).collect())).collect();
    let mut lengths: BTreeSet<usize> = h.hyper.keys().map(|t| t.len()).collect();
    lengths.retain(|&l| l > 0);
    for (t, l) in &h.hyper {
        if t.iter().any(|x| !h.nodes().contains(x)) {
            return Err(Error::Structural(format!("hyperedge {} leaves the node set", fmt_tuple(t))));
        }
        if neat && t.len() <= s.dim() && *l != LAMBDA0 {
            r.violate("neat", format!("hyperedge {} carries {l}", fmt_tuple(t)));
        }
    }
    // every sequence similar to a stored one (or to an unstored one that is
    // similar to a stored one) must share its label
    for len in lengths {
        for_each_tuple_over(&nodes, len, |x| {
            let lx = h.hyperlabel(x);
            for i in 0..len {
                let mut y = x.to_vec();
                for &z in &sim[&x[i]] {
                    y[i] = z;
                    let ly = h.hyperlabel(&y);
                    if ly != lx {
                        r.violate(
                            "hyper-congruence",
                            format!("h{} = {lx} but h{} = {ly}", fmt_tuple(x), fmt_tuple(&y)),
                        );
                    }
                }
            }
        });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atom() -> CylAtomStructure {
        // cartesian(2, 1)'s single atom plus a second atom off the diagonal,
        // with ≡_0 and ≡_1 both trivial
        CylAtomStructure::from_fns(
            "toy",
            2,
            vec!["d".into(), "x".into()],
            |i, j, a| i == j || a == 0,
            |_, a, b| a == b,
            None::<fn(usize, usize, usize, usize) -> bool>,
        )
        .unwrap()
    }

    #[test]
    fn single_node_diagonal_network_is_atomic() {
        let s = CylAtomStructure::cartesian(3, 2).unwrap();
        let d = s.atom_index("000").unwrap();
        let mut n = Network::new(3, [0]);
        n.set(vec![0, 0, 0], d).unwrap();
        assert!(is_atomic_network(&s, &n).unwrap().is_valid());
    }

    #[test]
    fn relabelling_outside_class_is_caught() {
        let s = two_atom();
        let mut n = Network::new(2, [0, 1]);
        n.set(vec![0, 0], 0).unwrap();
        n.set(vec![1, 1], 0).unwrap();
        n.set(vec![0, 1], 1).unwrap();
        n.set(vec![1, 0], 1).unwrap();
        let r = is_atomic_network(&s, &n).unwrap();
        assert!(r.violated("cylindric"));
        assert!(!r.violated("diagonal"));
        assert!(r.violations.iter().any(|v| v.witness.contains("not below c")));
    }

    #[test]
    fn unlabelled_tuple_is_an_error() {
        let s = two_atom();
        let mut n = Network::new(2, [0, 1]);
        n.set(vec![0, 0], 0).unwrap();
        assert!(matches!(is_atomic_network(&s, &n), Err(Error::Structural(_))));
    }

    #[test]
    fn identity_map_is_identity() {
        let mut n = Network::new(2, [0, 1]);
        for (t, a) in [([0, 0], 0), ([0, 1], 1), ([1, 0], 2), ([1, 1], 0)] {
            n.set(t.to_vec(), a).unwrap();
        }
        let id: BTreeMap<usize, usize> = [(0, 0), (1, 1)].into();
        assert_eq!(network_apply_map(&n, &id), n);
    }

    #[test]
    fn node_swap_transposes() {
        let mut n = Network::new(2, [0, 1]);
        for (t, a) in [([0, 0], 0), ([0, 1], 1), ([1, 0], 2), ([1, 1], 3)] {
            n.set(t.to_vec(), a).unwrap();
        }
        let swap: BTreeMap<usize, usize> = [(0, 1), (1, 0)].into();
        let m = network_apply_map(&n, &swap);
        assert_eq!(m.label(&[0, 1]), n.label(&[1, 0]));
        assert_eq!(m.label(&[1, 0]), n.label(&[0, 1]));
        assert_eq!(m.label(&[0, 0]), n.label(&[1, 1]));
    }

    #[test]
    fn pullback_is_functorial() {
        let mut n = Network::new(2, [0, 1, 2]);
        let mut a = 0;
        for x in 0..3 {
            for y in 0..3 {
                n.set(vec![x, y], a).unwrap();
                a += 1;
            }
        }
        let mut h = Hypernetwork::new(n);
        h.set_hyperlabel(vec![0, 1, 2], 4);
        let f: BTreeMap<usize, usize> = [(5, 0), (6, 2), (7, 2)].into();
        let g: BTreeMap<usize, usize> = [(10, 5), (11, 7), (12, 6), (13, 9)].into();
        let fg: BTreeMap<usize, usize> = g.iter().filter_map(|(&x, y)| f.get(y).map(|&z| (x, z))).collect();
        assert_eq!(network_apply_map(&network_apply_map(&h, &f), &g), network_apply_map(&h, &fg));
        assert_eq!(network_apply_map(&h.network, &fg).nodes().len(), 3);
    }

    #[test]
    fn hyperlabels_pull_back() {
        let mut n = Network::new(1, [0, 1]);
        n.set(vec![0], 0).unwrap();
        n.set(vec![1], 0).unwrap();
        let mut h = Hypernetwork::new(n);
        h.set_hyperlabel(vec![0, 1], 2);
        let theta: BTreeMap<usize, usize> = [(3, 0), (4, 0), (5, 1)].into();
        let p = network_apply_map(&h, &theta);
        assert_eq!(p.hyperlabel(&[3, 5]), 2);
        assert_eq!(p.hyperlabel(&[4, 5]), 2);
        assert_eq!(p.hyperlabel(&[5, 3]), LAMBDA0);
    }

    #[test]
    fn neatness_and_congruence() {
        let s = CylAtomStructure::one_atom(2);
        let mut n = Network::new(2, [0, 1]);
        for t in n.tuples() {
            n.set(t, 0).unwrap();
        }
        let mut h = Hypernetwork::new(n);
        h.set_hyperlabel(vec![0, 1], 1);
        let r = check_hypernetwork(&s, &h, true).unwrap();
        assert!(r.violated("neat"));
        // every pair of nodes is similar in the one-atom structure
        assert!(r.violated("hyper-congruence"));
        let mut h = Hypernetwork::new(h.network.clone());
        for t in h.network.tuples() {
            let mut t3 = t.clone();
            t3.push(0);
            h.set_hyperlabel(t3, 1);
        }
        let r = check_hypernetwork(&s, &h, true).unwrap();
        assert!(r.violated("hyper-congruence"));
    }
}
