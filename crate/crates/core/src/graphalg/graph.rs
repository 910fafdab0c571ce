use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::{Error, Result};

/// A finite simple graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({} vertices, edges {:?})", self.vertex_count(), self.edges())
    }
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![BTreeSet::new(); n] }
    }

    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            return Err(Error::Structural(format!("edge {u}-{v} leaves the {n} vertices")));
        }
        if u == v {
            return Err(Error::Structural(format!("self-loop at {u}")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs three vertices");
        Self::from_edges(n, (0..n).map(|u| (u, (u + 1) % n))).expect("valid")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|u| (u - 1, u))).expect("valid")
    }

    /// The Mycielskian: vertices `v`, shadows `v'` and an apex; `v'` joins
    /// the neighbours of `v`, and the apex joins every shadow. Raises the
    /// chromatic number by one and keeps triangle-freeness.
    pub fn mycielskian(&self) -> Self {
        let n = self.vertex_count();
        let mut g = Graph::new(2 * n + 1);
        for (u, v) in self.edges() {
            g.add_edge(u, v).expect("valid");
            g.add_edge(n + u, v).expect("valid");
            g.add_edge(u, n + v).expect("valid");
        }
        for u in 0..n {
            g.add_edge(n + u, 2 * n).expect("valid");
        }
        g
    }

    /// The Mycielskian of the 5-cycle: 11 vertices, 20 edges.
    pub fn grotzsch() -> Self {
        Graph::cycle(5).mycielskian()
    }

    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let n = self.vertex_count();
        let mut g = Graph::new(n + other.vertex_count());
        for (u, v) in self.edges() {
            g.add_edge(u, v).expect("valid");
        }
        for (u, v) in other.edges() {
            g.add_edge(n + u, n + v).expect("valid");
        }
        g
    }

    /// Named graphs: `K<n>`, `C<n>`, `P<n>`, `E<n>` (edgeless),
    /// `<k>K<n>` (disjoint cliques), `grotzsch`.
    pub fn builtin(name: &str) -> Option<Graph> {
        if name.eq_ignore_ascii_case("grotzsch") {
            return Some(Graph::grotzsch());
        }
        let split = name.find(|c: char| c.is_ascii_alphabetic())?;
        let (copies, rest) = name.split_at(split);
        let copies: usize = if copies.is_empty() { 1 } else { copies.parse().ok()? };
        let mut chars = rest.chars();
        let kind = chars.next()?;
        let n: usize = chars.as_str().parse().ok()?;
        let one = match kind {
            'K' => Graph::complete(n),
            'C' if n >= 3 => Graph::cycle(n),
            'P' => Graph::path(n),
            'E' => Graph::new(n),
            _ => return None,
        };
        Some((1..copies).fold(one.clone(), |g, _| g.disjoint_union(&one)))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|a| a.contains(&v))
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, a) in self.adj.iter().enumerate() {
            out.extend(a.range(u + 1..).map(|&v| (u, v)));
        }
        out
    }

    /// Whether no two of `vertices` are adjacent.
    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(k, &u)| vertices[k + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }

    /// The subgraph induced on `keep`, relabelled `0..keep.len()` in order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::new(keep.len());
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b).expect("valid");
                }
            }
        }
        g
    }

    /// Adjacency as bitmasks; `None` above 64 vertices.
    pub fn masks(&self) -> Option<Vec<u64>> {
        (self.vertex_count() <= 64).then(|| self.adj.iter().map(|a| a.iter().fold(0u64, |m, &v| m | 1 << v)).collect())
    }
}

fn bfs(g: &Graph, root: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n = g.vertex_count();
    let mut dist = vec![None; n];
    let mut parent = vec![None; n];
    dist[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for v in g.neighbours(u) {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].expect("visited") + 1);
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    (dist, parent)
}

/// Length of a shortest cycle; `None` for forests.
pub fn girth(g: &Graph) -> Option<usize> {
    let mut best: Option<usize> = None;
    for root in 0..g.vertex_count() {
        let (dist, parent) = bfs(g, root);
        for (u, v) in g.edges() {
            if parent[u] == Some(v) || parent[v] == Some(u) {
                continue;
            }
            if let (Some(du), Some(dv)) = (dist[u], dist[v]) {
                let len = du + dv + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
    }
    best
}

/// A shortest odd cycle as a vertex sequence; `None` for bipartite graphs.
/// A shortest odd cycle has no chords.
pub fn shortest_odd_cycle(g: &Graph) -> Option<Vec<usize>> {
    let mut best: Option<(usize, usize, usize, usize)> = None;
    for root in 0..g.vertex_count() {
        let (dist, _) = bfs(g, root);
        for (u, v) in g.edges() {
            if let (Some(du), Some(dv)) = (dist[u], dist[v]) {
                if du == dv && best.is_none_or(|b| 2 * du + 1 < b.0) {
                    best = Some((2 * du + 1, root, u, v));
                }
            }
        }
    }
    let (_, root, u, v) = best?;
    // at a minimising root the two tree paths meet only at the root
    let (_, parent) = bfs(g, root);
    let climb = |mut x: usize| {
        let mut path = vec![x];
        while let Some(p) = parent[x] {
            path.push(p);
            x = p;
        }
        path
    };
    let mut cycle = climb(u);
    let mut back = climb(v);
    back.pop();
    back.reverse();
    cycle.extend(back);
    Some(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grotzsch_shape() {
        let g = Graph::grotzsch();
        assert_eq!((g.vertex_count(), g.edge_count()), (11, 20));
        assert_eq!(girth(&g), Some(4));
    }

    #[test]
    fn girth_examples() {
        assert_eq!(girth(&Graph::path(6)), None);
        assert_eq!(girth(&Graph::new(3)), None);
        assert_eq!(girth(&Graph::cycle(5)), Some(5));
        assert_eq!(girth(&Graph::complete(4)), Some(3));
        assert_eq!(girth(&Graph::cycle(4).disjoint_union(&Graph::cycle(7))), Some(4));
    }

    #[test]
    fn builtins() {
        assert_eq!(Graph::builtin("K4").unwrap(), Graph::complete(4));
        assert_eq!(Graph::builtin("2K2").unwrap().edges(), vec![(0, 1), (2, 3)]);
        assert_eq!(Graph::builtin("E1").unwrap().vertex_count(), 1);
        assert!(Graph::builtin("C2").is_none());
        assert!(Graph::builtin("Q3").is_none());
    }

    #[test]
    fn self_loops_rejected() {
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(1, 3)]).is_err());
    }

    #[test]
    fn odd_cycle_is_found() {
        let g = Graph::cycle(4).disjoint_union(&Graph::cycle(7));
        let c = shortest_odd_cycle(&g).unwrap();
        assert_eq!(c.len(), 7);
        for k in 0..c.len() {
            assert!(g.has_edge(c[k], c[(k + 1) % c.len()]));
        }
        assert!(shortest_odd_cycle(&Graph::cycle(6)).is_none());
    }

    // all cycles by brute force over vertex sequences
    fn brute_girth(g: &Graph) -> Option<usize> {
        fn extend(g: &Graph, path: &mut Vec<usize>, best: &mut Option<usize>) {
            let (first, last) = (path[0], *path.last().unwrap());
            if path.len() >= 3 && g.has_edge(last, first) {
                *best = Some(best.map_or(path.len(), |b| b.min(path.len())));
            }
            for v in g.neighbours(last).collect::<Vec<_>>() {
                if v > first && !path.contains(&v) {
                    path.push(v);
                    extend(g, path, best);
                    path.pop();
                }
            }
        }
        let mut best = None;
        for s in 0..g.vertex_count() {
            extend(g, &mut vec![s], &mut best);
        }
        best
    }

    proptest! {
        #[test]
        fn girth_matches_brute_force(edges in proptest::collection::vec((0usize..8, 0usize..8), 0..14)) {
            let g = Graph::from_edges(8, edges.into_iter().filter(|(u, v)| u != v)).unwrap();
            prop_assert_eq!(girth(&g), brute_girth(&g));
        }
    }
}
