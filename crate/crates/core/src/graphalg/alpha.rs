use super::graph::Graph;
use crate::algebra::RelAtomStructure;
use crate::{AtomSet, Error, Result};

/// The relation atom structure on `{1'} ∪ V × colours`.
///
/// Atom `1 + v * colours + i` is vertex `v` with colour `i`; every atom is
/// self-converse. A triple is consistent iff one member is `1'` and the
/// other two are equal, or none is `1'` and the colours are not all equal,
/// or all colours agree and some two of the three vertices are adjacent.
pub fn alpha_of_graph(g: &Graph, colours: usize) -> Result<RelAtomStructure> {
    if colours < 2 {
        return Err(Error::InvalidParams(format!("{colours} colours; need at least 2")));
    }
    let v = g.vertex_count();
    let n = 1 + v * colours;
    let split = |a: usize| ((a - 1) / colours, (a - 1) % colours);
    let mut names = vec!["1'".to_string()];
    names.extend((1..n).map(|a| {
        let (x, i) = split(a);
        format!("v{x}c{i}")
    }));
    let mut triples = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let ok = match (a, b, c) {
                    (0, x, y) | (x, 0, y) | (x, y, 0) => x == y,
                    _ => {
                        let ((x, i), (y, j), (z, l)) = (split(a), split(b), split(c));
                        !(i == j && j == l) || g.has_edge(x, y) || g.has_edge(y, z) || g.has_edge(x, z)
                    }
                };
                if ok {
                    triples.push((a, b, c));
                }
            }
        }
    }
    RelAtomStructure::from_triples(
        format!("alpha-{colours}"),
        names,
        AtomSet::singleton(n, 0),
        (0..n).collect(),
        triples,
    )
}
