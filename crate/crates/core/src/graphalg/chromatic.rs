use super::graph::Graph;
use crate::{Error, Result};

/// Largest graph [`chromatic_number`] accepts.
pub const CHROMATIC_CAP: usize = 40;

/// An optimal proper colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colouring {
    pub colours: usize,
    /// Colour of each vertex, in `0..colours`.
    pub assignment: Vec<usize>,
}

impl Colouring {
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.assignment.len() == g.vertex_count()
            && self.assignment.iter().all(|&c| c < self.colours)
            && g.edges().iter().all(|&(u, v)| self.assignment[u] != self.assignment[v])
    }
}

pub fn chromatic_number(g: &Graph) -> Result<Colouring> {
    chromatic_number_with(g, CHROMATIC_CAP)
}

/// Exact chromatic number by DSATUR branch and bound, with the clique
/// number as lower bound. Refuses graphs above `cap` vertices.
pub fn chromatic_number_with(g: &Graph, cap: usize) -> Result<Colouring> {
    let n = g.vertex_count();
    if n > cap.min(64) {
        return Err(Error::CapExceeded(format!("{n} vertices exceeds the colouring cap {}", cap.min(64))));
    }
    if n == 0 {
        return Ok(Colouring { colours: 0, assignment: Vec::new() });
    }
    let adj = g.masks().expect("at most 64 vertices");
    let mut search = Dsatur {
        adj: &adj,
        lower: clique_of(&adj).count_ones() as usize,
        colour: vec![usize::MAX; n],
        sat: vec![0; n],
        best: n + 1,
        best_assignment: Vec::new(),
    };
    search.run(0, 0);
    Ok(Colouring { colours: search.best, assignment: search.best_assignment })
}

struct Dsatur<'a> {
    adj: &'a [u64],
    lower: usize,
    colour: Vec<usize>,
    // bitmask of colours on coloured neighbours
    sat: Vec<u64>,
    best: usize,
    best_assignment: Vec<usize>,
}

impl Dsatur<'_> {
    fn run(&mut self, coloured: usize, used: usize) {
        let n = self.adj.len();
        if coloured == n {
            self.best = used;
            self.best_assignment = self.colour.clone();
            return;
        }
        let v = (0..n)
            .filter(|&v| self.colour[v] == usize::MAX)
            .max_by_key(|&v| (self.sat[v].count_ones(), self.adj[v].count_ones(), std::cmp::Reverse(v)))
            .expect("an uncoloured vertex remains");
        for c in 0..=used {
            if c + 1 >= self.best || self.best <= self.lower {
                break;
            }
            if self.sat[v] >> c & 1 == 1 {
                continue;
            }
            self.colour[v] = c;
            let saved: Vec<(usize, u64)> = bits(self.adj[v]).map(|u| (u, self.sat[u])).collect();
            for &(u, _) in &saved {
                self.sat[u] |= 1 << c;
            }
            self.run(coloured + 1, used.max(c + 1));
            for (u, s) in saved {
                self.sat[u] = s;
            }
            self.colour[v] = usize::MAX;
        }
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

/// Vertex mask of a maximum clique.
fn clique_of(adj: &[u64]) -> u64 {
    fn grow(adj: &[u64], current: u64, candidates: u64, best: &mut u64) {
        if candidates == 0 {
            if current.count_ones() > best.count_ones() {
                *best = current;
            }
            return;
        }
        if current.count_ones() + candidates.count_ones() <= best.count_ones() {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        grow(adj, current | 1 << v, candidates & adj[v], best);
        grow(adj, current, candidates & !(1 << v), best);
    }
    let mut best = 0;
    let all = if adj.len() == 64 { u64::MAX } else { (1u64 << adj.len()) - 1 };
    grow(adj, 0, all, &mut best);
    best
}

/// Size of a largest clique; refuses above 64 vertices.
pub fn clique_number(g: &Graph) -> Result<usize> {
    let adj = g.masks().ok_or_else(|| Error::CapExceeded(format!("{} vertices exceeds 64", g.vertex_count())))?;
    Ok(clique_of(&adj).count_ones() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // smallest k admitting a proper k-colouring, by trying every assignment
    fn brute_chromatic(g: &Graph) -> usize {
        let n = g.vertex_count();
        (0..=n)
            .find(|&k| {
                let total = (k as u64).pow(n as u32);
                (0..total).any(|mut code| {
                    let col: Vec<u64> = (0..n)
                        .map(|_| {
                            let c = code % k as u64;
                            code /= k as u64;
                            c
                        })
                        .collect();
                    g.edges().iter().all(|&(u, v)| col[u] != col[v])
                })
            })
            .unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(chromatic_number(&Graph::complete(4)).unwrap().colours, 4);
        assert_eq!(chromatic_number(&Graph::cycle(5)).unwrap().colours, brute_chromatic(&Graph::cycle(5)));
        assert_eq!(brute_chromatic(&Graph::cycle(5)), 3);
        assert_eq!(chromatic_number(&Graph::new(0)).unwrap().colours, 0);
        assert_eq!(chromatic_number(&Graph::new(3)).unwrap().colours, 1);
    }

    #[test]
    fn grotzsch_needs_four() {
        let g = Graph::grotzsch();
        let c = chromatic_number(&g).unwrap();
        assert_eq!(c.colours, 4);
        assert!(c.is_proper(&g));
        assert_eq!(clique_number(&g).unwrap(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(chromatic_number(&Graph::new(41)), Err(Error::CapExceeded(_))));
        assert!(chromatic_number_with(&Graph::new(41), 50).is_ok());
    }

    #[test]
    fn perfect_graphs_meet_the_clique_bound() {
        for g in [Graph::path(7), Graph::cycle(6), Graph::complete(6), Graph::builtin("3K3").unwrap()] {
            assert_eq!(chromatic_number(&g).unwrap().colours, clique_number(&g).unwrap());
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(edges in proptest::collection::vec((0usize..7, 0usize..7), 0..16)) {
            let g = Graph::from_edges(7, edges.into_iter().filter(|(u, v)| u != v)).unwrap();
            let c = chromatic_number(&g).unwrap();
            prop_assert!(c.is_proper(&g));
            prop_assert_eq!(c.colours, brute_chromatic(&g));
            prop_assert!(c.colours >= clique_number(&g).unwrap());
        }
    }
}
