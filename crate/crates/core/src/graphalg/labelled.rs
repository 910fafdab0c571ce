use std::collections::BTreeMap;

use super::graph::Graph;
use crate::{Error, Result};

/// An edge label: a vertex of the base graph (or the extra symbol `rho`,
/// as `None`) together with a colour.
pub type Label = (Option<usize>, usize);

/// A complete graph whose edges carry [`Label`]s over a base graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledGraph {
    pub base: Graph,
    pub nodes: usize,
    labels: BTreeMap<(usize, usize), Label>,
}

impl LabelledGraph {
    pub fn new(base: Graph, nodes: usize) -> Self {
        LabelledGraph { base, nodes, labels: BTreeMap::new() }
    }

    pub fn set(&mut self, x: usize, y: usize, label: Label) -> Result<()> {
        if x == y || x >= self.nodes || y >= self.nodes {
            return Err(Error::Structural(format!("no edge {x}-{y} among {} nodes", self.nodes)));
        }
        if label.0.is_some_and(|v| v >= self.base.vertex_count()) {
            return Err(Error::Structural(format!("label vertex {:?} outside the base graph", label.0)));
        }
        self.labels.insert((x.min(y), x.max(y)), label);
        Ok(())
    }

    pub fn get(&self, x: usize, y: usize) -> Option<Label> {
        self.labels.get(&(x.min(y), x.max(y))).copied()
    }
}

/// Whether `l` is in the class: every triangle of distinct nodes has two
/// colours, or only base vertices spanning an edge, or exactly one `rho`
/// with the other two vertices adjacent, or at least two `rho`s.
pub fn gg_member(l: &LabelledGraph, colours: usize) -> Result<bool> {
    for x in 0..l.nodes {
        for y in x + 1..l.nodes {
            match l.get(x, y) {
                None => return Err(Error::Structural(format!("edge {x}-{y} is unlabelled"))),
                Some((_, c)) if c >= colours => {
                    return Err(Error::Structural(format!("edge {x}-{y} has colour {c} of {colours}")))
                }
                _ => {}
            }
        }
    }
    let g = &l.base;
    for x in 0..l.nodes {
        for y in 0..l.nodes {
            for z in 0..l.nodes {
                if x == y || y == z || x == z {
                    continue;
                }
                let (a, i) = l.get(y, x).expect("checked");
                let (b, j) = l.get(y, z).expect("checked");
                let (c, k) = l.get(x, z).expect("checked");
                let edge = |p: usize, q: usize| g.has_edge(p, q);
                let ok = !(i == j && j == k)
                    || match (a, b, c) {
                        (Some(a), Some(b), Some(c)) => edge(a, b) || edge(b, c) || edge(a, c),
                        (None, Some(p), Some(q)) | (Some(p), None, Some(q)) | (Some(p), Some(q), None) => edge(p, q),
                        _ => true,
                    };
                if !ok {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
