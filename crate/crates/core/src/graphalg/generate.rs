use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chromatic::chromatic_number;
use super::graph::{girth, shortest_odd_cycle, Graph};
use crate::{Error, Result};

/// `G(v, p)` drawn from a ChaCha stream seeded with `seed`.
pub fn random_graph(v: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(v);
    for a in 0..v {
        for b in a + 1..v {
            if rng.gen_bool(p) {
                g.add_edge(a, b)?;
            }
        }
    }
    Ok(g)
}

/// Vertices `0..width`, with `i` and `l` adjacent iff `0 < |i - l| < reach`.
pub fn distance_graph(width: usize, reach: usize) -> Graph {
    Graph::from_edges(
        width,
        (0..width).flat_map(|i| (i + 1..width).filter(move |l| l - i < reach).map(move |l| (i, l))),
    )
    .expect("valid")
}

/// `copies` disjoint copies of the complete graph on `size` vertices.
pub fn cliques_graph(size: usize, copies: usize) -> Graph {
    (0..copies).fold(Graph::new(0), |g, _| g.disjoint_union(&Graph::complete(size)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErdosConfig {
    pub vertices: usize,
    pub edge_prob: f64,
}

impl Default for ErdosConfig {
    fn default() -> Self {
        ErdosConfig { vertices: 16, edge_prob: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErdosOutcome {
    Found { graph: Graph, chromatic: usize, girth: usize, trial: usize },
    Exhausted { trials: usize },
}

pub fn erdos_search(k: usize, trials: usize, seed: u64) -> Result<ErdosOutcome> {
    erdos_search_with(k, trials, seed, ErdosConfig::default())
}

/// Searches for a graph with chromatic number and girth both above `k`.
///
/// Each trial samples `G(v, p)` and deletes every vertex on a cycle of
/// length at most `k`. Candidates are the shortest odd cycle of what is
/// left, lifted by `k - 2` Mycielski steps, then the pruned sample itself.
/// The first candidate whose exact chromatic number and girth clear `k` is
/// returned.
pub fn erdos_search_with(k: usize, trials: usize, seed: u64, cfg: ErdosConfig) -> Result<ErdosOutcome> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("k = {k}; need at least 2")));
    }
    for trial in 0..trials {
        let sample = random_graph(cfg.vertices, cfg.edge_prob, seed.wrapping_add(trial as u64))?;
        let pruned = drop_short_cycles(&sample, k);
        let mut candidates = Vec::new();
        if let Some(cycle) = shortest_odd_cycle(&pruned) {
            candidates.push((2..k).fold(pruned.induced(&cycle), |g, _| g.mycielskian()));
        }
        candidates.push(pruned);
        for g in candidates {
            if g.vertex_count() > super::CHROMATIC_CAP {
                continue;
            }
            let Some(gi) = girth(&g) else { continue };
            if gi <= k {
                continue;
            }
            let chi = chromatic_number(&g)?.colours;
            if chi > k {
                return Ok(ErdosOutcome::Found { graph: g, chromatic: chi, girth: gi, trial });
            }
        }
    }
    Ok(ErdosOutcome::Exhausted { trials })
}

/// Removes every vertex lying on a cycle of length at most `k`.
fn drop_short_cycles(g: &Graph, k: usize) -> Graph {
    let n = g.vertex_count();
    let mut bad = vec![false; n];
    fn walk(g: &Graph, path: &mut Vec<usize>, k: usize, bad: &mut [bool]) {
        let (first, last) = (path[0], *path.last().expect("non-empty"));
        if path.len() >= 3 && g.has_edge(last, first) {
            for &v in path.iter() {
                bad[v] = true;
            }
        }
        if path.len() == k {
            return;
        }
        for v in g.neighbours(last).collect::<Vec<_>>() {
            if v > first && !path.contains(&v) {
                path.push(v);
                walk(g, path, k, bad);
                path.pop();
            }
        }
    }
    for s in 0..n {
        walk(g, &mut vec![s], k, &mut bad);
    }
    let keep: Vec<usize> = (0..n).filter(|&v| !bad[v]).collect();
    g.induced(&keep)
}
