use std::fmt;

use crate::budget::Meter;
use crate::{Budget, Error, Parallelism, Result};

pub const MAX_RAMSEY_COLOURS: usize = 3;
pub const MAX_RAMSEY_CLIQUE: usize = 17;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RamseyOutcome {
    /// Every colouring has a monochromatic triangle.
    Forced {
        nodes: u64,
    },
    /// A colouring without one; `colouring[i][j]` is the colour of `ij`.
    Avoidable(Vec<Vec<u8>>),
    Inconclusive {
        nodes: u64,
        budget: String,
    },
}

impl RamseyOutcome {
    pub fn forced(&self) -> Option<bool> {
        match self {
            RamseyOutcome::Forced { .. } => Some(true),
            RamseyOutcome::Avoidable(_) => Some(false),
            RamseyOutcome::Inconclusive { .. } => None,
        }
    }
}

impl fmt::Display for RamseyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RamseyOutcome::Forced { nodes } => write!(f, "true (nodes={nodes})"),
            RamseyOutcome::Avoidable(c) => {
                write!(f, "false; avoiding colouring:")?;
                for (i, row) in c.iter().enumerate() {
                    for (j, x) in row.iter().enumerate().skip(i + 1) {
                        write!(f, " {i}-{j}:{x}")?;
                    }
                }
                Ok(())
            }
            RamseyOutcome::Inconclusive { nodes, budget } => write!(f, "inconclusive (nodes={nodes}, budget {budget})"),
        }
    }
}

struct Search<'a> {
    colours: u8,
    t: usize,
    /// Edges in order `(0,1), (0,2), (1,2), (0,3), …`: edge `(i, j)` closes
    /// every triangle `(k, i, j)` with `k < i`.
    edges: Vec<(usize, usize)>,
    /// Edges of one colour at a vertex span a neighbourhood that the other
    /// colours must keep triangle-free, so it is smaller than the clique
    /// forcing a triangle with one colour fewer.
    max_degree: usize,
    meter: &'a Meter,
}

struct Exhausted;

impl Search<'_> {
    fn ok(&self, m: &[u8], e: usize) -> bool {
        let (i, j) = self.edges[e];
        let t = self.t;
        let c = m[i * t + j];
        if (0..i).any(|k| m[k * t + i] == c && m[k * t + j] == c) {
            return false;
        }
        // edges at i below j and at j before i are the assigned ones
        let at_i = (0..j).filter(|&x| x != i && m[i * t + x] == c).count() + 1;
        let at_j = (0..i).filter(|&a| m[a * t + j] == c).count() + 1;
        at_i <= self.max_degree && at_j <= self.max_degree
    }

    /// Colours are interchangeable until used: a branch may open at most
    /// one new colour.
    fn choices(&self, used: u8) -> u8 {
        (used + 1).min(self.colours)
    }

    fn set(&self, m: &mut [u8], e: usize, c: u8) {
        let (i, j) = self.edges[e];
        m[i * self.t + j] = c;
        m[j * self.t + i] = c;
    }

    fn dfs(&self, m: &mut Vec<u8>, e: usize, used: u8) -> std::result::Result<bool, Exhausted> {
        if e == self.edges.len() {
            return Ok(true);
        }
        if !self.meter.tick() {
            return Err(Exhausted);
        }
        for c in 0..self.choices(used) {
            self.set(m, e, c);
            if self.ok(m, e) && self.dfs(m, e + 1, used.max(c + 1))? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn prefixes(&self, depth: usize) -> Vec<(Vec<u8>, u8)> {
        let mut out = vec![(vec![0; self.t * self.t], 0)];
        for e in 0..depth {
            let mut next = Vec::new();
            for (m, used) in out {
                for c in 0..self.choices(used) {
                    let mut m = m.clone();
                    self.set(&mut m, e, c);
                    if self.ok(&m, e) {
                        next.push((m, used.max(c + 1)));
                    }
                }
            }
            out = next;
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RamseyConfig {
    pub budget: Budget,
    pub parallelism: Parallelism,
}

impl Default for RamseyConfig {
    fn default() -> Self {
        RamseyConfig { budget: Budget::unlimited().with_env(), parallelism: Parallelism::default() }
    }
}

/// Whether every `colours`-colouring of the edges of `K_clique` contains a
/// monochromatic triangle.
pub fn ramsey_check(colours: usize, clique: usize) -> Result<RamseyOutcome> {
    ramsey_check_with(colours, clique, &RamseyConfig::default())
}

pub fn ramsey_check_with(colours: usize, clique: usize, cfg: &RamseyConfig) -> Result<RamseyOutcome> {
    if colours == 0 {
        return Err(Error::InvalidParams("at least one colour is needed".into()));
    }
    if colours > MAX_RAMSEY_COLOURS || clique > MAX_RAMSEY_CLIQUE {
        return Err(Error::Precondition(format!(
            "colours ≤ {MAX_RAMSEY_COLOURS} and clique ≤ {MAX_RAMSEY_CLIQUE} required, got {colours} and {clique}"
        )));
    }
    let mut edges = Vec::new();
    for j in 0..clique {
        for i in 0..j {
            edges.push((i, j));
        }
    }
    let max_degree = if colours == 1 {
        1
    } else {
        // the smaller case decides itself in a handful of nodes
        let sub = RamseyConfig { budget: Budget::unlimited(), parallelism: Parallelism::Sequential };
        let mut t = 0;
        while ramsey_check_with(colours - 1, t, &sub)?.forced() != Some(true) {
            t += 1;
        }
        t - 1
    };
    let meter = cfg.budget.meter();
    let search = Search { colours: colours as u8, t: clique, edges, max_degree, meter: &meter };
    let depth = search.edges.len().min(6);
    let prefixes = search.prefixes(depth);
    let found = cfg.parallelism.find_map_first(prefixes.len(), |k| {
        let (mut m, used) = prefixes[k].clone();
        match search.dfs(&mut m, depth, used) {
            Ok(true) => Some(Ok(m)),
            Ok(false) => None,
            Err(Exhausted) => Some(Err(Exhausted)),
        }
    });
    Ok(match found {
        Some(Ok(mut m)) => {
            for i in 0..clique {
                m[i * clique + i] = 0;
            }
            RamseyOutcome::Avoidable(m.chunks(clique.max(1)).map(|r| r.to_vec()).take(clique).collect())
        }
        Some(Err(Exhausted)) => RamseyOutcome::Inconclusive { nodes: meter.used(), budget: cfg.budget.describe() },
        None if meter.exhausted() => RamseyOutcome::Inconclusive { nodes: meter.used(), budget: cfg.budget.describe() },
        None => RamseyOutcome::Forced { nodes: meter.used() },
    })
}
