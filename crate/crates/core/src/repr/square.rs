use std::fmt;

use crate::algebra::RelAtomStructure;
use crate::budget::Meter;
use crate::{Budget, Error, Parallelism, Result, ValidationReport};

const NONE: usize = usize::MAX;

/// A labelling of `base × base` by atoms: pair `(i, j)` lies in the image
/// of exactly one atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareRep {
    pub base: usize,
    pub labels: Vec<Vec<usize>>,
}

impl SquareRep {
    /// The pairs labelled by each atom.
    pub fn images(&self, atoms: usize) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); atoms];
        for i in 0..self.base {
            for j in 0..self.base {
                out[self.labels[i][j]].push((i, j));
            }
        }
        out
    }

    /// One `atom <name>: (i,j) …` line per atom.
    pub fn to_text(&self, s: &RelAtomStructure) -> String {
        let mut out = String::new();
        for (a, pairs) in self.images(s.atom_count()).iter().enumerate() {
            out.push_str(&format!("atom {}:", s.atom_name(a)));
            for (i, j) in pairs {
                out.push_str(&format!(" ({i},{j})"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquareSearch {
    Found(SquareRep),
    /// No representation on any base up to `max_base`.
    Exhausted {
        max_base: usize,
        nodes: u64,
    },
    /// The budget ran out while searching `base`.
    Inconclusive {
        base: usize,
        nodes: u64,
        budget: String,
    },
}

impl fmt::Display for SquareSearch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquareSearch::Found(r) => write!(f, "found base={}", r.base),
            SquareSearch::Exhausted { max_base, nodes } => write!(f, "exhausted max_base={max_base} nodes={nodes}"),
            SquareSearch::Inconclusive { base, nodes, budget } => {
                write!(f, "inconclusive at base={base} nodes={nodes} budget {budget}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SquareConfig {
    pub budget: Budget,
    pub parallelism: Parallelism,
}

impl Default for SquareConfig {
    fn default() -> Self {
        SquareConfig { budget: Budget::unlimited().with_env(), parallelism: Parallelism::default() }
    }
}

struct Search<'a> {
    s: &'a RelAtomStructure,
    base: usize,
    /// `(a, b)` with `c ≤ a;b`, per atom `c`.
    witnesses: Vec<Vec<(usize, usize)>>,
    identity: Vec<usize>,
    diversity: Vec<usize>,
    /// Cells in assignment order: row `x` is `(x,x), (x,x+1), …`.
    cells: Vec<(usize, usize)>,
    /// Index into `cells` after which row `x` is complete.
    row_end: Vec<usize>,
    meter: &'a Meter,
}

struct Exhausted;

impl Search<'_> {
    fn candidates(&self, cell: usize) -> &[usize] {
        let (x, y) = self.cells[cell];
        if x == y {
            &self.identity
        } else if (x, y) == (0, 1) {
            // some pair carries the first diversity atom; rename it to (0,1)
            &self.diversity[..self.diversity.len().min(1)]
        } else {
            &self.diversity
        }
    }

    fn fits(&self, l: &[usize], x: usize, y: usize) -> bool {
        let b = self.base;
        let at = |u: usize, v: usize| l[u * b + v];
        let c = at(x, y);
        (0..b).all(|z| {
            let (xz, zy, yz, zx) = (at(x, z), at(z, y), at(y, z), at(z, x));
            (xz == NONE || zy == NONE || self.s.comp(xz, zy).contains(c))
                && (yz == NONE || xz == NONE || self.s.comp(c, yz).contains(xz))
                && (zx == NONE || zy == NONE || self.s.comp(zx, c).contains(zy))
        })
    }

    fn witnessed(&self, l: &[usize], u: usize, v: usize) -> bool {
        let b = self.base;
        self.witnesses[l[u * b + v]].iter().all(|&(a, c)| (0..b).any(|z| l[u * b + z] == a && l[z * b + v] == c))
    }

    fn assign(&self, l: &mut [usize], cell: usize, atom: usize) -> bool {
        let (x, y) = self.cells[cell];
        let b = self.base;
        l[x * b + y] = atom;
        l[y * b + x] = self.s.converse(atom);
        if !self.fits(l, x, y) {
            return false;
        }
        if self.row_end[x] == cell {
            // rows 0..=x are complete
            return (0..=x).all(|u| self.witnessed(l, u, x) && self.witnessed(l, x, u));
        }
        true
    }

    fn clear(&self, l: &mut [usize], cell: usize) {
        let (x, y) = self.cells[cell];
        l[x * self.base + y] = NONE;
        l[y * self.base + x] = NONE;
    }

    fn dfs(&self, l: &mut Vec<usize>, cell: usize) -> std::result::Result<bool, Exhausted> {
        if cell == self.cells.len() {
            return Ok(true);
        }
        if !self.meter.tick() {
            return Err(Exhausted);
        }
        for &a in self.candidates(cell) {
            if self.assign(l, cell, a) && self.dfs(l, cell + 1)? {
                return Ok(true);
            }
            self.clear(l, cell);
        }
        Ok(false)
    }

    /// Consistent assignments of the first `depth` cells, in branch order.
    fn prefixes(&self, depth: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut l = vec![NONE; self.base * self.base];
        self.collect(&mut l, 0, depth, &mut out);
        out
    }

    fn collect(&self, l: &mut Vec<usize>, cell: usize, depth: usize, out: &mut Vec<Vec<usize>>) {
        if cell == depth {
            out.push(l.clone());
            return;
        }
        for &a in self.candidates(cell) {
            if self.assign(l, cell, a) {
                self.collect(l, cell + 1, depth, out);
            }
            self.clear(l, cell);
        }
    }
}

fn search_base(
    s: &RelAtomStructure,
    base: usize,
    cfg: &SquareConfig,
    meter: &Meter,
) -> std::result::Result<Option<SquareRep>, Exhausted> {
    let n = s.atom_count();
    let mut witnesses = vec![Vec::new(); n];
    for a in 0..n {
        for b in 0..n {
            for c in s.comp(a, b).iter() {
                witnesses[c].push((a, b));
            }
        }
    }
    let mut cells = Vec::new();
    let mut row_end = Vec::new();
    for x in 0..base {
        for y in x..base {
            cells.push((x, y));
        }
        row_end.push(cells.len() - 1);
    }
    let search = Search {
        s,
        base,
        witnesses,
        identity: s.identity().iter().collect(),
        diversity: (0..n).filter(|&a| !s.is_identity(a)).collect(),
        cells,
        row_end,
        meter,
    };
    let depth = search.cells.len().min(4);
    let prefixes = search.prefixes(depth);
    let found = cfg.parallelism.find_map_first(prefixes.len(), |i| {
        let mut l = prefixes[i].clone();
        match search.dfs(&mut l, depth) {
            Ok(true) => Some(Ok(l)),
            Ok(false) => None,
            Err(Exhausted) => Some(Err(Exhausted)),
        }
    });
    match found {
        Some(Ok(l)) => Ok(Some(SquareRep { base, labels: l.chunks(base).map(|r| r.to_vec()).collect() })),
        Some(Err(e)) => Err(e),
        None if search.meter.exhausted() => Err(Exhausted),
        None => Ok(None),
    }
}

/// Searches bases `1..=max_base` in turn for a square representation:
/// identity atoms on the diagonal, converse on transposed pairs, every
/// triangle consistent, and every pair labelled `c` witnessed through some
/// `z` for each `(a, b)` with `c ≤ a;b`.
pub fn find_square_rep(s: &RelAtomStructure, max_base: usize) -> Result<SquareSearch> {
    find_square_rep_with(s, max_base, &SquareConfig::default())
}

pub fn find_square_rep_with(s: &RelAtomStructure, max_base: usize, cfg: &SquareConfig) -> Result<SquareSearch> {
    if s.rule().is_some() {
        return Err(Error::UnsupportedSymbolic(format!(
            "{} is rule-backed; square representations need an explicit structure",
            s.name()
        )));
    }
    if s.identity().is_empty() {
        return Err(Error::Structural("no identity atom".into()));
    }
    let meter = cfg.budget.meter();
    let mut total = 0;
    for base in 1..=max_base {
        match search_base(s, base, cfg, &meter) {
            Ok(Some(rep)) => return Ok(SquareSearch::Found(rep)),
            Ok(None) => {}
            Err(Exhausted) => {
                return Ok(SquareSearch::Inconclusive { base, nodes: meter.used(), budget: cfg.budget.describe() })
            }
        }
        total = meter.used();
    }
    Ok(SquareSearch::Exhausted { max_base, nodes: total })
}

/// Independent check of a square representation: identity exactly on the
/// diagonal, converse on transposed pairs, `(x,y) ∈ h(a), (y,z) ∈ h(b)`
/// implies `(x,z) ∈ h(c)` with `c ≤ a;b`, and every needed witness exists.
pub fn verify_square_rep(s: &RelAtomStructure, rep: &SquareRep) -> ValidationReport {
    let b = rep.base;
    let mut r = ValidationReport::new(format!("square representation of {} on {b} points", s.name()), "exhaustive");
    for c in ["partition", "identity", "converse", "composition", "witness"] {
        r.clause(c);
    }
    if rep.labels.len() != b || rep.labels.iter().any(|row| row.len() != b || row.iter().any(|&a| a >= s.atom_count()))
    {
        r.violate("partition", "labels do not assign one atom to every pair");
        return r;
    }
    let l = &rep.labels;
    for x in 0..b {
        for y in 0..b {
            if s.is_identity(l[x][y]) != (x == y) {
                r.violate("identity", format!("({x},{y}) labelled {}", s.atom_name(l[x][y])));
            }
            if l[y][x] != s.converse(l[x][y]) {
                r.violate("converse", format!("({x},{y}) and ({y},{x})"));
            }
            for z in 0..b {
                r.instances += 1;
                if !s.comp(l[x][y], l[y][z]).contains(l[x][z]) {
                    r.violate(
                        "composition",
                        format!(
                            "({x},{y})={} ({y},{z})={} but ({x},{z})={}",
                            s.atom_name(l[x][y]),
                            s.atom_name(l[y][z]),
                            s.atom_name(l[x][z])
                        ),
                    );
                }
            }
            for a in 0..s.atom_count() {
                for c in 0..s.atom_count() {
                    if s.comp(a, c).contains(l[x][y]) && !(0..b).any(|z| l[x][z] == a && l[z][y] == c) {
                        r.violate(
                            "witness",
                            format!(
                                "({x},{y})={} has no point z with {} then {}",
                                s.atom_name(l[x][y]),
                                s.atom_name(a),
                                s.atom_name(c)
                            ),
                        );
                    }
                }
            }
        }
    }
    r
}
