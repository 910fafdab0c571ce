//! The bounded game `H_{m,n}` over neat hypernetworks.
//!
//! Node names are drawn from `0..node_budget`. Hyperlabels are tracked on
//! sequences of length `n + 1` only: shorter hyperedges are neat and carry
//! the neutral label, longer ones carry it too. With a single hyperlabel
//! the hyperlabelling is trivial and is not stored.
//!
//! Amalgamation moves pair two earlier networks, so a position is the whole
//! set of networks played so far.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;

use crate::algebra::{validate_cyl_structure, CylAtomStructure};
use crate::budget::Meter;
use crate::{Budget, Error, Result};

use super::engine::{complete, from_network, mask_nodes, to_hypernetwork, Exhausted, Shape, NONE};
use super::fgame::{GameConfig, NODE_CAP};
use super::network::{for_each_tuple_over, Hypernetwork};
use super::result::{
    CertEdge, CertPosition, CertResponse, Certificate, GameKind, GameResult, Move, Opening, Outcome, Player,
};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct HNet {
    mask: u64,
    labels: Vec<u32>,
    hyper: Vec<u32>,
}

type History = Vec<HNet>;

#[derive(Debug, Clone)]
enum HMove {
    Cyl { net: usize, index: usize, face: Vec<usize>, node: usize, atom: u32, target: usize },
    Map { net: usize, theta: BTreeMap<usize, usize> },
    Amalg { left: usize, right: usize },
}

pub(crate) struct HSolver<'a> {
    s: &'a CylAtomStructure,
    shape: Shape,
    hshape: Option<Shape>,
    names: usize,
    hyperlabels: usize,
    memo: Option<DashMap<(History, usize), bool>>,
    meter: Meter,
    unanswerable: AtomicU64,
}

fn insert(history: &History, net: HNet) -> History {
    let mut h = history.clone();
    if let Err(at) = h.binary_search(&net) {
        h.insert(at, net);
    }
    h
}

/// Partial surjections from subsets of `0..names` onto `targets`.
fn surjections(names: usize, targets: &[usize]) -> Vec<BTreeMap<usize, usize>> {
    let mut out = Vec::new();
    // each name maps to a target or is left out
    let choices = targets.len() + 1;
    let total = choices.pow(names as u32);
    for code in 0..total {
        let mut c = code;
        let mut map = BTreeMap::new();
        for x in 0..names {
            let pick = c % choices;
            c /= choices;
            if pick < targets.len() {
                map.insert(x, targets[pick]);
            }
        }
        let hit: BTreeSet<usize> = map.values().copied().collect();
        if hit.len() == targets.len() {
            out.push(map);
        }
    }
    out
}

impl<'a> HSolver<'a> {
    pub(crate) fn new(s: &'a CylAtomStructure, names: usize, hyperlabels: usize, budget: &Budget, memo: bool) -> Self {
        HSolver {
            s,
            shape: Shape::new(s.dim(), names),
            hshape: (hyperlabels > 1).then(|| Shape::new(s.dim() + 1, names)),
            names,
            hyperlabels,
            memo: memo.then(DashMap::new),
            meter: budget.meter(),
            unanswerable: AtomicU64::new(0),
        }
    }

    fn sparse(&self, n: &HNet) -> Hypernetwork {
        to_hypernetwork(&self.shape, self.hshape.as_ref(), n.mask, &n.labels, &n.hyper)
    }

    fn dense(&self, h: &Hypernetwork) -> Option<HNet> {
        let (mask, labels) = from_network(&self.shape, &h.network)?;
        let hyper = match &self.hshape {
            None => {
                if h.hyperlabels().next().is_some() {
                    return None;
                }
                Vec::new()
            }
            Some(hs) => {
                let mut v = vec![NONE; hs.len()];
                for idx in hs.tuples_over(&mask_nodes(mask)) {
                    v[idx] = crate::games::LAMBDA0 as u32;
                }
                for (t, l) in h.hyperlabels() {
                    if t.len() != hs.arity || t.iter().any(|x| mask >> x & 1 == 0) || l >= self.hyperlabels {
                        return None;
                    }
                    v[hs.index(t)] = l as u32;
                }
                v
            }
        };
        Some(HNet { mask, labels, hyper })
    }

    fn restrict_equal(&self, a: &HNet, b: &HNet, common: u64) -> bool {
        let nodes = mask_nodes(common);
        let same = |x: &[u32], y: &[u32], shape: &Shape| shape.tuples_over(&nodes).iter().all(|&i| x[i] == y[i]);
        same(&a.labels, &b.labels, &self.shape) && self.hshape.as_ref().is_none_or(|hs| same(&a.hyper, &b.hyper, hs))
    }

    fn moves(&self, history: &History) -> Vec<HMove> {
        let dim = self.shape.arity;
        let mut out = Vec::new();
        for (i, n) in history.iter().enumerate() {
            let nodes = mask_nodes(n.mask);
            let mut t = vec![0usize; dim];
            for index in 0..dim {
                for_each_tuple_over(&nodes, dim - 1, |face| {
                    t[..index].copy_from_slice(&face[..index]);
                    t[index + 1..].copy_from_slice(&face[index..]);
                    t[index] = nodes[0];
                    let class = self.s.equiv_row(index, n.labels[self.shape.index(&t)] as usize);
                    for node in (0..self.names).filter(|k| n.mask >> k & 1 == 0) {
                        t[index] = node;
                        let target = self.shape.index(&t);
                        for b in class.iter() {
                            out.push(HMove::Cyl { net: i, index, face: face.to_vec(), node, atom: b as u32, target });
                        }
                    }
                });
            }
        }
        for (i, n) in history.iter().enumerate() {
            for theta in surjections(self.names, &mask_nodes(n.mask)) {
                out.push(HMove::Map { net: i, theta });
            }
        }
        for (i, a) in history.iter().enumerate() {
            for (j, b) in history.iter().enumerate().skip(i + 1) {
                let common = a.mask & b.mask;
                if common != 0 && self.restrict_equal(a, b, common) {
                    out.push(HMove::Amalg { left: i, right: j });
                }
            }
        }
        out
    }

    fn pullback(&self, n: &HNet, theta: &BTreeMap<usize, usize>) -> HNet {
        let dom: Vec<usize> = theta.keys().copied().collect();
        let mask = dom.iter().fold(0u64, |m, &x| m | 1 << x);
        let pull = |shape: &Shape, src: &[u32]| {
            let mut out = vec![NONE; shape.len()];
            let mut t = vec![0usize; shape.arity];
            for idx in shape.tuples_over(&dom) {
                shape.decode(idx, &mut t);
                for v in t.iter_mut() {
                    *v = theta[v];
                }
                out[idx] = src[shape.index(&t)];
            }
            out
        };
        HNet {
            mask,
            labels: pull(&self.shape, &n.labels),
            hyper: self.hshape.as_ref().map_or_else(Vec::new, |hs| pull(hs, &n.hyper)),
        }
    }

    /// Completes the hyperlabels of a fully labelled network: `fixed` holds
    /// the labels that must be kept (others [`NONE`]).
    fn hyper_completions<V>(&self, mask: u64, labels: &[u32], fixed: &[u32], visit: &mut V) -> ControlFlow<()>
    where
        V: FnMut(HNet) -> ControlFlow<()>,
    {
        let Some(hs) = &self.hshape else {
            return visit(HNet { mask, labels: labels.to_vec(), hyper: Vec::new() });
        };
        let nodes = mask_nodes(mask);
        let d01 = self.s.diag_set(0, 1);
        let mut sim: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut t = vec![0usize; self.shape.arity];
        for idx in self.shape.tuples_over(&nodes) {
            if d01.contains(labels[idx] as usize) {
                self.shape.decode(idx, &mut t);
                sim.entry(t[0]).or_default().push(t[1]);
            }
        }
        let seqs = hs.tuples_over(&nodes);
        let slot: HashMap<usize, usize> = seqs.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut parent: Vec<usize> = (0..seqs.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut x = x;
            while p[x] != r {
                let next = p[x];
                p[x] = r;
                x = next;
            }
            r
        }
        let mut u = vec![0usize; hs.arity];
        for (k, &idx) in seqs.iter().enumerate() {
            hs.decode(idx, &mut u);
            for (i, &x) in u.iter().enumerate() {
                for &y in sim.get(&x).map_or(&[][..], |v| v.as_slice()) {
                    let other = hs.with_coord(idx, i, x, y);
                    let (a, b) = (find(&mut parent, k), find(&mut parent, slot[&other]));
                    parent[a] = b;
                }
            }
        }
        let mut class_label: BTreeMap<usize, u32> = BTreeMap::new();
        for (k, &idx) in seqs.iter().enumerate() {
            if fixed[idx] != NONE {
                let root = find(&mut parent, k);
                match class_label.get(&root) {
                    Some(&l) if l != fixed[idx] => return ControlFlow::Continue(()),
                    _ => {
                        class_label.insert(root, fixed[idx]);
                    }
                }
            }
        }
        let roots: BTreeSet<usize> = (0..seqs.len()).map(|k| find(&mut parent, k)).collect();
        let free: Vec<usize> = roots.into_iter().filter(|r| !class_label.contains_key(r)).collect();
        let lambda = self.hyperlabels as u64;
        let total = lambda.checked_pow(free.len() as u32).unwrap_or(u64::MAX);
        for code in 0..total {
            let mut c = code;
            let mut labels_of = class_label.clone();
            for &r in &free {
                labels_of.insert(r, (c % lambda) as u32);
                c /= lambda;
            }
            let mut hyper = vec![NONE; hs.len()];
            for (k, &idx) in seqs.iter().enumerate() {
                hyper[idx] = labels_of[&find(&mut parent, k)];
            }
            visit(HNet { mask, labels: labels.to_vec(), hyper })?;
        }
        ControlFlow::Continue(())
    }

    fn responses<V>(&self, history: &History, mv: &HMove, visit: &mut V) -> std::result::Result<(), Exhausted>
    where
        V: FnMut(HNet) -> ControlFlow<()>,
    {
        match mv {
            HMove::Map { net, theta } => {
                let _ = visit(self.pullback(&history[*net], theta));
                Ok(())
            }
            HMove::Cyl { net, node, atom, target, .. } => {
                let n = &history[*net];
                let mask = n.mask | 1 << node;
                let mut labels = n.labels.clone();
                let fixed = n.hyper.clone();
                let _ = complete(
                    self.s,
                    &self.shape,
                    &mask_nodes(mask),
                    &mut labels,
                    &[(*target, *atom)],
                    &self.meter,
                    &mut |l| self.hyper_completions(mask, l, &fixed, visit),
                )?;
                Ok(())
            }
            HMove::Amalg { left, right } => {
                let (a, b) = (&history[*left], &history[*right]);
                let mask = a.mask | b.mask;
                let merge = |x: &[u32], y: &[u32]| -> Vec<u32> {
                    x.iter().zip(y).map(|(&p, &q)| if p != NONE { p } else { q }).collect()
                };
                let mut labels = merge(&a.labels, &b.labels);
                let fixed = if self.hshape.is_some() { merge(&a.hyper, &b.hyper) } else { Vec::new() };
                let _ = complete(self.s, &self.shape, &mask_nodes(mask), &mut labels, &[], &self.meter, &mut |l| {
                    self.hyper_completions(mask, l, &fixed, visit)
                })?;
                Ok(())
            }
        }
    }

    fn wins(&self, history: &History, rounds: usize) -> std::result::Result<bool, Exhausted> {
        if rounds == 0 {
            return Ok(true);
        }
        if let Some(memo) = &self.memo {
            if let Some(v) = memo.get(&(history.clone(), rounds)) {
                return Ok(*v);
            }
        }
        if !self.meter.tick() {
            return Err(Exhausted);
        }
        let mut value = true;
        for mv in self.moves(history) {
            if self.first_win(history, &mv, rounds)?.is_none() {
                value = false;
                break;
            }
        }
        if let Some(memo) = &self.memo {
            memo.insert((history.clone(), rounds), value);
        }
        Ok(value)
    }

    fn first_win(&self, history: &History, mv: &HMove, rounds: usize) -> std::result::Result<Option<HNet>, Exhausted> {
        let mut any = false;
        let mut chosen = None;
        let mut failure = None;
        let mut seen = HashSet::new();
        self.responses(history, mv, &mut |r| {
            any = true;
            if !seen.insert(r.clone()) {
                return ControlFlow::Continue(());
            }
            match self.wins(&insert(history, r.clone()), rounds - 1) {
                Ok(true) => {
                    chosen = Some(r);
                    ControlFlow::Break(())
                }
                Ok(false) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        if !any {
            self.unanswerable.fetch_add(1, Ordering::Relaxed);
        }
        Ok(chosen)
    }

    fn all_responses(&self, history: &History, mv: &HMove) -> std::result::Result<Vec<HNet>, Exhausted> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.responses(history, mv, &mut |r| {
            if seen.insert(r.clone()) {
                out.push(r);
            }
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    fn openings(&self, atom: usize) -> std::result::Result<Vec<HNet>, Exhausted> {
        let dim = self.shape.arity;
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for count in 1..=dim {
            let nodes: Vec<usize> = (0..count).collect();
            let mask = (1u64 << count) - 1;
            let fixed = self.hshape.as_ref().map_or_else(Vec::new, |hs| vec![NONE; hs.len()]);
            for_each_tuple_over(&nodes, dim, |d| {
                if out.len() == usize::MAX {
                    return;
                }
                let target = self.shape.index(d);
                let mut labels = vec![NONE; self.shape.len()];
                let r = complete(
                    self.s,
                    &self.shape,
                    &nodes,
                    &mut labels,
                    &[(target, atom as u32)],
                    &self.meter,
                    &mut |l| {
                        self.hyper_completions(mask, l, &fixed, &mut |h| {
                            if seen.insert(h.clone()) {
                                out.push(h);
                            }
                            ControlFlow::Continue(())
                        })
                    },
                );
                if r.is_err() {
                    out.clear();
                    out.push(HNet { mask: 0, labels: Vec::new(), hyper: Vec::new() });
                }
            });
            if out.first().is_some_and(|h| h.mask == 0) {
                return Err(Exhausted);
            }
        }
        Ok(out)
    }

    fn opening_won(&self, atom: usize, rounds: usize) -> std::result::Result<bool, Exhausted> {
        for n in self.openings(atom)? {
            if self.wins(&vec![n], rounds)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn to_move(&self, mv: &HMove, order: &[usize]) -> Move {
        match mv {
            HMove::Cyl { net, index, face, node, atom, .. } => Move::Cylindrify {
                net: order[*net],
                index: *index,
                face: face.clone(),
                node: *node,
                atom: *atom as usize,
            },
            HMove::Map { net, theta } => Move::Transform { net: order[*net], map: theta.clone() },
            HMove::Amalg { left, right } => {
                let (l, r) = (order[*left], order[*right]);
                Move::Amalgamate { left: l.min(r), right: l.max(r) }
            }
        }
    }

    fn lift_move(&self, history: &History, mv: &Move) -> Option<HMove> {
        match mv {
            Move::Cylindrify { net, index, face, node, atom } => {
                let t = mv.target()?;
                (*net < history.len() && t.iter().all(|&x| x < self.names)).then(|| HMove::Cyl {
                    net: *net,
                    index: *index,
                    face: face.clone(),
                    node: *node,
                    atom: *atom as u32,
                    target: self.shape.index(&t),
                })
            }
            Move::Transform { net, map } => (*net < history.len() && map.keys().all(|&x| x < self.names))
                .then(|| HMove::Map { net: *net, theta: map.clone() }),
            Move::Amalgamate { left, right } => {
                (*left < history.len() && *right < history.len()).then_some(HMove::Amalg { left: *left, right: *right })
            }
        }
    }

    /// The history as sparse hypernetworks in their own order, with
    /// `order[dense index] = sparse index`.
    fn sparse_history(&self, history: &History) -> (Vec<Hypernetwork>, Vec<usize>) {
        let sparse: Vec<Hypernetwork> = history.iter().map(|n| self.sparse(n)).collect();
        let mut idx: Vec<usize> = (0..sparse.len()).collect();
        idx.sort_by(|&a, &b| sparse[a].cmp(&sparse[b]));
        let mut order = vec![0; sparse.len()];
        for (pos, &i) in idx.iter().enumerate() {
            order[i] = pos;
        }
        (idx.into_iter().map(|i| sparse[i].clone()).collect(), order)
    }
}

struct CertBuilder<'s, 'a> {
    solver: &'s HSolver<'a>,
    index: HashMap<(History, usize), usize>,
    positions: Vec<CertPosition>,
}

impl CertBuilder<'_, '_> {
    fn position(&mut self, history: &History, left: usize, winner: Player) -> std::result::Result<usize, Exhausted> {
        if let Some(&id) = self.index.get(&(history.clone(), left)) {
            return Ok(id);
        }
        let id = self.positions.len();
        self.index.insert((history.clone(), left), id);
        let (sparse, order) = self.solver.sparse_history(history);
        self.positions.push(CertPosition { history: sparse, left, edges: Vec::new() });
        let mut edges = Vec::new();
        match winner {
            Player::Exists if left > 0 => {
                for mv in self.solver.moves(history) {
                    let r = self.solver.first_win(history, &mv, left)?.expect("the existential player wins here");
                    let child = self.position(&insert(history, r.clone()), left - 1, winner)?;
                    let resp = CertResponse { network: self.solver.sparse(&r), child, renaming: BTreeMap::new() };
                    edges.push(CertEdge { mv: self.solver.to_move(&mv, &order), responses: vec![resp] });
                }
            }
            Player::Exists => {}
            Player::Forall => {
                for mv in self.solver.moves(history) {
                    if self.solver.first_win(history, &mv, left)?.is_some() {
                        continue;
                    }
                    let mut responses = Vec::new();
                    for r in self.solver.all_responses(history, &mv)? {
                        let child = self.position(&insert(history, r.clone()), left - 1, winner)?;
                        responses.push(CertResponse {
                            network: self.solver.sparse(&r),
                            child,
                            renaming: BTreeMap::new(),
                        });
                    }
                    edges.push(CertEdge { mv: self.solver.to_move(&mv, &order), responses });
                    break;
                }
            }
        }
        self.positions[id].edges = edges;
        Ok(id)
    }

    fn openings(&mut self, rounds: usize, winner: Player) -> std::result::Result<Vec<Opening>, Exhausted> {
        let mut out = Vec::new();
        for atom in 0..self.solver.s.atom_count() {
            let candidates = self.solver.openings(atom)?;
            let mut winning = None;
            for n in &candidates {
                if self.solver.wins(&vec![n.clone()], rounds)? {
                    winning = Some(n.clone());
                    break;
                }
            }
            match (winner, winning) {
                (Player::Exists, Some(n)) => {
                    let child = self.position(&vec![n.clone()], rounds, winner)?;
                    let resp = CertResponse { network: self.solver.sparse(&n), child, renaming: BTreeMap::new() };
                    out.push(Opening { atom, responses: vec![resp] });
                }
                (Player::Forall, None) => {
                    let mut responses = Vec::new();
                    for n in candidates {
                        let child = self.position(&vec![n.clone()], rounds, winner)?;
                        responses.push(CertResponse {
                            network: self.solver.sparse(&n),
                            child,
                            renaming: BTreeMap::new(),
                        });
                    }
                    out.push(Opening { atom, responses });
                    break;
                }
                _ => {}
            }
        }
        Ok(out)
    }
}

fn check_inputs(s: &CylAtomStructure, node_budget: usize, hyperlabels: usize) -> Result<()> {
    let v = validate_cyl_structure(s);
    if !v.is_valid() {
        return Err(Error::Validation(v.to_string()));
    }
    if s.dim() < 2 {
        return Err(Error::InvalidParams("the H game needs dimension at least 2".into()));
    }
    if node_budget < s.dim() {
        return Err(Error::InvalidParams(format!("node budget {node_budget} is below the dimension {}", s.dim())));
    }
    if hyperlabels == 0 {
        return Err(Error::InvalidParams("need at least one hyperlabel".into()));
    }
    let arity = if hyperlabels > 1 { s.dim() + 1 } else { s.dim() };
    if node_budget > NODE_CAP || node_budget.checked_pow(arity as u32).is_none_or(|t| t > 1 << 16) {
        return Err(Error::CapExceeded(format!("node budget {node_budget} exceeds the node cap")));
    }
    Ok(())
}

/// Decides `H_{rounds,n}` on `s` with node names below `node_budget` and
/// hyperlabels `0..hyperlabels` (label 0 is the neat one).
pub fn solve_h(
    s: &CylAtomStructure,
    rounds: usize,
    node_budget: usize,
    hyperlabels: usize,
    cfg: &GameConfig,
) -> Result<GameResult> {
    check_inputs(s, node_budget, hyperlabels)?;
    let solver = HSolver::new(s, node_budget, hyperlabels, &cfg.budget, cfg.memo);
    let lost = std::sync::atomic::AtomicBool::new(false);
    let per_atom = cfg.parallelism.map_range(s.atom_count(), |a| {
        if lost.load(Ordering::Relaxed) {
            return None;
        }
        let v = solver.opening_won(a, rounds);
        if v == Ok(false) {
            lost.store(true, Ordering::Relaxed);
        }
        Some(v)
    });
    let mut result = GameResult {
        game: format!("H rounds={rounds} n={} nodes={node_budget} hyperlabels={hyperlabels} on {}", s.dim(), s.name()),
        outcome: Outcome::Inconclusive,
        rounds,
        budget: cfg.budget,
        nodes_searched: solver.meter.used(),
        positions_memoized: solver.memo.as_ref().map_or(0, |m| m.len()),
        unanswerable_moves: solver.unanswerable.load(Ordering::Relaxed),
        certificate: None,
        notes: vec![
            "neat: every hyperedge of length at most n carries hyperlabel 0; hyperlabels tracked on length n+1".into(),
        ],
    };
    let winner = if lost.into_inner() {
        Player::Forall
    } else if per_atom.iter().all(|v| *v == Some(Ok(true))) {
        Player::Exists
    } else {
        result.notes.push(format!("search budget exhausted ({})", cfg.budget.describe()));
        return Ok(result);
    };
    result.outcome = Outcome::Won(winner);
    if cfg.certificate {
        let cert_solver = if cfg.memo { solver } else { HSolver::new(s, node_budget, hyperlabels, &cfg.budget, true) };
        let mut b = CertBuilder { solver: &cert_solver, index: HashMap::new(), positions: Vec::new() };
        match b.openings(rounds, winner) {
            Ok(openings) => {
                result.certificate = Some(Certificate {
                    kind: GameKind::H { node_budget, hyperlabels },
                    dim: s.dim(),
                    rounds,
                    winner,
                    openings,
                    positions: b.positions,
                })
            }
            Err(Exhausted) => result.notes.push("certificate omitted: budget exhausted while extracting it".into()),
        }
    }
    Ok(result)
}

fn dense_history(solver: &HSolver<'_>, history: &[Hypernetwork]) -> Result<(History, Vec<usize>)> {
    let mut dense = Vec::with_capacity(history.len());
    for h in history {
        dense.push(
            solver
                .dense(h)
                .ok_or_else(|| Error::InvalidParams(format!("hypernetwork outside the game's shape: {h}")))?,
        );
    }
    // moves index the given order; the solver keeps histories sorted
    let mut idx: Vec<usize> = (0..dense.len()).collect();
    idx.sort_by(|&a, &b| dense[a].cmp(&dense[b]));
    let sorted: History = idx.iter().map(|&i| dense[i].clone()).collect();
    let mut to_sorted = vec![0; dense.len()];
    for (pos, &i) in idx.iter().enumerate() {
        to_sorted[i] = pos;
    }
    Ok((sorted, to_sorted))
}

fn remap(mv: &Move, to_sorted: &[usize]) -> Move {
    match mv.clone() {
        Move::Cylindrify { net, index, face, node, atom } => {
            Move::Cylindrify { net: to_sorted[net], index, face, node, atom }
        }
        Move::Transform { net, map } => Move::Transform { net: to_sorted[net], map },
        Move::Amalgamate { left, right } => Move::Amalgamate { left: to_sorted[left], right: to_sorted[right] },
    }
}

/// Every legal response of the existential player to `mv` played on
/// `history` (indices refer to `history` as given).
pub fn h_responses(
    s: &CylAtomStructure,
    history: &[Hypernetwork],
    mv: &Move,
    node_budget: usize,
    hyperlabels: usize,
) -> Result<Vec<Hypernetwork>> {
    check_inputs(s, node_budget, hyperlabels)?;
    let solver = HSolver::new(s, node_budget, hyperlabels, &Budget::unlimited(), false);
    let (dense, to_sorted) = dense_history(&solver, history)?;
    let hm = solver
        .lift_move(&dense, &remap(mv, &to_sorted))
        .ok_or_else(|| Error::InvalidParams(format!("move {mv} does not fit the history")))?;
    if !legal_h_move(&solver, &dense, &hm) {
        return Err(Error::Precondition(format!("move {mv} is not legal here")));
    }
    let out = solver.all_responses(&dense, &hm).expect("unlimited budget");
    Ok(out.iter().map(|r| solver.sparse(r)).collect())
}

fn legal_h_move(solver: &HSolver<'_>, history: &History, mv: &HMove) -> bool {
    let dim = solver.shape.arity;
    match mv {
        HMove::Cyl { net, index, face, node, atom, .. } => {
            let n = &history[*net];
            let nodes = mask_nodes(n.mask);
            if *index >= dim || face.len() + 1 != dim || face.iter().any(|x| n.mask >> x & 1 == 0) {
                return false;
            }
            if *node >= solver.names || n.mask >> node & 1 == 1 {
                return false;
            }
            let mut probe = face.clone();
            probe.insert(*index, nodes[0]);
            solver.s.equivalent(*index, n.labels[solver.shape.index(&probe)] as usize, *atom as usize)
        }
        HMove::Map { net, theta } => {
            let targets: BTreeSet<usize> = theta.values().copied().collect();
            targets == mask_nodes(history[*net].mask).into_iter().collect()
        }
        HMove::Amalg { left, right } => {
            let (a, b) = (&history[*left], &history[*right]);
            left != right && a.mask & b.mask != 0 && solver.restrict_equal(a, b, a.mask & b.mask)
        }
    }
}

/// Replays an H certificate. See [`super::verify_certificate`].
pub(crate) fn verify_h(s: &CylAtomStructure, cert: &Certificate, r: &mut crate::ValidationReport) -> Result<()> {
    let GameKind::H { node_budget, hyperlabels } = cert.kind else { unreachable!() };
    check_inputs(s, node_budget, hyperlabels)?;
    let solver = HSolver::new(s, node_budget, hyperlabels, &Budget::unlimited(), false);
    let mut dense_positions = Vec::with_capacity(cert.positions.len());
    for (i, p) in cert.positions.iter().enumerate() {
        for h in &p.history {
            let v = super::network::check_hypernetwork(s, h, true)?;
            if !v.is_valid() {
                r.violate("atomic-network", format!("p{i}: {}", v.violations[0].witness));
            }
        }
        let sorted = p.history.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            r.violate("position-shape", format!("p{i}: history is not strictly ordered"));
        }
        dense_positions.push(dense_history(&solver, &p.history)?);
    }
    let child_ok = |r: &mut crate::ValidationReport, parent: Option<usize>, resp: &CertResponse, left: usize| {
        let Some(child) = cert.positions.get(resp.child) else {
            r.violate("child-link", format!("missing position p{}", resp.child));
            return;
        };
        let mut expect: Vec<Hypernetwork> = parent.map_or_else(Vec::new, |p| cert.positions[p].history.clone());
        if !expect.contains(&resp.network) {
            expect.push(resp.network.clone());
        }
        expect.sort();
        if child.history != expect || child.left != left || !resp.renaming.is_empty() {
            r.violate("child-link", format!("p{} does not follow from its parent", resp.child));
        }
    };
    // openings
    r.clause("opening");
    let legal_opening = |h: &Hypernetwork, atom: usize| {
        h.nodes().iter().all(|&x| x < s.dim())
            && h.network.labels().any(|(_, a)| a == atom)
            && super::network::check_hypernetwork(s, h, true).is_ok_and(|v| v.is_valid())
    };
    match cert.winner {
        Player::Exists => {
            for atom in 0..s.atom_count() {
                match cert.openings.iter().find(|o| o.atom == atom) {
                    Some(o) if o.responses.len() == 1 && legal_opening(&o.responses[0].network, atom) => {
                        child_ok(r, None, &o.responses[0], cert.rounds)
                    }
                    _ => r.violate("opening", format!("no legal opening for atom {atom}")),
                }
            }
        }
        Player::Forall => match cert.openings.as_slice() {
            [o] => {
                let all: BTreeSet<Hypernetwork> =
                    solver.openings(o.atom).expect("unlimited").iter().map(|n| solver.sparse(n)).collect();
                let listed: BTreeSet<Hypernetwork> = o.responses.iter().map(|x| x.network.clone()).collect();
                if all != listed {
                    r.violate("opening", format!("responses to atom {} are not exactly the legal openings", o.atom));
                }
                for x in &o.responses {
                    child_ok(r, None, x, cert.rounds);
                }
            }
            _ => r.violate("opening", "expected exactly one opening"),
        },
    }
    r.clause("moves");
    r.clause("responses");
    for (i, p) in cert.positions.iter().enumerate() {
        let (dense, to_sorted) = &dense_positions[i];
        let edge_for = |mv: &HMove| -> Option<&CertEdge> {
            let want = solver.to_move(mv, &invert(to_sorted));
            p.edges.iter().find(|e| e.mv == want)
        };
        match cert.winner {
            Player::Exists => {
                if p.left == 0 {
                    continue;
                }
                for mv in solver.moves(dense) {
                    let Some(e) = edge_for(&mv) else {
                        r.violate("moves", format!("p{i}: no answer to {}", solver.to_move(&mv, &invert(to_sorted))));
                        continue;
                    };
                    r.instances += 1;
                    let [resp] = e.responses.as_slice() else {
                        r.violate("responses", format!("p{i}: expected one response to {}", e.mv));
                        continue;
                    };
                    let all = solver.all_responses(dense, &mv).expect("unlimited");
                    if !all.iter().any(|x| solver.sparse(x) == resp.network) {
                        r.violate("responses", format!("p{i}: illegal response to {}", e.mv));
                    }
                    child_ok(r, Some(i), resp, p.left - 1);
                }
            }
            Player::Forall => {
                let [e] = p.edges.as_slice() else {
                    r.violate("moves", format!("p{i}: expected exactly one universal move"));
                    continue;
                };
                if p.left == 0 {
                    r.violate("moves", format!("p{i}: no rounds left for the universal player"));
                    continue;
                }
                let Some(mv) = solver.lift_move(dense, &remap(&e.mv, to_sorted)) else {
                    r.violate("moves", format!("p{i}: malformed move {}", e.mv));
                    continue;
                };
                if !legal_h_move(&solver, dense, &mv) {
                    r.violate("moves", format!("p{i}: illegal move {}", e.mv));
                    continue;
                }
                r.instances += 1;
                let all: BTreeSet<Hypernetwork> =
                    solver.all_responses(dense, &mv).expect("unlimited").iter().map(|x| solver.sparse(x)).collect();
                let listed: BTreeSet<Hypernetwork> = e.responses.iter().map(|x| x.network.clone()).collect();
                if all != listed {
                    r.violate("responses", format!("p{i}: responses to {} are not exactly the legal ones", e.mv));
                }
                for resp in &e.responses {
                    child_ok(r, Some(i), resp, p.left - 1);
                }
            }
        }
    }
    Ok(())
}

fn invert(to_sorted: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; to_sorted.len()];
    for (orig, &sorted) in to_sorted.iter().enumerate() {
        inv[sorted] = orig;
    }
    inv
}
