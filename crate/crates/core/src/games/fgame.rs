//! The bounded game `F^m_n`.
//!
//! A position is the network the universal player attacks next. Because
//! every response extends the history and a win from a set of networks is a
//! win from each of them separately, the latest network alone determines
//! the value of a position; the solver memoizes values on its canonical
//! form.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;

use crate::algebra::{validate_cyl_structure, CylAtomStructure};
use crate::budget::Meter;
use crate::{Budget, Error, Parallelism, Result};

use super::engine::{canonicalize, complete, mask_nodes, rename, to_hypernetwork, Exhausted, Shape, NONE};
use super::network::{for_each_tuple_over, Hypernetwork, Network};
use super::result::{
    CertEdge, CertPosition, CertResponse, Certificate, GameKind, GameResult, Move, Opening, Outcome, Player,
};

/// Largest node count the solvers accept.
pub const NODE_CAP: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct GameConfig {
    pub budget: Budget,
    pub memo: bool,
    pub parallelism: Parallelism,
    pub certificate: bool,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            budget: Budget::unlimited().with_env(),
            memo: true,
            parallelism: Parallelism::default(),
            certificate: true,
        }
    }
}

/// A network on nodes `0..count` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Pos {
    count: usize,
    labels: Vec<u32>,
}

impl Pos {
    fn mask(&self) -> u64 {
        (1u64 << self.count) - 1
    }
}

#[derive(Debug, Clone)]
struct FMove {
    index: usize,
    face: Vec<usize>,
    node: usize,
    atom: u32,
    target: usize,
}

pub(crate) struct FSolver<'a> {
    s: &'a CylAtomStructure,
    shape: Shape,
    m: usize,
    memo: Option<DashMap<(Vec<u32>, usize), bool>>,
    meter: Meter,
    unanswerable: AtomicU64,
}

impl<'a> FSolver<'a> {
    pub(crate) fn new(s: &'a CylAtomStructure, m: usize, budget: &Budget, memo: bool) -> Self {
        FSolver {
            s,
            shape: Shape::new(s.dim(), m),
            m,
            memo: memo.then(DashMap::new),
            meter: budget.meter(),
            unanswerable: AtomicU64::new(0),
        }
    }

    /// Canonical position of a dense labelling, with `rename[old] = new`.
    fn canonical(&self, mask: u64, labels: &[u32]) -> (Pos, BTreeMap<usize, usize>) {
        let c = canonicalize(&self.shape, None, mask, labels, &[]);
        let ns = mask_nodes(mask);
        let map: BTreeMap<usize, usize> = c.renaming().iter().enumerate().map(|(i, &new)| (ns[i], new)).collect();
        let (_, labels) = rename(&self.shape, mask, labels, &map);
        (Pos { count: ns.len(), labels }, map)
    }

    fn moves(&self, pos: &Pos) -> Vec<FMove> {
        let dim = self.shape.arity;
        let nodes: Vec<usize> = (0..pos.count).collect();
        let mut out = Vec::new();
        let mut t = vec![0usize; dim];
        for index in 0..dim {
            for_each_tuple_over(&nodes, dim - 1, |face| {
                t[..index].copy_from_slice(&face[..index]);
                t[index + 1..].copy_from_slice(&face[index..]);
                t[index] = 0;
                let class = self.s.equiv_row(index, pos.labels[self.shape.index(&t)] as usize);
                // all fresh nodes are interchangeable; offer the least one
                let fresh = (pos.count < self.m).then_some(pos.count);
                for node in (0..pos.count).filter(|k| !face.contains(k)).chain(fresh) {
                    t[index] = node;
                    let target = self.shape.index(&t);
                    for b in class.iter() {
                        out.push(FMove { index, face: face.to_vec(), node, atom: b as u32, target });
                    }
                }
            });
        }
        out
    }

    /// Calls `visit` on every legal response to `mv`, as a dense labelling
    /// over the nodes `0..count` plus the move's node.
    fn responses<V>(&self, pos: &Pos, mv: &FMove, visit: &mut V) -> std::result::Result<(), Exhausted>
    where
        V: FnMut(u64, &[u32]) -> ControlFlow<()>,
    {
        let mask = pos.mask() | 1 << mv.node;
        let nodes = mask_nodes(mask);
        let mut labels = pos.labels.clone();
        let mut t = vec![0usize; self.shape.arity];
        for idx in self.shape.tuples_over(&nodes) {
            self.shape.decode(idx, &mut t);
            if t.contains(&mv.node) {
                labels[idx] = NONE;
            }
        }
        let _ = complete(self.s, &self.shape, &nodes, &mut labels, &[(mv.target, mv.atom)], &self.meter, &mut |l| {
            visit(mask, l)
        })?;
        Ok(())
    }

    /// Whether the existential player survives `rounds` more rounds from
    /// `pos`.
    fn wins(&self, pos: &Pos, rounds: usize) -> std::result::Result<bool, Exhausted> {
        if rounds == 0 {
            return Ok(true);
        }
        if let Some(memo) = &self.memo {
            if let Some(v) = memo.get(&(pos.labels.clone(), rounds)) {
                return Ok(*v);
            }
        }
        if !self.meter.tick() {
            return Err(Exhausted);
        }
        let mut value = true;
        for mv in self.moves(pos) {
            if !self.answerable(pos, &mv, rounds)? {
                value = false;
                break;
            }
        }
        if let Some(memo) = &self.memo {
            memo.insert((pos.labels.clone(), rounds), value);
        }
        Ok(value)
    }

    fn answerable(&self, pos: &Pos, mv: &FMove, rounds: usize) -> std::result::Result<bool, Exhausted> {
        let mut seen = HashSet::new();
        let mut any = false;
        let mut found = false;
        let mut failure = None;
        self.responses(pos, mv, &mut |mask, l| {
            any = true;
            let (child, _) = self.canonical(mask, l);
            if !seen.insert(child.labels.clone()) {
                return ControlFlow::Continue(());
            }
            match self.wins(&child, rounds - 1) {
                Ok(true) => {
                    found = true;
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
        Ok(found)
    }

    /// Every initial network containing `atom`, one per isomorphism class,
    /// in discovery order.
    fn openings(&self, atom: usize) -> std::result::Result<Vec<Pos>, Exhausted> {
        let dim = self.shape.arity;
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for count in 1..=dim {
            let nodes: Vec<usize> = (0..count).collect();
            for pattern in (1..=count).flat_map(|used| growth_patterns(dim, used)) {
                let mut labels = vec![NONE; self.shape.len()];
                let target = self.shape.index(&pattern);
                let mask = (1u64 << count) - 1;
                let _ = complete(
                    self.s,
                    &self.shape,
                    &nodes,
                    &mut labels,
                    &[(target, atom as u32)],
                    &self.meter,
                    &mut |l| {
                        let (p, _) = self.canonical(mask, l);
                        if seen.insert(p.labels.clone()) {
                            out.push(p);
                        }
                        ControlFlow::Continue(())
                    },
                )?;
            }
        }
        Ok(out)
    }

    fn opening_won(&self, atom: usize, rounds: usize) -> std::result::Result<bool, Exhausted> {
        for p in self.openings(atom)? {
            if self.wins(&p, rounds)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn hyper(&self, mask: u64, labels: &[u32]) -> Hypernetwork {
        to_hypernetwork(&self.shape, None, mask, labels, &[])
    }

    fn to_move(&self, mv: &FMove) -> Move {
        Move::Cylindrify { net: 0, index: mv.index, face: mv.face.clone(), node: mv.node, atom: mv.atom as usize }
    }
}

/// Tuples of length `len` over `0..count` in which every node occurs and
/// nodes first appear in increasing order.
fn growth_patterns(len: usize, count: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, count: usize, cur: &mut Vec<usize>, top: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            if top == count {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=top.min(count - 1) {
            cur.push(v);
            go(len, count, cur, top.max(v + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, count, &mut Vec::new(), 0, &mut out);
    out
}

struct CertBuilder<'s, 'a> {
    solver: &'s FSolver<'a>,
    index: HashMap<(Vec<u32>, usize), usize>,
    positions: Vec<CertPosition>,
}

impl CertBuilder<'_, '_> {
    fn position(&mut self, pos: &Pos, left: usize, winner: Player) -> std::result::Result<usize, Exhausted> {
        if let Some(&id) = self.index.get(&(pos.labels.clone(), left)) {
            return Ok(id);
        }
        let id = self.positions.len();
        self.index.insert((pos.labels.clone(), left), id);
        self.positions.push(CertPosition {
            history: vec![self.solver.hyper(pos.mask(), &pos.labels)],
            left,
            edges: Vec::new(),
        });
        let edges = match winner {
            Player::Exists => self.exists_edges(pos, left)?,
            Player::Forall => self.forall_edges(pos, left)?,
        };
        self.positions[id].edges = edges;
        Ok(id)
    }

    fn response(
        &mut self,
        mask: u64,
        labels: &[u32],
        left: usize,
        winner: Player,
    ) -> std::result::Result<CertResponse, Exhausted> {
        let (child, renaming) = self.solver.canonical(mask, labels);
        let network = self.solver.hyper(mask, labels);
        let child = self.position(&child, left, winner)?;
        Ok(CertResponse { network, child, renaming })
    }

    fn exists_edges(&mut self, pos: &Pos, left: usize) -> std::result::Result<Vec<CertEdge>, Exhausted> {
        if left == 0 {
            return Ok(Vec::new());
        }
        let mut edges = Vec::new();
        for mv in self.solver.moves(pos) {
            let chosen = self.first_win(pos, &mv, left)?.expect("the existential player wins this position");
            let r = self.response(chosen.0, &chosen.1, left - 1, Player::Exists)?;
            edges.push(CertEdge { mv: self.solver.to_move(&mv), responses: vec![r] });
        }
        Ok(edges)
    }

    fn first_win(&self, pos: &Pos, mv: &FMove, left: usize) -> std::result::Result<Option<(u64, Vec<u32>)>, Exhausted> {
        let mut chosen = None;
        let mut failure = None;
        self.solver.responses(pos, mv, &mut |mask, l| {
            let (child, _) = self.solver.canonical(mask, l);
            match self.solver.wins(&child, left - 1) {
                Ok(true) => {
                    chosen = Some((mask, l.to_vec()));
                    ControlFlow::Break(())
                }
                Ok(false) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        failure.map_or(Ok(chosen), Err)
    }

    fn all_responses(&self, pos: &Pos, mv: &FMove) -> std::result::Result<Vec<(u64, Vec<u32>)>, Exhausted> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.solver.responses(pos, mv, &mut |mask, l| {
            let (child, _) = self.solver.canonical(mask, l);
            if seen.insert(child.labels) {
                out.push((mask, l.to_vec()));
            }
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    fn forall_edges(&mut self, pos: &Pos, left: usize) -> std::result::Result<Vec<CertEdge>, Exhausted> {
        for mv in self.solver.moves(pos) {
            if self.first_win(pos, &mv, left)?.is_none() {
                let mut responses = Vec::new();
                for (mask, l) in self.all_responses(pos, &mv)? {
                    responses.push(self.response(mask, &l, left - 1, Player::Forall)?);
                }
                return Ok(vec![CertEdge { mv: self.solver.to_move(&mv), responses }]);
            }
        }
        unreachable!("the universal player wins this position")
    }

    fn openings(&mut self, rounds: usize, winner: Player) -> std::result::Result<Vec<Opening>, Exhausted> {
        let mut out = Vec::new();
        for atom in 0..self.solver.s.atom_count() {
            let candidates = self.solver.openings(atom)?;
            match winner {
                Player::Exists => {
                    let mut responses = Vec::new();
                    for p in candidates {
                        if self.solver.wins(&p, rounds)? {
                            responses.push(self.response(p.mask(), &p.labels, rounds, winner)?);
                            break;
                        }
                    }
                    out.push(Opening { atom, responses });
                }
                Player::Forall => {
                    let mut lost = true;
                    for p in &candidates {
                        if self.solver.wins(p, rounds)? {
                            lost = false;
                            break;
                        }
                    }
                    if lost {
                        let mut responses = Vec::new();
                        for p in candidates {
                            responses.push(self.response(p.mask(), &p.labels, rounds, winner)?);
                        }
                        out.push(Opening { atom, responses });
                        break;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn check_game_inputs(s: &CylAtomStructure, m: usize) -> Result<()> {
    let v = validate_cyl_structure(s);
    if !v.is_valid() {
        return Err(Error::Validation(v.to_string()));
    }
    if m < s.dim() {
        return Err(Error::InvalidParams(format!("m = {m} is below the dimension {}", s.dim())));
    }
    if m > NODE_CAP || m.checked_pow(s.dim() as u32).is_none_or(|t| t > 1 << 16) {
        return Err(Error::CapExceeded(format!("m = {m} in dimension {} exceeds the node cap", s.dim())));
    }
    Ok(())
}

/// Decides the `rounds`-round game `F^m_n` on `s` (with `n` its dimension)
/// by exhaustive alternating search. `rounds` counts the rounds after the
/// initial one.
pub fn solve_f(s: &CylAtomStructure, m: usize, rounds: usize, cfg: &GameConfig) -> Result<GameResult> {
    check_game_inputs(s, m)?;
    let solver = FSolver::new(s, m, &cfg.budget, cfg.memo);
    let atoms = s.atom_count();
    let lost = std::sync::atomic::AtomicBool::new(false);
    let per_atom = cfg.parallelism.map_range(atoms, |a| {
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
        game: format!("F m={m} n={} on {}", s.dim(), s.name()),
        outcome: Outcome::Inconclusive,
        rounds,
        budget: cfg.budget,
        nodes_searched: solver.meter.used(),
        positions_memoized: solver.memo.as_ref().map_or(0, |m| m.len()),
        unanswerable_moves: solver.unanswerable.load(Ordering::Relaxed),
        certificate: None,
        notes: Vec::new(),
    };
    // an atom the existential player cannot open with settles the game even
    // if other branches ran out of budget
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
        let cert_solver = if cfg.memo { solver } else { FSolver::new(s, m, &cfg.budget, true) };
        let mut b = CertBuilder { solver: &cert_solver, index: HashMap::new(), positions: Vec::new() };
        match b.openings(rounds, winner) {
            Ok(openings) => {
                result.certificate = Some(Certificate {
                    kind: GameKind::F { m },
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

// ---- replay -----------------------------------------------------------

/// Universal cylindrifier moves on `n` in the F game with `m` nodes.
pub(crate) fn legal_f_moves(s: &CylAtomStructure, n: &Network, m: usize) -> Vec<Move> {
    let dim = s.dim();
    let nodes = n.node_vec();
    let mut out = Vec::new();
    for index in 0..dim {
        for_each_tuple_over(&nodes, dim - 1, |face| {
            let mut probe = face.to_vec();
            probe.insert(index, nodes[0]);
            let Some(a) = n.label(&probe) else { return };
            for node in (0..m).filter(|k| !face.contains(k)) {
                for b in s.equiv_row(index, a).iter() {
                    out.push(Move::Cylindrify { net: 0, index, face: face.to_vec(), node, atom: b });
                }
            }
        });
    }
    out
}

/// Whether `resp` is a legal answer to `mv` played on `n`.
pub(crate) fn legal_f_response(n: &Network, mv: &Move, resp: &Network) -> bool {
    let Move::Cylindrify { node, atom, .. } = mv else { return false };
    let mut nodes = n.nodes().clone();
    nodes.insert(*node);
    if resp.nodes() != &nodes || !resp.is_complete() {
        return false;
    }
    let off: std::collections::BTreeSet<usize> = [*node].into();
    resp.agrees_off(n, &off) && resp.label(&mv.target().expect("cylindrifier")) == Some(*atom)
}

pub(crate) fn all_f_responses(
    s: &CylAtomStructure,
    n: &Network,
    mv: &Move,
    m: usize,
) -> std::result::Result<Vec<Network>, Exhausted> {
    let Move::Cylindrify { node, atom, .. } = mv else { return Ok(Vec::new()) };
    let shape = Shape::new(s.dim(), m);
    let mut nodes = n.node_vec();
    if !nodes.contains(node) {
        nodes.push(*node);
        nodes.sort_unstable();
    }
    let mut labels = vec![NONE; shape.len()];
    for (t, a) in n.labels() {
        if !t.contains(node) {
            labels[shape.index(t)] = a as u32;
        }
    }
    let mask = nodes.iter().fold(0u64, |acc, &x| acc | 1 << x);
    let target = shape.index(&mv.target().expect("cylindrifier"));
    let meter = Budget::unlimited().meter();
    let mut out = Vec::new();
    let _ = complete(s, &shape, &nodes, &mut labels, &[(target, *atom as u32)], &meter, &mut |l| {
        out.push(super::engine::to_network(&shape, mask, l));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub(crate) fn network_key(n: &Network, m: usize) -> Option<Vec<u32>> {
    let shape = Shape::new(n.arity(), m.max(n.nodes().iter().max().map_or(0, |x| x + 1)));
    let (mask, labels) = super::engine::from_network(&shape, n)?;
    Some(canonicalize(&shape, None, mask, &labels, &[]).key)
}

pub(crate) fn all_f_openings(s: &CylAtomStructure, m: usize, atom: usize) -> Vec<Vec<u32>> {
    let solver = FSolver::new(s, m, &Budget::unlimited(), false);
    solver
        .openings(atom)
        .expect("unlimited budget")
        .into_iter()
        .map(|p| canonicalize(&solver.shape, None, p.mask(), &p.labels, &[]).key)
        .collect()
}

pub(crate) fn renamed(n: &Network, map: &BTreeMap<usize, usize>) -> Option<Network> {
    // renaming must be a bijection from the response's nodes
    if map.keys().copied().ne(n.nodes().iter().copied()) {
        return None;
    }
    let images: std::collections::BTreeSet<usize> = map.values().copied().collect();
    if images.len() != map.len() {
        return None;
    }
    let inverse: BTreeMap<usize, usize> = map.iter().map(|(&x, &y)| (y, x)).collect();
    Some(n.pullback(&inverse))
}
