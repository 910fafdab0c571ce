use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::{Budget, Error, Result};

use super::network::{fmt_tuple, Hypernetwork, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Exists,
    Forall,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Exists => "exists",
            Player::Forall => "forall",
        })
    }
}

impl FromStr for Player {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exists" => Ok(Player::Exists),
            "forall" => Ok(Player::Forall),
            _ => Err(Error::Parse { line: 0, msg: format!("unknown player `{s}`") }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Won(Player),
    /// The budget ran out before the search finished.
    Inconclusive,
}

/// A move of the universal player. `net`, `left` and `right` index the
/// position's history.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    /// Cylindrifier move: the tuple `face` with `node` inserted at `index`
    /// must be labelled `atom`.
    Cylindrify {
        net: usize,
        index: usize,
        face: Vec<usize>,
        node: usize,
        atom: usize,
    },
    Transform {
        net: usize,
        map: BTreeMap<usize, usize>,
    },
    Amalgamate {
        left: usize,
        right: usize,
    },
}

impl Move {
    /// The tuple a cylindrifier move labels.
    pub fn target(&self) -> Option<Vec<usize>> {
        match self {
            Move::Cylindrify { index, face, node, .. } => {
                let mut t = face.clone();
                t.insert(*index, *node);
                Some(t)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Cylindrify { net, index, face, node, atom } => {
                write!(f, "cyl net={net} l={index} face={} k={node} b={atom}", fmt_tuple(face))
            }
            Move::Transform { net, map } => {
                let parts: Vec<String> = map.iter().map(|(x, y)| format!("{x}:{y}")).collect();
                write!(f, "map net={net} theta={}", parts.join(","))
            }
            Move::Amalgamate { left, right } => write!(f, "amalg left={left} right={right}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    F { m: usize },
    H { node_budget: usize, hyperlabels: usize },
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameKind::F { m } => write!(f, "game=F m={m}"),
            GameKind::H { node_budget, hyperlabels } => {
                write!(f, "game=H nodes={node_budget} hyperlabels={hyperlabels}")
            }
        }
    }
}

/// A response of the existential player and the position it leads to.
///
/// In the F game a position is a single network up to node renaming;
/// `renaming` maps the response's nodes onto the child's. In the H game the
/// child's history is the parent's plus the response and `renaming` is
/// empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertResponse {
    pub network: Hypernetwork,
    pub child: usize,
    pub renaming: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertEdge {
    pub mv: Move,
    /// One response when the existential player wins; every response (up
    /// to isomorphism in the F game) when the universal player wins.
    pub responses: Vec<CertResponse>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertPosition {
    pub history: Vec<Hypernetwork>,
    /// Rounds still to be played from here.
    pub left: usize,
    pub edges: Vec<CertEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Opening {
    pub atom: usize,
    pub responses: Vec<CertResponse>,
}

/// A strategy for the declared winner, stored as a DAG of positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: GameKind,
    pub dim: usize,
    pub rounds: usize,
    pub winner: Player,
    pub openings: Vec<Opening>,
    pub positions: Vec<CertPosition>,
}

#[derive(Debug, Clone)]
pub struct GameResult {
    pub game: String,
    pub outcome: Outcome,
    pub rounds: usize,
    pub budget: Budget,
    pub nodes_searched: u64,
    pub positions_memoized: usize,
    /// Universal moves met during the search that had no legal response.
    pub unanswerable_moves: u64,
    pub certificate: Option<Certificate>,
    pub notes: Vec<String>,
}

impl GameResult {
    pub fn winner(&self) -> Option<Player> {
        match self.outcome {
            Outcome::Won(p) => Some(p),
            Outcome::Inconclusive => None,
        }
    }

    pub fn is_conclusive(&self) -> bool {
        self.outcome != Outcome::Inconclusive
    }
}

impl fmt::Display for GameResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "game: {}", self.game)?;
        match self.outcome {
            Outcome::Won(p) => writeln!(f, "winner: {p}")?,
            Outcome::Inconclusive => writeln!(f, "winner: inconclusive")?,
        }
        writeln!(f, "rounds: {}", self.rounds)?;
        writeln!(f, "budget: {}", self.budget.describe())?;
        writeln!(f, "searched: {}", self.nodes_searched)?;
        writeln!(f, "memoized: {}", self.positions_memoized)?;
        writeln!(f, "unanswerable-moves: {}", self.unanswerable_moves)?;
        if let Some(c) = &self.certificate {
            writeln!(f, "certificate: {} positions", c.positions.len())?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

fn encode_hyper(h: &Hypernetwork) -> String {
    let mut s = h.network.to_string();
    for (t, l) in h.hyperlabels() {
        s.push_str(&format!(" h{}={l}", fmt_tuple(t)));
    }
    s
}

/// Labels of `h` that differ from `base` (explicit `=0` entries reset a
/// hyperlabel to the neutral one).
fn encode_delta(h: &Hypernetwork, base: Option<&Hypernetwork>) -> String {
    let Some(base) = base else { return encode_hyper(h) };
    let nodes: Vec<String> = h.nodes().iter().map(|x| x.to_string()).collect();
    let mut parts = vec![format!("nodes={}", nodes.join(","))];
    for (t, a) in h.network.labels() {
        if base.network.label(t) != Some(a) {
            parts.push(format!("{}={a}", fmt_tuple(t)));
        }
    }
    let mut seqs: BTreeSet<Vec<usize>> = h.hyperlabels().map(|(t, _)| t.to_vec()).collect();
    seqs.extend(base.hyperlabels().map(|(t, _)| t.to_vec()).filter(|t| t.iter().all(|x| h.nodes().contains(x))));
    for t in seqs {
        if h.hyperlabel(&t) != base.hyperlabel(&t) {
            parts.push(format!("h{}={}", fmt_tuple(&t), h.hyperlabel(&t)));
        }
    }
    parts.join(" ")
}

fn parse_tuple(s: &str) -> Option<Vec<usize>> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    if inner.is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|x| x.parse().ok()).collect()
}

fn parse_map(s: &str) -> Option<BTreeMap<usize, usize>> {
    if s.is_empty() {
        return Some(BTreeMap::new());
    }
    s.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once(':')?;
            Some((k.parse().ok()?, v.parse().ok()?))
        })
        .collect()
}

/// Parses `nodes=… (t)=a … h(t)=l …` on top of `base` (restricted to the
/// listed nodes).
fn decode_delta(words: &[&str], arity: usize, base: Option<&Hypernetwork>) -> Option<Hypernetwork> {
    let (first, rest) = words.split_first()?;
    let nodes: BTreeSet<usize> = match first.strip_prefix("nodes=")? {
        "" => BTreeSet::new(),
        list => list.split(',').map(|x| x.parse().ok()).collect::<Option<_>>()?,
    };
    let mut h = match base {
        Some(b) => b.restrict(&nodes),
        None => Hypernetwork::new(Network::new(arity, [])),
    };
    let mut net = Network::new(arity, nodes.iter().copied());
    for (t, a) in h.network.labels() {
        net.set(t.to_vec(), a).ok()?;
    }
    let hyper: Vec<(Vec<usize>, usize)> = h.hyperlabels().map(|(t, l)| (t.to_vec(), l)).collect();
    let mut extra = Vec::new();
    for w in rest {
        let (lhs, rhs) = w.split_once('=')?;
        let v: usize = rhs.parse().ok()?;
        if let Some(t) = lhs.strip_prefix('h') {
            extra.push((parse_tuple(t)?, v));
        } else {
            net.set(parse_tuple(lhs)?, v).ok()?;
        }
    }
    h = Hypernetwork::new(net);
    for (t, l) in hyper.into_iter().chain(extra) {
        h.set_hyperlabel(t, l);
    }
    Some(h)
}

fn parse_move(words: &[&str]) -> Option<Move> {
    let get = |key: &str| words.iter().find_map(|w| w.strip_prefix(key)?.strip_prefix('='));
    match *words.first()? {
        "cyl" => Some(Move::Cylindrify {
            net: get("net")?.parse().ok()?,
            index: get("l")?.parse().ok()?,
            face: parse_tuple(get("face")?)?,
            node: get("k")?.parse().ok()?,
            atom: get("b")?.parse().ok()?,
        }),
        "map" => Some(Move::Transform { net: get("net")?.parse().ok()?, map: parse_map(get("theta")?)? }),
        "amalg" => Some(Move::Amalgamate { left: get("left")?.parse().ok()?, right: get("right")?.parse().ok()? }),
        _ => None,
    }
}

impl Certificate {
    fn arity(&self) -> usize {
        self.dim
    }

    /// The network a response to `mv` at `pos` is encoded against.
    fn delta_base(&self, pos: &CertPosition, mv: &Move) -> Option<Hypernetwork> {
        match mv {
            Move::Cylindrify { net, node, .. } => {
                let n = pos.history.get(*net)?;
                let keep: BTreeSet<usize> = n.nodes().iter().copied().filter(|x| x != node).collect();
                Some(n.restrict(&keep))
            }
            Move::Transform { .. } => None,
            Move::Amalgamate { left, right } => {
                let (l, r) = (pos.history.get(*left)?, pos.history.get(*right)?);
                let mut net = l.network.clone();
                for (t, a) in r.network.labels() {
                    net.set(t.to_vec(), a).ok()?;
                }
                let mut h = Hypernetwork::new(net);
                for (t, lab) in l.hyperlabels().chain(r.hyperlabels()) {
                    h.set_hyperlabel(t.to_vec(), lab);
                }
                Some(h)
            }
        }
    }

    /// Line-oriented text: a header, the positions, then one line per
    /// opening and one per tree edge,
    /// `move p<i> <move> -> response <delta> @p<j> rename=<x:y,…>`.
    pub fn to_text(&self) -> String {
        let mut out =
            format!("certificate {} dim={} rounds={} winner={}\n", self.kind, self.dim, self.rounds, self.winner);
        for (i, p) in self.positions.iter().enumerate() {
            out.push_str(&format!("position p{i} left={}\n", p.left));
            for h in &p.history {
                out.push_str(&format!("net {}\n", encode_hyper(h)));
            }
        }
        let resp = |r: &CertResponse, base: Option<&Hypernetwork>| {
            let map: Vec<String> = r.renaming.iter().map(|(x, y)| format!("{x}:{y}")).collect();
            format!("response {} @p{} rename={}", encode_delta(&r.network, base), r.child, map.join(","))
        };
        for o in &self.openings {
            if o.responses.is_empty() {
                out.push_str(&format!("opening a={} -> none\n", o.atom));
            }
            for r in &o.responses {
                out.push_str(&format!("opening a={} -> {}\n", o.atom, resp(r, None)));
            }
        }
        for (i, p) in self.positions.iter().enumerate() {
            for e in &p.edges {
                let base = if matches!(e.mv, Move::Transform { .. }) { None } else { self.delta_base(p, &e.mv) };
                if e.responses.is_empty() {
                    out.push_str(&format!("move p{i} {} -> none\n", e.mv));
                }
                for r in &e.responses {
                    out.push_str(&format!("move p{i} {} -> {}\n", e.mv, resp(r, base.as_ref())));
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Certificate> {
        let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| err(1, "empty certificate"))?;
        let words: Vec<&str> = header.split_whitespace().collect();
        if words.first() != Some(&"certificate") {
            return Err(err(hl, "expected `certificate` header"));
        }
        let get = |key: &str| {
            words
                .iter()
                .find_map(|w| w.strip_prefix(key)?.strip_prefix('='))
                .ok_or_else(|| err(hl, &format!("missing `{key}=`")))
        };
        let num = |key: &str| -> Result<usize> { get(key)?.parse().map_err(|_| err(hl, &format!("bad `{key}`"))) };
        let kind = match get("game")? {
            "F" => GameKind::F { m: num("m")? },
            "H" => GameKind::H { node_budget: num("nodes")?, hyperlabels: num("hyperlabels")? },
            other => return Err(err(hl, &format!("unknown game `{other}`"))),
        };
        let mut cert = Certificate {
            kind,
            dim: num("dim")?,
            rounds: num("rounds")?,
            winner: get("winner")?.parse().map_err(|_| err(hl, "bad winner"))?,
            openings: Vec::new(),
            positions: Vec::new(),
        };
        let rest: Vec<(usize, &str)> = lines.collect();
        for &(ln, line) in &rest {
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "position" => {
                    let left = words
                        .iter()
                        .find_map(|w| w.strip_prefix("left="))
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(ln, "bad position line"))?;
                    cert.positions.push(CertPosition { history: Vec::new(), left, edges: Vec::new() });
                }
                "net" => {
                    let h = decode_delta(&words[1..], cert.arity(), None).ok_or_else(|| err(ln, "bad network"))?;
                    cert.positions.last_mut().ok_or_else(|| err(ln, "network before position"))?.history.push(h);
                }
                "opening" | "move" => {}
                other => return Err(err(ln, &format!("unknown line kind `{other}`"))),
            }
        }
        let parse_resp =
            |ln: usize, words: &[&str], base: Option<&Hypernetwork>, arity: usize| -> Result<CertResponse> {
                let at = words.iter().position(|w| w.starts_with("@p")).ok_or_else(|| err(ln, "missing @p"))?;
                let network = decode_delta(&words[1..at], arity, base).ok_or_else(|| err(ln, "bad response"))?;
                let child = words[at][2..].parse().map_err(|_| err(ln, "bad child"))?;
                let renaming = words
                    .get(at + 1)
                    .and_then(|w| w.strip_prefix("rename="))
                    .and_then(parse_map)
                    .ok_or_else(|| err(ln, "bad rename"))?;
                Ok(CertResponse { network, child, renaming })
            };
        for &(ln, line) in &rest {
            let words: Vec<&str> = line.split_whitespace().collect();
            let arrow = words.iter().position(|&w| w == "->");
            match words[0] {
                "opening" => {
                    let atom = words
                        .get(1)
                        .and_then(|w| w.strip_prefix("a="))
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(ln, "bad opening"))?;
                    let arrow = arrow.ok_or_else(|| err(ln, "missing ->"))?;
                    if cert.openings.last().is_none_or(|o| o.atom != atom) {
                        cert.openings.push(Opening { atom, responses: Vec::new() });
                    }
                    if words.get(arrow + 1) != Some(&"none") {
                        let r = parse_resp(ln, &words[arrow + 1..], None, cert.dim)?;
                        cert.openings.last_mut().expect("pushed").responses.push(r);
                    }
                }
                "move" => {
                    let arrow = arrow.ok_or_else(|| err(ln, "missing ->"))?;
                    let p: usize = words
                        .get(1)
                        .and_then(|w| w.strip_prefix('p'))
                        .and_then(|v| v.parse().ok())
                        .filter(|&p| p < cert.positions.len())
                        .ok_or_else(|| err(ln, "bad position reference"))?;
                    let mv = parse_move(&words[2..arrow]).ok_or_else(|| err(ln, "bad move"))?;
                    let base = match mv {
                        Move::Transform { .. } => None,
                        _ => Some(
                            cert.delta_base(&cert.positions[p], &mv)
                                .ok_or_else(|| err(ln, "move refers to a missing network"))?,
                        ),
                    };
                    let resp = if words.get(arrow + 1) == Some(&"none") {
                        None
                    } else {
                        Some(parse_resp(ln, &words[arrow + 1..], base.as_ref(), cert.dim)?)
                    };
                    let edges = &mut cert.positions[p].edges;
                    if edges.last().is_none_or(|e| e.mv != mv) {
                        edges.push(CertEdge { mv, responses: Vec::new() });
                    }
                    if let Some(r) = resp {
                        edges.last_mut().expect("pushed").responses.push(r);
                    }
                }
                _ => {}
            }
        }
        Ok(cert)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn move_display_roundtrip() {
        let moves = [
            Move::Cylindrify { net: 0, index: 1, face: vec![0, 2], node: 3, atom: 5 },
            Move::Transform { net: 1, map: [(3, 0), (4, 0)].into() },
            Move::Amalgamate { left: 0, right: 2 },
        ];
        for m in moves {
            let text = m.to_string();
            let words: Vec<&str> = text.split_whitespace().collect();
            assert_eq!(parse_move(&words), Some(m));
        }
    }

    #[test]
    fn target_inserts_node() {
        let m = Move::Cylindrify { net: 0, index: 1, face: vec![0, 2], node: 3, atom: 5 };
        assert_eq!(m.target(), Some(vec![0, 3, 2]));
    }
}
