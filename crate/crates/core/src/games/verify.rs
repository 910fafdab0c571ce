use std::collections::BTreeSet;

use crate::algebra::CylAtomStructure;
use crate::{Error, Result, ValidationReport};

use super::fgame::{all_f_openings, all_f_responses, legal_f_moves, legal_f_response, network_key, renamed};
use super::network::is_atomic_network;
use super::result::{CertResponse, Certificate, GameKind, Move, Player};
use super::Network;

/// Replays a certificate move by move, independently of the search that
/// produced it. For an existential win every universal move at every
/// position must be answered legally; for a universal win the recorded
/// move must be legal and every legal response must be covered.
pub fn verify_certificate(s: &CylAtomStructure, cert: &Certificate) -> Result<ValidationReport> {
    if cert.dim != s.dim() {
        return Err(Error::InvalidParams(format!(
            "certificate is for dimension {}, structure has {}",
            cert.dim,
            s.dim()
        )));
    }
    let mut r = ValidationReport::new(format!("certificate for {}", s.name()), "replay");
    r.note(format!("winner={} rounds={} positions={}", cert.winner, cert.rounds, cert.positions.len()));
    match cert.kind {
        GameKind::F { m } => verify_f(s, cert, m, &mut r),
        GameKind::H { .. } => super::hgame::verify_h(s, cert, &mut r)?,
    }
    Ok(r)
}

fn atomic(s: &CylAtomStructure, n: &Network) -> std::result::Result<(), String> {
    match is_atomic_network(s, n) {
        Ok(v) if v.is_valid() => Ok(()),
        Ok(v) => Err(v.violations[0].witness.clone()),
        Err(e) => Err(e.to_string()),
    }
}

fn verify_f(s: &CylAtomStructure, cert: &Certificate, m: usize, r: &mut ValidationReport) {
    for c in ["atomic-network", "opening", "move-coverage", "response-legal", "response-coverage", "child-link", "leaf"]
    {
        r.clause(c);
    }
    let mut nets: Vec<Option<&Network>> = Vec::with_capacity(cert.positions.len());
    for (i, p) in cert.positions.iter().enumerate() {
        match p.history.as_slice() {
            [h] if h.hyperlabels().next().is_none() && h.nodes().iter().all(|&x| x < m) => {
                if let Err(w) = atomic(s, &h.network) {
                    r.violate("atomic-network", format!("p{i}: {w}"));
                }
                nets.push(Some(&h.network));
            }
            _ => {
                r.violate("atomic-network", format!("p{i}: expected one network on nodes below {m}"));
                nets.push(None);
            }
        }
    }
    let link = |r: &mut ValidationReport, from: &str, resp: &CertResponse, left: usize| {
        let child = cert.positions.get(resp.child);
        let ok = child.is_some_and(|c| {
            c.left == left
                && c.history.len() == 1
                && renamed(&resp.network.network, &resp.renaming).is_some_and(|n| n == c.history[0].network)
        });
        if !ok {
            r.violate("child-link", format!("{from}: response does not rename onto p{}", resp.child));
        }
    };
    let legal_opening = |n: &Network, atom: usize| {
        n.node_count() <= s.dim() && n.nodes().iter().all(|&x| x < m) && n.labels().any(|(_, a)| a == atom)
    };

    match cert.winner {
        Player::Exists => {
            for atom in 0..s.atom_count() {
                let Some(o) = cert.openings.iter().find(|o| o.atom == atom) else {
                    r.violate("opening", format!("atom {atom} is not answered"));
                    continue;
                };
                r.instances += 1;
                let [resp] = o.responses.as_slice() else {
                    r.violate("opening", format!("atom {atom}: expected one response"));
                    continue;
                };
                let n = &resp.network.network;
                if let Err(w) = atomic(s, n) {
                    r.violate("atomic-network", format!("opening {atom}: {w}"));
                } else if !legal_opening(n, atom) {
                    r.violate("opening", format!("atom {atom}: {n} is not a legal opening"));
                }
                link(r, &format!("opening {atom}"), resp, cert.rounds);
            }
        }
        Player::Forall => match cert.openings.as_slice() {
            [o] if o.atom < s.atom_count() => {
                r.instances += 1;
                let listed: BTreeSet<Vec<u32>> =
                    o.responses.iter().filter_map(|x| network_key(&x.network.network, m)).collect();
                for key in all_f_openings(s, m, o.atom) {
                    if !listed.contains(&key) {
                        r.violate("opening", format!("atom {}: a legal opening is not covered", o.atom));
                        break;
                    }
                }
                for resp in &o.responses {
                    let n = &resp.network.network;
                    if atomic(s, n).is_err() || !legal_opening(n, o.atom) {
                        r.violate("opening", format!("atom {}: {n} is not a legal opening", o.atom));
                    }
                    link(r, &format!("opening {}", o.atom), resp, cert.rounds);
                }
            }
            _ => r.violate("opening", "expected exactly one universal opening"),
        },
    }

    for (i, p) in cert.positions.iter().enumerate() {
        let Some(n) = nets[i] else { continue };
        if p.left == 0 {
            if !p.edges.is_empty() || cert.winner == Player::Forall {
                r.violate("leaf", format!("p{i}: play continues after the last round"));
            }
            continue;
        }
        let fresh = (0..m).find(|x| !n.nodes().contains(x));
        match cert.winner {
            Player::Exists => {
                for mv in legal_f_moves(s, n, m) {
                    r.instances += 1;
                    let mv = normalize(mv, n, fresh);
                    let Some(e) = p.edges.iter().find(|e| e.mv == mv) else {
                        r.violate("move-coverage", format!("p{i}: {mv} is not answered"));
                        continue;
                    };
                    let [resp] = e.responses.as_slice() else {
                        r.violate("response-legal", format!("p{i}: {mv}: expected one response"));
                        continue;
                    };
                    check_response(s, r, i, n, &mv, resp);
                    link(r, &format!("p{i} {mv}"), resp, p.left - 1);
                }
            }
            Player::Forall => {
                let [e] = p.edges.as_slice() else {
                    r.violate("move-coverage", format!("p{i}: expected exactly one universal move"));
                    continue;
                };
                r.instances += 1;
                if !legal_f_moves(s, n, m).contains(&e.mv) {
                    r.violate("move-coverage", format!("p{i}: {} is not a legal move", e.mv));
                    continue;
                }
                for resp in &e.responses {
                    check_response(s, r, i, n, &e.mv, resp);
                    link(r, &format!("p{i} {}", e.mv), resp, p.left - 1);
                }
                let listed: BTreeSet<Vec<u32>> =
                    e.responses.iter().filter_map(|x| network_key(&x.network.network, m)).collect();
                match all_f_responses(s, n, &e.mv, m) {
                    Ok(all) => {
                        if let Some(miss) = all.iter().find(|x| network_key(x, m).is_none_or(|k| !listed.contains(&k)))
                        {
                            r.violate("response-coverage", format!("p{i}: {}: response {miss} is not covered", e.mv));
                        }
                    }
                    Err(_) => r.violate("response-coverage", format!("p{i}: could not enumerate responses")),
                }
            }
        }
    }
}

/// Fresh target nodes are interchangeable; the least one stands for all.
fn normalize(mv: Move, n: &Network, fresh: Option<usize>) -> Move {
    match mv {
        Move::Cylindrify { net, index, face, node, atom } if !n.nodes().contains(&node) => {
            Move::Cylindrify { net, index, face, node: fresh.unwrap_or(node), atom }
        }
        other => other,
    }
}

fn check_response(
    s: &CylAtomStructure,
    r: &mut ValidationReport,
    i: usize,
    n: &Network,
    mv: &Move,
    resp: &CertResponse,
) {
    let out = &resp.network;
    if out.hyperlabels().next().is_some() {
        r.violate("response-legal", format!("p{i}: {mv}: response carries hyperlabels"));
    } else if let Err(w) = atomic(s, &out.network) {
        r.violate("atomic-network", format!("p{i}: {mv}: {w}"));
    } else if !legal_f_response(n, mv, &out.network) {
        r.violate("response-legal", format!("p{i}: {mv}: {} is not a legal response", out.network));
    }
}
