use std::collections::{HashMap, HashSet};

use crate::algebra::{CylAtomStructure, RelAtomStructure};
use crate::{AtomSet, Budget, Error, Result, ValidationReport};

use super::network::Network;

/// An `n x n` matrix of atoms, row-major.
type Matrix = Vec<usize>;

fn matrix_of(net: &Network, n: usize) -> Result<Matrix> {
    if net.arity() != 2 || net.nodes().iter().copied().ne(0..n) {
        return Err(Error::InvalidParams(format!("expected a 2-ary network on nodes 0..{n}")));
    }
    let mut m = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] =
                net.label(&[i, j]).ok_or_else(|| Error::Structural(format!("entry ({i},{j}) is unlabelled")))?;
        }
    }
    Ok(m)
}

fn network_of(m: &[usize], n: usize) -> Network {
    let mut net = Network::new(2, 0..n);
    for i in 0..n {
        for j in 0..n {
            net.set(vec![i, j], m[i * n + j]).expect("arity 2");
        }
    }
    net
}

/// Whether `net` is an `n`-node basic matrix over `s`: identity atoms on
/// the diagonal, `m_ji` the converse of `m_ij`, and every triangle
/// `(m_ik, m_kj, m_ij)` consistent.
pub fn is_basic_matrix(s: &RelAtomStructure, net: &Network, n: usize) -> bool {
    let Ok(m) = matrix_of(net, n) else { return false };
    if m.iter().any(|&a| a >= s.atom_count()) {
        return false;
    }
    (0..n).all(|i| s.is_identity(m[i * n + i]))
        && (0..n).all(|i| (0..n).all(|j| m[j * n + i] == s.converse(m[i * n + j])))
        && (0..n).all(|i| (0..n).all(|k| (0..n).all(|j| s.is_consistent(m[i * n + k], m[k * n + j], m[i * n + j]))))
}

/// All `n x n` basic matrices over `s`, in lexicographic order of their
/// row-major entries.
///
/// With `atom_bound = Some(t)` only atoms with index below `t` are used;
/// this is how a rule-backed structure is truncated. The search charges
/// one node of `budget` per partial matrix and fails with
/// [`Error::CapExceeded`] when it runs out.
pub fn basic_matrices(
    s: &RelAtomStructure,
    n: usize,
    atom_bound: Option<usize>,
    budget: &Budget,
) -> Result<Vec<Network>> {
    Ok(basic_matrix_table(s, n, atom_bound, budget)?.iter().map(|m| network_of(m, n)).collect())
}

fn basic_matrix_table(
    s: &RelAtomStructure,
    n: usize,
    atom_bound: Option<usize>,
    budget: &Budget,
) -> Result<Vec<Matrix>> {
    if n == 0 {
        return Err(Error::InvalidParams("matrix dimension must be positive".into()));
    }
    let atoms = atom_bound.map_or(s.atom_count(), |t| t.min(s.atom_count()));
    let allowed: Vec<usize> = (0..atoms).filter(|&a| s.converse(a) < atoms).collect();
    // cells in the order they are filled: node j's diagonal, then column j
    let mut cells = Vec::new();
    for j in 0..n {
        cells.push((j, j));
        for i in 0..j {
            cells.push((i, j));
        }
    }
    let meter = budget.meter();
    let mut out = Vec::new();
    let mut m = vec![usize::MAX; n * n];
    fill(s, n, &allowed, &cells, 0, &mut m, &meter, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fill(
    s: &RelAtomStructure,
    n: usize,
    allowed: &[usize],
    cells: &[(usize, usize)],
    at: usize,
    m: &mut Matrix,
    meter: &crate::budget::Meter,
    out: &mut Vec<Matrix>,
) -> Result<()> {
    if !meter.tick() {
        return Err(Error::CapExceeded(format!(
            "basic matrix search exceeded its budget ({}) after {} partial matrices",
            meter.budget().describe(),
            meter.used()
        )));
    }
    if at == cells.len() {
        out.push(m.clone());
        return Ok(());
    }
    let (i, j) = cells[at];
    for &a in allowed {
        if i == j && !s.is_identity(a) {
            continue;
        }
        m[i * n + j] = a;
        m[j * n + i] = s.converse(a);
        if triangles_ok(s, n, m, i, j) {
            fill(s, n, allowed, cells, at + 1, m, meter, out)?;
        }
    }
    m[i * n + j] = usize::MAX;
    m[j * n + i] = usize::MAX;
    Ok(())
}

// every fully assigned triangle through the entry (i, j) or (j, i)
fn triangles_ok(s: &RelAtomStructure, n: usize, m: &Matrix, i: usize, j: usize) -> bool {
    let get = |x: usize, y: usize| m[x * n + y];
    let known = |x: usize, y: usize| get(x, y) != usize::MAX;
    for &(p, q) in &[(i, j), (j, i)] {
        for k in 0..n {
            // (p,q) as the composite: (m_pk, m_kq, m_pq)
            if known(p, k) && known(k, q) && !s.is_consistent(get(p, k), get(k, q), get(p, q)) {
                return false;
            }
            // (p,q) as the first factor: (m_pq, m_qk, m_pk)
            if known(q, k) && known(p, k) && !s.is_consistent(get(p, q), get(q, k), get(p, k)) {
                return false;
            }
            // (p,q) as the second factor: (m_kp, m_pq, m_kq)
            if known(k, p) && known(k, q) && !s.is_consistent(get(k, p), get(p, q), get(k, q)) {
                return false;
            }
        }
    }
    true
}

fn matrix_name(s: &RelAtomStructure, m: &[usize], n: usize) -> String {
    let rows: Vec<String> =
        (0..n).map(|i| (0..n).map(|j| s.atom_name(m[i * n + j])).collect::<Vec<_>>().join(",")).collect();
    format!("[{}]", rows.join("/"))
}

fn key_off(m: &[usize], n: usize, off: &[usize]) -> Vec<usize> {
    let mut k = Vec::with_capacity(n * n);
    for x in (0..n).filter(|x| !off.contains(x)) {
        for y in (0..n).filter(|y| !off.contains(y)) {
            k.push(m[x * n + y]);
        }
    }
    k
}

/// The cylindric atom structure whose atoms are the given `n x n` basic
/// matrices: `D[i][j]` holds the matrices with an identity atom at
/// `(i, j)`, `M ≡_i N` iff they agree off node `i`, and `M ≡_ij N` iff `N`
/// is `M` with nodes `i` and `j` exchanged.
pub fn matrix_structure(s: &RelAtomStructure, matrices: &[Network], n: usize) -> Result<CylAtomStructure> {
    let table: Vec<Matrix> = matrices.iter().map(|net| matrix_of(net, n)).collect::<Result<_>>()?;
    if table.is_empty() {
        return Err(Error::Structural("no matrices".into()));
    }
    let count = table.len();
    let index: HashMap<&Matrix, usize> = table.iter().enumerate().map(|(k, m)| (m, k)).collect();
    if index.len() != count {
        return Err(Error::Structural("duplicate matrices".into()));
    }
    let names: Vec<String> = table.iter().map(|m| matrix_name(s, m, n)).collect();
    let diag = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            AtomSet::from_atoms(count, (0..count).filter(|&k| s.is_identity(table[k][i * n + j])))
        })
        .collect();
    let equiv = (0..n)
        .map(|i| {
            let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
            for (k, m) in table.iter().enumerate() {
                groups.entry(key_off(m, n, &[i])).or_default().push(k);
            }
            (0..count)
                .map(|k| AtomSet::from_atoms(count, groups[&key_off(&table[k], n, &[i])].iter().copied()))
                .collect()
        })
        .collect();
    let mut swap = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let mut rows = Vec::with_capacity(count);
            for m in &table {
                let sigma = |x: usize| {
                    if x == i {
                        j
                    } else if x == j {
                        i
                    } else {
                        x
                    }
                };
                let t: Matrix = (0..n * n).map(|xy| m[sigma(xy / n) * n + sigma(xy % n)]).collect();
                rows.push(match index.get(&t) {
                    Some(&k) => AtomSet::singleton(count, k),
                    None => AtomSet::empty(count),
                });
            }
            swap[i * n + j] = rows;
        }
    }
    CylAtomStructure::from_parts(format!("B{n}({})", s.name()), n, names, diag, equiv, Some(swap))
}

/// The `n`-node network over [`matrix_structure`] induced by a basic
/// matrix `m`: the tuple `δ` is labelled by the matrix `(x, y) ↦ m(δx, δy)`.
pub fn matrix_network(s: &RelAtomStructure, b: &CylAtomStructure, m: &Network, n: usize) -> Result<Network> {
    let mat = matrix_of(m, n)?;
    let mut out = Network::new(n, 0..n);
    let mut delta = vec![0usize; n];
    loop {
        let pulled: Matrix = (0..n * n).map(|xy| mat[delta[xy / n] * n + delta[xy % n]]).collect();
        let name = matrix_name(s, &pulled, n);
        let atom =
            b.atom_index(&name).ok_or_else(|| Error::Structural(format!("{name} is not an atom of {}", b.name())))?;
        out.set(delta.clone(), atom)?;
        let mut p = n;
        loop {
            if p == 0 {
                return Ok(out);
            }
            p -= 1;
            delta[p] += 1;
            if delta[p] < n {
                break;
            }
            delta[p] = 0;
        }
    }
}

/// Checks whether `set` is an `n`-dimensional cylindric basis for `s`:
///
/// - `atom-coverage`: every atom is some `N(0,1)`;
/// - `substitution-witness`: whenever `N(x,y) ≤ a;b` and `z ∉ {x,y}`, some
///   `M ≡_z N` has `M(x,z) = a` and `M(z,y) = b`;
/// - `amalgamation`: `M ≡_xy N` with `x ≠ y` gives some `L` with
///   `M ≡_x L ≡_y N`.
pub fn cylindric_basis_check(s: &RelAtomStructure, set: &[Network], n: usize) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(format!("{} matrices over {}", set.len(), s.name()), "exhaustive");
    r.clause("members");
    r.clause("atom-coverage");
    r.clause("substitution-witness");
    r.clause("amalgamation");
    let mut table = Vec::with_capacity(set.len());
    for net in set {
        if !is_basic_matrix(s, net, n) {
            r.violate("members", format!("not a basic matrix: {net}"));
            continue;
        }
        table.push(matrix_of(net, n)?);
    }
    let name = |m: &Matrix| matrix_name(s, m, n);
    let atoms = s.atom_count();

    if n >= 2 {
        let covered: HashSet<usize> = table.iter().map(|m| m[1]).collect();
        for a in (0..atoms).filter(|a| !covered.contains(a)) {
            r.violate("atom-coverage", format!("no matrix has N(0,1) = {}", s.atom_name(a)));
        }
    }

    for z in 0..n {
        let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (k, m) in table.iter().enumerate() {
            groups.entry(key_off(m, n, &[z])).or_default().push(k);
        }
        for m in &table {
            let candidates = &groups[&key_off(m, n, &[z])];
            for x in (0..n).filter(|&x| x != z) {
                for y in (0..n).filter(|&y| y != z) {
                    r.instances += 1;
                    let have: HashSet<(usize, usize)> =
                        candidates.iter().map(|&k| (table[k][x * n + z], table[k][z * n + y])).collect();
                    let target = m[x * n + y];
                    'pairs: for a in 0..atoms {
                        for b in 0..atoms {
                            if s.comp(a, b).contains(target) && !have.contains(&(a, b)) {
                                r.violate(
                                    "substitution-witness",
                                    format!(
                                        "N={} x={x} y={y} z={z}: N(x,y) <= {};{} but no M ≡_z N has M(x,z)={}, M(z,y)={}",
                                        name(m),
                                        s.atom_name(a),
                                        s.atom_name(b),
                                        s.atom_name(a),
                                        s.atom_name(b)
                                    ),
                                );
                                break 'pairs;
                            }
                        }
                    }
                }
            }
        }
    }

    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            let pairs: HashSet<(Vec<usize>, Vec<usize>)> =
                table.iter().map(|l| (key_off(l, n, &[x]), key_off(l, n, &[y]))).collect();
            let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
            for (k, m) in table.iter().enumerate() {
                groups.entry(key_off(m, n, &[x, y])).or_default().push(k);
            }
            let mut keys: Vec<&Vec<usize>> = groups.keys().collect();
            keys.sort();
            for key in keys {
                let group = &groups[key];
                'group: for &p in group {
                    let kx = key_off(&table[p], n, &[x]);
                    for &q in group {
                        r.instances += 1;
                        if !pairs.contains(&(kx.clone(), key_off(&table[q], n, &[y]))) {
                            r.violate(
                                "amalgamation",
                                format!(
                                    "M={} N={} x={x} y={y}: no L with M ≡_x L ≡_y N",
                                    name(&table[p]),
                                    name(&table[q])
                                ),
                            );
                            break 'group;
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::network::is_atomic_network;
    use crate::graphalg::{alpha_of_graph, Graph};
    use crate::monk::{build_monk, MonkParams};

    #[test]
    fn one_atom_has_one_matrix() {
        let s = RelAtomStructure::one_atom();
        let m = basic_matrices(&s, 2, None, &Budget::unlimited()).unwrap();
        assert_eq!(m.len(), 1);
        assert!(cylindric_basis_check(&s, &m, 2).unwrap().is_valid());
    }

    // direct scan over all labellings of the off-diagonal upper triangle
    fn brute_count(s: &RelAtomStructure, n: usize) -> usize {
        let atoms = s.atom_count();
        let ids: Vec<usize> = (0..atoms).filter(|&a| s.is_identity(a)).collect();
        let upper: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut count = 0;
        let total_upper = atoms.pow(upper.len() as u32);
        let total_diag = ids.len().pow(n as u32);
        for code in 0..total_upper {
            for dcode in 0..total_diag {
                let mut m = vec![0; n * n];
                let (mut c, mut d) = (code, dcode);
                for &(i, j) in &upper {
                    m[i * n + j] = c % atoms;
                    m[j * n + i] = s.converse(c % atoms);
                    c /= atoms;
                }
                for i in 0..n {
                    m[i * n + i] = ids[d % ids.len()];
                    d /= ids.len();
                }
                let ok = (0..n)
                    .all(|i| (0..n).all(|k| (0..n).all(|j| s.is_consistent(m[i * n + k], m[k * n + j], m[i * n + j]))));
                if ok {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn alpha_k2_count_matches_brute_force() {
        let s = alpha_of_graph(&Graph::complete(2), 3).unwrap();
        let m = basic_matrices(&s, 3, None, &Budget::unlimited()).unwrap();
        assert_eq!(m.len(), brute_count(&s, 3));
        assert!(m.iter().all(|net| is_basic_matrix(&s, net, 3)));
    }

    #[test]
    fn monk_truncation_has_matrices() {
        let s = build_monk(&MonkParams::standard(2)).unwrap();
        let m = basic_matrices(&s, 3, Some(s.atom_count()), &Budget::unlimited()).unwrap();
        assert!(!m.is_empty());
    }

    #[test]
    fn blow_up_is_refused() {
        let s = alpha_of_graph(&Graph::complete(3), 3).unwrap();
        let r = basic_matrices(&s, 4, None, &Budget::nodes(50));
        assert!(matches!(r, Err(Error::CapExceeded(_))));
    }

    #[test]
    fn closed_under_node_permutations() {
        let s = alpha_of_graph(&Graph::complete(2), 3).unwrap();
        let n = 3;
        let set = basic_matrix_table(&s, n, None, &Budget::unlimited()).unwrap();
        let all: HashSet<&Matrix> = set.iter().collect();
        for sigma in [[1, 0, 2], [0, 2, 1], [2, 0, 1]] {
            for m in &set {
                let t: Matrix = (0..n * n).map(|xy| m[sigma[xy / n] * n + sigma[xy % n]]).collect();
                assert!(all.contains(&t));
            }
        }
    }

    #[test]
    fn lifted_matrices_are_atomic_networks() {
        let s = alpha_of_graph(&Graph::complete(2), 3).unwrap();
        let set = basic_matrices(&s, 3, None, &Budget::unlimited()).unwrap();
        let b = matrix_structure(&s, &set, 3).unwrap();
        assert!(crate::algebra::validate_cyl_structure(&b).is_valid());
        for m in &set {
            let net = matrix_network(&s, &b, m, 3).unwrap();
            assert!(is_atomic_network(&b, &net).unwrap().is_valid(), "{m}");
        }
    }

    #[test]
    fn deleting_a_matrix_can_break_amalgamation() {
        let s = alpha_of_graph(&Graph::complete(2), 3).unwrap();
        let set = basic_matrices(&s, 3, None, &Budget::unlimited()).unwrap();
        let full = cylindric_basis_check(&s, &set, 3).unwrap();
        assert!(!full.violated("amalgamation"), "{full}");
        let broke = (0..set.len()).find_map(|k| {
            let mut less = set.clone();
            less.remove(k);
            let r = cylindric_basis_check(&s, &less, 3).unwrap();
            r.violated("amalgamation").then_some(r)
        });
        let r = broke.expect("some deletion breaks amalgamation");
        let v = r.violations.iter().find(|v| v.clause == "amalgamation").unwrap();
        assert!(v.witness.starts_with("M=[") && v.witness.contains(" N=["));
    }
}
