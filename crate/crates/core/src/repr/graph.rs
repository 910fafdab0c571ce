use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::uf::{UfCalculus, UfLabel};
use crate::algebra::{Element, IndexSet, RuleFamily, SymbolicElement};
use crate::monk::{term_algebra_member, Cell, MonkAtom, MonkFamily, MonkParams};
use crate::{Error, Result, ValidationReport};

/// A complete graph on nodes `0..len` with a symmetric labelling of pairs
/// by ultrafilters of the Monk term algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredGraph {
    params: MonkParams,
    labels: Vec<Vec<UfLabel>>,
}

impl ColouredGraph {
    /// The one-node graph.
    pub fn singleton(p: &MonkParams) -> Result<Self> {
        UfCalculus::new(p)?;
        Ok(ColouredGraph { params: *p, labels: vec![vec![UfLabel::ID]] })
    }

    /// Builds a graph from a full label matrix. The matrix is taken as
    /// given; run [`ColouredGraph::triangle_scan`] to check it.
    pub fn from_labels(p: &MonkParams, labels: Vec<Vec<UfLabel>>) -> Result<Self> {
        let calc = UfCalculus::new(p)?;
        let n = labels.len();
        if labels.iter().any(|row| row.len() != n) {
            return Err(Error::Structural("label matrix is not square".into()));
        }
        for l in labels.iter().flatten() {
            calc.check(*l)?;
        }
        Ok(ColouredGraph { params: *p, labels })
    }

    pub fn params(&self) -> &MonkParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, x: usize, y: usize) -> UfLabel {
        self.labels[x][y]
    }

    /// Full scan: `Id` exactly on loops, symmetry, and every ordered
    /// triangle consistent.
    pub fn triangle_scan(&self) -> ValidationReport {
        let calc = UfCalculus::new(&self.params).expect("validated on construction");
        let n = self.len();
        let mut r = ValidationReport::new(format!("coloured graph on {n} nodes"), "exhaustive");
        r.clause("identity-loops");
        r.clause("symmetry");
        r.clause("triangle");
        for x in 0..n {
            for y in 0..n {
                let l = self.labels[x][y];
                if l.is_id() != (x == y) {
                    r.violate("identity-loops", format!("l({x},{y}) = {l}"));
                }
                if l != self.labels[y][x] {
                    r.violate("symmetry", format!("l({x},{y}) = {l} but l({y},{x}) = {}", self.labels[y][x]));
                }
                for z in 0..n {
                    r.instances += 1;
                    let (a, b, c) = (l, self.labels[x][z], self.labels[y][z]);
                    if !calc.consistent(a, b, c) {
                        r.violate("triangle", format!("({x},{y},{z}): ({a}, {b}, {c}) is inconsistent"));
                    }
                }
            }
        }
        r
    }

    fn extend_in_place(&mut self, calc: &UfCalculus, x: usize, y: usize, f: UfLabel, k: UfLabel) -> Result<usize> {
        let n = self.len();
        for v in [x, y] {
            if v >= n {
                return Err(Error::Index { index: v, dim: n });
            }
        }
        calc.check(f)?;
        calc.check(k)?;
        if f.is_id() || k.is_id() {
            return Err(Error::Precondition("the identity label belongs on loops only".into()));
        }
        let lxy = self.labels[x][y];
        if !calc.consistent(lxy, f, k) {
            return Err(Error::Precondition(format!("({lxy}, {f}, {k}) is not consistent")));
        }
        if x == y && f != k {
            return Err(Error::Precondition(format!("one node cannot carry both {f} and {k}")));
        }
        let mut row = Vec::with_capacity(n + 1);
        for p in 0..n {
            let l = if p == x {
                f
            } else if p == y {
                k
            } else {
                let (lx, ly) = (self.labels[x][p], self.labels[y][p]);
                let w = calc
                    .blocks
                    .iter()
                    .copied()
                    .map(UfLabel::Block)
                    .find(|&w| calc.consistent(w, f, lx) && calc.consistent(w, k, ly))
                    .ok_or_else(|| {
                        Error::Validation(format!(
                            "construction failure: no block label for the new node against node {p} ({f} with {lx}, {k} with {ly})"
                        ))
                    })?;
                w
            };
            row.push(l);
        }
        for (p, l) in row.iter().enumerate() {
            self.labels[p].push(*l);
        }
        row.push(UfLabel::ID);
        self.labels.push(row);
        Ok(n)
    }
}

impl fmt::Display for ColouredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph nodes={} {}", self.len(), self.params)?;
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                writeln!(f, "edge {x} {y} {}", self.labels[x][y])?;
            }
        }
        Ok(())
    }
}

/// Adds a node `z` with `l(z,x) = f`, `l(z,y) = k`, and against every other
/// node the first block label (in increasing bitmask order) keeping both new
/// triangles through `x` and `y` consistent.
pub fn extend_coloured_graph(gr: &ColouredGraph, x: usize, y: usize, f: UfLabel, k: UfLabel) -> Result<ColouredGraph> {
    let calc = UfCalculus::new(&gr.params)?;
    let mut out = gr.clone();
    out.extend_in_place(&calc, x, y, f, k)?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct GraphBuild {
    pub graph: ColouredGraph,
    /// Witness obligations met, by an existing node or a new one.
    pub discharged: usize,
    /// Whether an obligation was still open when the size bound stopped
    /// the construction.
    pub stopped_at_bound: bool,
}

/// Every ultrafilter except `U^Id`, principal ones restricted to indices
/// below the family's bound, in a fixed order.
fn obligation_labels(p: &MonkParams) -> Result<Vec<UfLabel>> {
    let fam = MonkFamily::new(*p)?;
    let mut out: Vec<UfLabel> = (1..fam.atom_count()).map(|a| UfLabel::Principal(fam.atom(a))).collect();
    out.extend(fam.blocks().iter().map(|&w| UfLabel::Block(w)));
    Ok(out)
}

/// Grows a consistent coloured graph from one node. Node pairs take turns
/// in order of creation; on its turn a pair `(x, y)` discharges its next
/// obligation `(F, K)` (consistent with `l(x,y)`), adding a witness node
/// when none exists. Stops when a new node would exceed `size`.
pub fn build_complete_graph(p: &MonkParams, size: usize) -> Result<GraphBuild> {
    if size == 0 {
        return Err(Error::InvalidParams("size must be at least 1".into()));
    }
    let calc = UfCalculus::new(p)?;
    let labels = obligation_labels(p)?;
    let count = labels.len();
    let mut g = ColouredGraph::singleton(p)?;
    let mut queue: VecDeque<(usize, usize, usize)> = VecDeque::from([(0, 0, 0)]);
    let mut discharged = 0;
    while let Some((x, y, start)) = queue.pop_front() {
        let lxy = g.label(x, y);
        let next = (start..count * count).find(|&c| calc.consistent(lxy, labels[c / count], labels[c % count]));
        let Some(c) = next else { continue };
        let (f, k) = (labels[c / count], labels[c % count]);
        let met = (0..g.len()).any(|z| g.label(z, x) == f && g.label(z, y) == k);
        if !met {
            if g.len() == size {
                return Ok(GraphBuild { graph: g, discharged, stopped_at_bound: true });
            }
            let z = g.extend_in_place(&calc, x, y, f, k)?;
            queue.extend((0..=z).map(|w| (w, z, 0)));
        }
        discharged += 1;
        queue.push_back((x, y, c + 1));
    }
    Ok(GraphBuild { graph: g, discharged, stopped_at_bound: false })
}

fn member(fam: &MonkFamily, x: &SymbolicElement, l: UfLabel) -> bool {
    match l {
        UfLabel::Principal(MonkAtom::Id) => x.points.contains(0),
        UfLabel::Principal(MonkAtom::Coloured { index, colour, block, copy }) => {
            let cell = fam.cell_of(Cell { colour, block, copy }).expect("checked label");
            x.cells[cell].contains(index)
        }
        UfLabel::Block(w) => fam.cells().iter().zip(&x.cells).any(|(c, s)| c.block == w && !s.is_finite()),
    }
}

/// `{(u, v) : X ∈ l(u, v)}` as a row-major bit matrix.
fn rep(fam: &MonkFamily, g: &ColouredGraph, x: &SymbolicElement) -> Vec<bool> {
    let n = g.len();
    (0..n * n).map(|i| member(fam, x, g.labels[i / n][i % n])).collect()
}

fn single_atom(fam: &MonkFamily, x: &SymbolicElement) -> Option<String> {
    let cells: Vec<usize> = (0..x.cells.len()).filter(|&i| !x.cells[i].is_empty()).collect();
    match (x.points.contains(0), cells.as_slice()) {
        (true, []) => Some("Id".into()),
        (false, [c]) => match &x.cells[*c] {
            IndexSet::Finite(s) if s.len() == 1 => {
                let cell = fam.cells()[*c];
                Some(format!("a{}.{}.{:b}", s.iter().next().unwrap(), cell.colour, cell.block))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Checks `rep(X) = {(u,v) : X ∈ l(u,v)}` on the finite graph: identity is
/// the diagonal, every `rep(X)` is symmetric, complements, unions and
/// intersections of sample elements are preserved, and
/// `rep(X);rep(Y) ⊆ rep(X;Y)` for every ordered pair from the sample.
pub fn rep_check(p: &MonkParams, gr: &ColouredGraph, sample: &[SymbolicElement]) -> Result<ValidationReport> {
    if gr.params != *p {
        return Err(Error::InvalidParams(format!("graph is over {}, not {p}", gr.params)));
    }
    let fam = MonkFamily::new(*p)?;
    let n = gr.len();
    let mut r = ValidationReport::new(format!("rep on {n} nodes over {p}"), "exhaustive on the sample");
    for c in ["term-algebra", "identity", "converse", "complement", "union", "intersection", "composition"] {
        r.clause(c);
    }
    let mut sample_ok = Vec::with_capacity(sample.len());
    for (i, x) in sample.iter().enumerate() {
        let shape = x.points.universe() == 1 && x.cells.len() == fam.cells().len();
        let ok = shape && term_algebra_member(p, &Element::from(x.clone()))?;
        if !ok {
            r.violate("term-algebra", format!("sample {i} is not in the term algebra"));
        }
        sample_ok.push(ok);
    }
    let sample: Vec<&SymbolicElement> = sample.iter().zip(&sample_ok).filter(|(_, ok)| **ok).map(|(x, _)| x).collect();
    let reps: Vec<Vec<bool>> = sample.iter().map(|x| rep(&fam, gr, x)).collect();

    let id = rep(&fam, gr, &fam.identity());
    r.instances += 1;
    if let Some(i) = (0..n * n).find(|&i| id[i] != (i / n == i % n)) {
        r.violate("identity", format!("rep(Id) differs from the diagonal at ({},{})", i / n, i % n));
    }
    for (s, (x, rx)) in sample.iter().zip(&reps).enumerate() {
        r.instances += 1;
        if let Some(i) = (0..n * n).find(|&i| rx[i] != rx[(i % n) * n + i / n]) {
            r.violate("converse", format!("sample {s}: rep not symmetric at ({},{})", i / n, i % n));
        }
        let rc = rep(&fam, gr, &x.complement());
        if let Some(i) = (0..n * n).find(|&i| rc[i] == rx[i]) {
            r.violate("complement", format!("sample {s}: rep(-X) and rep(X) agree at ({},{})", i / n, i % n));
        }
    }
    let mut composed = 0;
    for (a, (x, rx)) in sample.iter().zip(&reps).enumerate() {
        for (b, (y, ry)) in sample.iter().zip(&reps).enumerate() {
            r.instances += 1;
            let ru = rep(&fam, gr, &x.union(y));
            let ri = rep(&fam, gr, &x.intersection(y));
            if (0..n * n).any(|i| ru[i] != (rx[i] || ry[i])) {
                r.violate("union", format!("samples {a},{b}"));
            }
            if (0..n * n).any(|i| ri[i] != (rx[i] && ry[i])) {
                r.violate("intersection", format!("samples {a},{b}"));
            }
            let rxy = rep(&fam, gr, &fam.compose_symbolic(x, y)?);
            composed += 1;
            'outer: for u in 0..n {
                for v in (0..n).filter(|&v| rx[u * n + v]) {
                    for w in (0..n).filter(|&w| ry[v * n + w]) {
                        if !rxy[u * n + w] {
                            r.violate(
                                "composition",
                                format!("samples {a},{b}: ({u},{v}) in rep(X), ({v},{w}) in rep(Y), ({u},{w}) not in rep(X;Y)"),
                            );
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    r.note(format!("composition containment checked on {composed} ordered pairs"));
    for (s, (x, rx)) in sample.iter().zip(&reps).enumerate() {
        if let Some(name) = single_atom(&fam, x) {
            if !rx.iter().any(|&b| b) {
                r.note(format!("sample {s} (atom {name}) is not realized within {n} nodes"));
            }
        }
    }
    let mut unseparated = 0;
    for a in 0..sample.len() {
        for b in a + 1..sample.len() {
            if sample[a] != sample[b] && reps[a] == reps[b] {
                unseparated += 1;
            }
        }
    }
    if unseparated > 0 {
        r.note(format!("{unseparated} pairs of distinct samples are not separated within {n} nodes"));
    }
    Ok(r)
}

/// Seeded random members of the term algebra: inside each block every cell
/// is finite, or every cell is cofinite. Every fourth element is a single
/// atom below the family's bound.
pub fn sample_term_elements(p: &MonkParams, count: usize, seed: u64) -> Result<Vec<SymbolicElement>> {
    let fam = MonkFamily::new(*p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 2 * p.bound.max(2);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        if i % 4 == 3 {
            let cell = fam.cells()[rng.gen_range(0..fam.cells().len())];
            let atom = MonkAtom::Coloured {
                index: rng.gen_range(0..p.bound),
                colour: cell.colour,
                block: cell.block,
                copy: cell.copy,
            };
            out.push(fam.atom_element(atom)?);
            continue;
        }
        let mut x = SymbolicElement::empty(1, fam.cells().len());
        if rng.gen_bool(0.5) {
            x.points.insert(0);
        }
        for &w in fam.blocks() {
            let cofinite = rng.gen_bool(0.5);
            for (k, c) in fam.cells().iter().enumerate().filter(|(_, c)| c.block == w) {
                let _ = c;
                let picked: Vec<u64> = (0..span).filter(|_| rng.gen_bool(0.3)).collect();
                x.cells[k] = if cofinite { IndexSet::cofinite(picked) } else { IndexSet::finite(picked) };
            }
        }
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(index: u64, colour: usize, block: u64) -> UfLabel {
        UfLabel::Principal(MonkAtom::Coloured { index, colour, block, copy: 0 })
    }

    fn two_nodes(p: &MonkParams, a: UfLabel) -> ColouredGraph {
        ColouredGraph::from_labels(p, vec![vec![UfLabel::ID, a], vec![a, UfLabel::ID]]).unwrap()
    }

    #[test]
    fn single_node() {
        let p = MonkParams::standard(3);
        let b = build_complete_graph(&p, 1).unwrap();
        assert_eq!(b.graph.len(), 1);
        assert!(b.graph.triangle_scan().is_valid());
    }

    #[test]
    fn extension_keeps_triangles_consistent() {
        let p = MonkParams::standard(4);
        let a = atom(1, 0, 0b11);
        let g = two_nodes(&p, a);
        let calc = UfCalculus::new(&p).unwrap();
        let mut tried = 0;
        for f in obligation_labels(&p).unwrap().into_iter().step_by(7) {
            for k in obligation_labels(&p).unwrap().into_iter().step_by(11) {
                if !calc.consistent(a, f, k) {
                    continue;
                }
                let h = extend_coloured_graph(&g, 0, 1, f, k).unwrap();
                assert_eq!(h.len(), 3);
                assert_eq!((h.label(2, 0), h.label(2, 1)), (f, k));
                assert!(h.triangle_scan().is_valid(), "{f} {k}");
                tried += 1;
            }
        }
        assert!(tried > 20);
    }

    #[test]
    fn identity_extension_is_rejected() {
        let p = MonkParams::standard(4);
        let g = two_nodes(&p, atom(1, 0, 0b11));
        assert!(matches!(extend_coloured_graph(&g, 0, 1, UfLabel::ID, UfLabel::ID), Err(Error::Precondition(_))));
    }

    #[test]
    fn inconsistent_request_is_rejected() {
        let p = MonkParams::standard(4);
        let g = two_nodes(&p, atom(0, 0, 0b11));
        // 0, 1, 3 are not evenly distributed and the blocks share colour 0
        let r = extend_coloured_graph(&g, 0, 1, atom(1, 1, 0b11), atom(3, 0, 0b11));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn extension_never_relabels() {
        let p = MonkParams::standard(4);
        let g = build_complete_graph(&p, 6).unwrap().graph;
        let h = extend_coloured_graph(&g, 2, 4, UfLabel::Block(0b11), UfLabel::Block(0b1100)).unwrap();
        for x in 0..g.len() {
            for y in 0..g.len() {
                assert_eq!(g.label(x, y), h.label(x, y));
            }
        }
    }

    #[test]
    fn built_graphs_are_consistent_and_discharge_monotonically() {
        let p = MonkParams::standard(4);
        let mut last = 0;
        for size in 1..=10 {
            let b = build_complete_graph(&p, size).unwrap();
            assert_eq!(b.graph.len(), size);
            assert!(b.graph.triangle_scan().is_valid());
            assert!(b.discharged >= last);
            last = b.discharged;
        }
    }

    #[test]
    fn rep_of_identity_is_the_diagonal() {
        let p = MonkParams::standard(3);
        let g = build_complete_graph(&p, 8).unwrap().graph;
        let sample = sample_term_elements(&p, 8, 7).unwrap();
        let r = rep_check(&p, &g, &sample).unwrap();
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn broken_graph_fails_composition() {
        let p = MonkParams::standard(3);
        let (a, b, c) = (atom(0, 0, 0b11), atom(1, 1, 0b11), atom(3, 0, 0b11));
        let g = ColouredGraph::from_labels(
            &p,
            vec![vec![UfLabel::ID, a, c], vec![a, UfLabel::ID, b], vec![c, b, UfLabel::ID]],
        )
        .unwrap();
        assert!(g.triangle_scan().violated("triangle"));
        let fam = MonkFamily::new(p).unwrap();
        let sample: Vec<SymbolicElement> = [a, b]
            .iter()
            .map(|l| match l {
                UfLabel::Principal(m) => fam.atom_element(*m).unwrap(),
                _ => unreachable!(),
            })
            .collect();
        let r = rep_check(&p, &g, &sample).unwrap();
        assert!(r.violated("composition"));
    }

    #[test]
    fn samples_are_term_elements() {
        let p = MonkParams::standard(3);
        for x in sample_term_elements(&p, 30, 1).unwrap() {
            assert!(term_algebra_member(&p, &Element::from(x)).unwrap());
        }
    }
}
