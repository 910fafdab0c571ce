//! Randomized laws over generated structures, graphs and elements.

use std::sync::OnceLock;

use atomlab_core::algebra::{ca_cylindrify, ca_substitute, CylAtomStructure, Element, RelAtomStructure};
use atomlab_core::graphalg::{alpha_of_graph, chromatic_number, clique_number, eta_of_graph, Graph};
use atomlab_core::monk::{build_maddux, MonkFamily, MonkParams};
use atomlab_core::repr::{extend_coloured_graph, ColouredGraph, UfLabel};
use atomlab_core::AtomSet;
use proptest::prelude::*;

fn rel_corpus() -> &'static [RelAtomStructure] {
    static C: OnceLock<Vec<RelAtomStructure>> = OnceLock::new();
    C.get_or_init(|| {
        vec![
            RelAtomStructure::one_atom(),
            build_maddux(1).unwrap(),
            build_maddux(2).unwrap(),
            build_maddux(3).unwrap(),
            alpha_of_graph(&Graph::complete(2), 2).unwrap(),
            alpha_of_graph(&Graph::complete(3), 2).unwrap(),
            alpha_of_graph(&Graph::path(3), 2).unwrap(),
        ]
    })
}

fn cyl_corpus() -> &'static [CylAtomStructure] {
    static C: OnceLock<Vec<CylAtomStructure>> = OnceLock::new();
    C.get_or_init(|| {
        vec![
            CylAtomStructure::cartesian(2, 2).unwrap(),
            CylAtomStructure::cartesian(3, 2).unwrap(),
            eta_of_graph(&Graph::new(1), 3).unwrap(),
            eta_of_graph(&Graph::complete(2), 3).unwrap(),
        ]
    })
}

fn subset(n: usize, bits: &[bool]) -> AtomSet {
    AtomSet::from_atoms(n, (0..n).filter(|&a| bits[a % bits.len()] ^ (a / bits.len() % 2 == 1)))
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    let mut g = Graph::new(n);
    for &(u, v) in edges {
        if u % n != v % n {
            g.add_edge(u % n, v % n).unwrap();
        }
    }
    g
}

fn bits() -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), 1..24)
}

/// `(X;Y)·Z ≠ 0` iff `(X˘;Z)·Y ≠ 0`.
fn peircean(s: &RelAtomStructure, x: &AtomSet, y: &AtomSet, z: &AtomSet) -> bool {
    s.compose_sets(x, y).intersects(z) == s.compose_sets(&s.converse_set(x), z).intersects(y)
}

#[test]
fn peircean_law_on_all_elements_of_small_structures() {
    for s in rel_corpus().iter().filter(|s| s.atom_count() <= 5) {
        let n = s.atom_count();
        let all: Vec<AtomSet> = (0..1u64 << n).map(|m| AtomSet::from_mask(n, m)).collect();
        for x in &all {
            for y in &all {
                let xy = s.compose_sets(x, y);
                let xc = s.converse_set(x);
                for z in &all {
                    assert_eq!(xy.intersects(z), s.compose_sets(&xc, z).intersects(y), "{}: {x} {y} {z}", s.name());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn peircean_law_on_sampled_elements(k in 0usize..7, a in bits(), b in bits(), c in bits()) {
        let s = &rel_corpus()[k];
        let n = s.atom_count();
        prop_assert!(peircean(s, &subset(n, &a), &subset(n, &b), &subset(n, &c)));
    }

    #[test]
    fn cylindrification_is_additive(k in 0usize..4, i in 0usize..3, parts in proptest::collection::vec(bits(), 1..5)) {
        let s = &cyl_corpus()[k];
        let i = i % s.dim();
        let n = s.atom_count();
        let mut union = AtomSet::empty(n);
        let mut images = AtomSet::empty(n);
        for p in &parts {
            let x = subset(n, p);
            union.union_with(&x);
            images.union_with(&s.cylindrify(i, &x).unwrap());
        }
        prop_assert_eq!(s.cylindrify(i, &union).unwrap(), images.clone());
        let e = ca_cylindrify(s, i, &Element::Explicit(union)).unwrap();
        prop_assert_eq!(e.as_explicit(), Some(&images));
    }

    #[test]
    fn substitution_is_cylindrified_meet_with_diagonal(k in 0usize..4, i in 0usize..3, j in 0usize..3, b in bits()) {
        let s = &cyl_corpus()[k];
        let (i, j) = (i % s.dim(), j % s.dim());
        let x = subset(s.atom_count(), &b);
        let direct = s.substitute(i, j, &x).unwrap();
        if i == j {
            prop_assert_eq!(direct.clone(), x.clone());
        } else {
            prop_assert_eq!(direct.clone(), s.cylindrify(j, &x.intersection(&s.diagonal(i, j).unwrap())).unwrap());
        }
        let e = ca_substitute(s, i, j, &Element::Explicit(x)).unwrap();
        prop_assert_eq!(e.as_explicit(), Some(&direct));
    }

    #[test]
    fn alpha_table_is_symmetric(n in 1usize..5, edges in proptest::collection::vec((0usize..5, 0usize..5), 0..8), colours in 2usize..4) {
        let s = alpha_of_graph(&graph(n, &edges), colours).unwrap();
        let m = s.atom_count();
        for a in 0..m {
            for b in 0..m {
                for c in s.comp(a, b).iter() {
                    for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                        prop_assert!(s.is_consistent(x, y, z), "({a},{b},{c}) but not ({x},{y},{z})");
                    }
                }
            }
        }
    }

    #[test]
    fn eta_grows_with_edges(n in 1usize..4, edges in proptest::collection::vec((0usize..4, 0usize..4), 0..4), extra in (0usize..4, 0usize..4)) {
        let g = graph(n, &edges);
        let mut h = g.clone();
        let (u, v) = (extra.0 % n, extra.1 % n);
        if u != v && !h.has_edge(u, v) {
            h.add_edge(u, v).unwrap();
        }
        prop_assert!(eta_of_graph(&g, 3).unwrap().atom_count() <= eta_of_graph(&h, 3).unwrap().atom_count());
    }

    #[test]
    fn chromatic_number_bounds_clique_number(n in 1usize..9, edges in proptest::collection::vec((0usize..9, 0usize..9), 0..20)) {
        let g = graph(n, &edges);
        let c = chromatic_number(&g).unwrap();
        prop_assert!(c.is_proper(&g));
        prop_assert!(c.colours >= clique_number(&g).unwrap());
    }

    #[test]
    fn monk_consistency_is_symmetric(a in 0usize..10_000, b in 0usize..10_000, c in 0usize..10_000) {
        let fam = MonkFamily::new(MonkParams::standard(4)).unwrap();
        let n = fam.atom_count();
        let (a, b, c) = (fam.atom(a % n), fam.atom(b % n), fam.atom(c % n));
        let p = fam.params();
        let v = atomlab_core::monk::monk_consistent(p, a, b, c).unwrap();
        for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            prop_assert_eq!(atomlab_core::monk::monk_consistent(p, x, y, z).unwrap(), v);
        }
    }

    #[test]
    fn extended_coloured_graphs_stay_consistent(steps in proptest::collection::vec((any::<usize>(), any::<usize>(), any::<usize>(), any::<usize>()), 1..8)) {
        let p = MonkParams::standard(3);
        let fam = MonkFamily::new(p).unwrap();
        let mut labels: Vec<UfLabel> = (1..fam.atom_count()).map(|a| UfLabel::Principal(fam.atom(a))).collect();
        labels.extend(fam.blocks().iter().map(|&w| UfLabel::Block(w)));
        let first = labels[steps[0].2 % labels.len()];
        let mut gr = extend_coloured_graph(&ColouredGraph::singleton(&p).unwrap(), 0, 0, first, first).unwrap();
        for (x, y, f, k) in steps {
            let (x, y) = (x % gr.len(), y % gr.len());
            if let Ok(next) = extend_coloured_graph(&gr, x, y, labels[f % labels.len()], labels[k % labels.len()]) {
                prop_assert!(next.triangle_scan().is_valid(), "{next}");
                prop_assert_eq!(next.len(), gr.len() + 1);
                gr = next;
            }
        }
    }
}
