#![allow(dead_code)]

use atomlab_core::algebra::{CylAtomStructure, RelAtomStructure};
use atomlab_core::games::{basic_matrices, matrix_structure};
use atomlab_core::graphalg::{eta_of_graph, Graph};
use atomlab_core::monk::build_maddux;
use atomlab_core::Budget;

/// The cylindric structure of all 3-node basic matrices over `s`.
pub fn matrices3(s: &RelAtomStructure) -> CylAtomStructure {
    let m = basic_matrices(s, 3, None, &Budget::unlimited()).unwrap();
    matrix_structure(s, &m, 3).unwrap()
}

/// Agrees off the first coordinate only with itself, so a cylindrifier
/// demand for the other atom can never be met.
pub fn rigid() -> CylAtomStructure {
    CylAtomStructure::from_fns(
        "rigid",
        2,
        vec!["d".into(), "x".into()],
        |i, j, a| i == j || a == 0,
        |_, a, b| a == b,
        None::<fn(usize, usize, usize, usize) -> bool>,
    )
    .unwrap()
}

/// Structures with at most 8 atoms on which the F game is solved
/// exhaustively.
pub fn small_corpus() -> Vec<CylAtomStructure> {
    vec![
        CylAtomStructure::one_atom(2),
        CylAtomStructure::one_atom(3),
        CylAtomStructure::cartesian(2, 2).unwrap(),
        CylAtomStructure::cartesian(3, 2).unwrap(),
        matrices3(&RelAtomStructure::one_atom()),
        matrices3(&build_maddux(1).unwrap()),
        rigid(),
    ]
}

/// A 10-atom structure whose cylindrifiers do not commute; the universal
/// player wins on it.
pub fn edgeless_eta() -> CylAtomStructure {
    eta_of_graph(&Graph::new(1), 3).unwrap()
}
