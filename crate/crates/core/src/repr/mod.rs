//! Representation-side checks: coloured graphs labelled by ultrafilters of
//! the Monk term algebra, square representations, the triangle Ramsey
//! obstruction and the finite/cofinite non-additivity example.
mod finco;
mod graph;
mod ramsey;
mod square;
mod uf;

pub use finco::{block_of, finco_nonadditivity_witness, finco_s01, FinCoAlgebra, FinCoElement, FINCO_FILTER_NOTE};
pub use graph::{
    build_complete_graph, extend_coloured_graph, rep_check, sample_term_elements, ColouredGraph, GraphBuild,
};
pub use ramsey::{ramsey_check, ramsey_check_with, RamseyConfig, RamseyOutcome, MAX_RAMSEY_CLIQUE, MAX_RAMSEY_COLOURS};
pub use square::{find_square_rep, find_square_rep_with, verify_square_rep, SquareConfig, SquareRep, SquareSearch};
pub use uf::{uf_triple_consistent, UfLabel};
