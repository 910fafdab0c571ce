//! Atom structures and their complex algebras.
//!
//! Atoms are interned to dense indices; complex-algebra elements over an
//! explicit atom list are [`AtomSet`](crate::AtomSet)s. Rule-backed relation
//! structures additionally support [`SymbolicElement`]s, which describe
//! subsets of an infinite atom universe block by block.

mod axioms;
mod cyl;
mod element;
mod neat;
mod rel;
mod term;

pub use axioms::{check_ca_axioms, AxiomBudget};
pub use cyl::{ca_cylindrify, ca_diagonal, ca_substitute, ca_swap, validate_cyl_structure, CylAtomStructure};
pub use element::{Element, IndexSet, SymbolicElement};
pub use neat::{dimension_set, neat_reduct, NeatReduct};
pub use rel::{
    ra_compose, ra_converse, validate_rel_structure, validate_rel_structure_with, RelAtomStructure, RuleFamily,
};
pub use term::{eval_term, Term};
