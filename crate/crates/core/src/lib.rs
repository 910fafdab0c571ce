//! Atom-structure workbench.
//!
//! Builds relation and cylindric atom structures (explicit tables, the
//! Monk-style block family, and the graph constructions `alpha(G)` and
//! `eta(G)`), evaluates their complex-algebra operators, and decides the
//! finite, checkable properties around them: atom-structure axioms,
//! cylindric bases of basic matrices, bounded representability games,
//! Ramsey obstructions, small square representations and the
//! finite/cofinite non-additivity witness.
//!
//! Search kernels run on rayon when the `parallel` feature is enabled
//! (the default). Every kernel also accepts [`Parallelism::Sequential`]
//! so both paths can be compared from one binary.

pub mod algebra;
pub mod atomset;
pub mod budget;
pub mod canon;
pub mod error;
pub mod format;
pub mod games;
pub mod graphalg;
pub mod monk;
pub mod par;
pub mod report;
pub mod repr;

pub use atomset::AtomSet;
pub use budget::Budget;
pub use error::{Error, Result};
pub use par::Parallelism;
pub use report::{ValidationReport, Violation};
