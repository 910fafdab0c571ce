//! Graphs, exact colouring, girth, random and structured generators, and
//! the two graph-to-atom-structure constructions.

mod alpha;
mod chromatic;
mod eta;
mod generate;
mod graph;
mod labelled;

pub use alpha::alpha_of_graph;
pub use chromatic::{chromatic_number, chromatic_number_with, clique_number, Colouring, CHROMATIC_CAP};
pub use eta::{eta_of_graph, EtaAtom};
pub use generate::{
    cliques_graph, distance_graph, erdos_search, erdos_search_with, random_graph, ErdosConfig, ErdosOutcome,
};
pub use graph::{girth, shortest_odd_cycle, Graph};
pub use labelled::{gg_member, Label, LabelledGraph};
