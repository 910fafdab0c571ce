//! Networks, basic matrices, cylindric bases and the bounded games.
mod engine;
mod fgame;
mod hgame;
mod matrices;
mod network;
mod result;
mod verify;

pub use fgame::{solve_f, GameConfig, NODE_CAP};
pub use hgame::{h_responses, solve_h};
pub use matrices::{basic_matrices, cylindric_basis_check, is_basic_matrix, matrix_network, matrix_structure};
pub use network::{check_hypernetwork, is_atomic_network, network_apply_map, ApplyMap, Hypernetwork, Network, LAMBDA0};
pub use result::{
    CertEdge, CertPosition, CertResponse, Certificate, GameKind, GameResult, Move, Opening, Outcome, Player,
};
pub use verify::verify_certificate;
