//! State and tuning mathematics for single QL bits: amplitude/ratio
//! conversions with branch switching, integer rationalization under graph
//! constraints, composite network assembly, and the general characteristic
//! equation relating all four regularities to the state amplitudes.

mod network;
mod state;
mod tuning;

pub use network::{
    assemble, block_weights, build_network_from_plan, psi_target, BlockNetwork, NetworkMeta,
};
pub use state::{
    amplitudes_from_ratio, delta_c_for_state, delta_c_inv_for_state, delta_for_state,
    delta_inv_for_state, ratio_for_state, select_branch_asym, select_branch_sym,
    state_from_amplitudes, state_from_omegas, Branch, QlState, Quadrant, SWITCH_THRESHOLD,
};
pub use tuning::{
    characteristic_residual, continuous_plan, predicted_lambda, rationalize, Ratio, TuningPlan,
};

use crate::graphgen::GraphGenError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QlError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("amplitudes are off the unit circle beyond tolerance: |a|^2+|b|^2 = {norm}")]
    OffCircle { norm: f64 },
    #[error("{branch} diverges for this state; use the {use_instead} branch")]
    Pole { branch: Branch, use_instead: Branch },
    #[error("invalid ratio: {0}")]
    InvalidRatio(String),
    #[error("no feasible integer plan: {constraint}")]
    Infeasible { constraint: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("state is inconsistent with the plan: {0}")]
    InconsistentState(String),
    #[error(transparent)]
    Generation(#[from] GraphGenError),
}
