//! Graph synthesis and spectral verification for quantum-like (QL) bit states.
//!
//! A single QL bit is the two-dimensional space spanned by the emergent top
//! eigenvectors of a composite signed graph
//!
//! ```text
//!     R = | A   C_A |
//!         | C_B  B  |
//! ```
//!
//! built from two regular subgraphs `A`, `B` coupled by a bipartite block.
//! Tuning the subgraph regularities (detuning, `Δ = (k_A - k_B) / 2l`) or the
//! directed coupling regularities (`Δ_C = l_A / l_B`) places any target state
//! `a|+⟩ + b|−⟩` in the top of the spectrum, and every construction here is
//! checked numerically against dense eigensolvers.
//!
//! Modules:
//! - [`graphgen`]: seeded generators for regular graphs, biregular and
//!   row-regular bipartite couplings, and Erdős–Rényi samples.
//! - [`qlcore`]: state/ratio conversions, branch switching, integer
//!   rationalization, network assembly, and the general characteristic
//!   equation.
//! - [`spectral`]: Jacobi eigendecomposition, targeted inverse iteration,
//!   construction verification, and spectral-gap feasibility formulas.
//! - [`randwalk`]: random-walk transition matrices and stationary
//!   distributions (closed form and iterative).
//! - [`twoqubit`]: the four-subgraph two-bit composite and verification of
//!   its proposed product-basis eigenpairs.
//! - [`io`]: JSON and CSV schemas for graphs, plans, and reports.

// index-based loops are the clearer idiom in the dense-matrix kernels
#![allow(clippy::needless_range_loop)]
#![allow(clippy::manual_is_multiple_of)]

pub mod graphgen;
pub mod io;
pub mod matrix;
pub mod qlcore;
pub mod randwalk;
pub mod spectral;
pub mod twoqubit;

pub use graphgen::{
    derive_seed, BipartiteCoupling, ErGraphSample, GraphGenError, Sign, SimpleGraph,
};
pub use matrix::Matrix;
pub use qlcore::{
    amplitudes_from_ratio, assemble, characteristic_residual, delta_c_for_state,
    delta_c_inv_for_state, delta_for_state, delta_inv_for_state, predicted_lambda, rationalize,
    select_branch_asym, select_branch_sym, state_from_amplitudes, BlockNetwork, Branch, QlError,
    QlState, Quadrant, Ratio, TuningPlan,
};
pub use randwalk::{
    stationary_closed_form, stationary_iterative, transition_matrix, StationaryReport, WalkError,
};
pub use spectral::{
    er_min_n, er_min_p, full_spectrum_symmetric, min_regularity_limit, targeted_eigenpair,
    verify_state, GapFeasibility, SpectralError, SpectralReport,
};
pub use twoqubit::{
    assemble_two_qubit, predicted_two_qubit_eigs, verify_two_qubit_basis, TwoQubitBasisReport,
    TwoQubitNetwork,
};
