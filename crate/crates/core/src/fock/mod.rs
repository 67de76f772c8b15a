//! Truncated Fock-space model of the driven-dissipative oscillator, used as
//! an independent reference for the projected dynamics.

mod density;
mod integrate;
mod liouvillian;
mod sparse;
mod states;
mod validate;

pub use density::{embed_logical, fidelity, fidelity_with_logical, DensityMatrix, HERMITICITY_TOL, POSITIVITY_FLOOR, TRACE_TOL};
pub use integrate::{evolve, Evolution, OutputCorrection, Tolerances, MAX_OUTPUT_CORRECTION};
pub use liouvillian::{build_full_liouvillian, steady_state_full, FullLiouvillian};
pub use sparse::{Csr, Dia};
pub use states::{
    annihilation, cat_state, coherent_state, coherent_tail, hamiltonian, number, parity, truncation_dim, CatBasis,
    FockOperator, Parity, TAIL_TOLERANCE,
};
pub use validate::{validate_projection, ProjectionCheck, ProjectionRow, ProjectionTable};
