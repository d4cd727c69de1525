//! Truncated Fock-space oracle: states, the noise channel as a superoperator,
//! purification, two-mode squeezing and von Neumann entropies.

mod channel;
pub(crate) mod displacement;
mod entropy;
pub(crate) mod laguerre;
mod lemmas;
pub(crate) mod oracle;
mod quadrature;
mod squeeze;
pub(crate) mod state;

pub use channel::apply_channel_fock;
pub use entropy::{von_neumann_entropy, EIGENVALUE_FLOOR};
pub use lemmas::{verify_lemma, verify_lemma3, verify_lemma_with_margin, Lemma};
pub use oracle::{
    coherent_info_oracle, joint_output_constructions, joint_output_state, JOINT_AGREEMENT_TOL,
    TRACE_DEFICIT_TOL,
};
pub use quadrature::{Certificate, QuadratureScheme, CERTIFICATE_TOL};
pub use squeeze::{
    purify_thermal, squeezed_pair_cutoff, squeezed_pair_photons, squeezed_thermal_pair,
    two_mode_squeeze_state, Squeezed, TwoModeSqueeze, TwoModeVector,
    LEAKAGE_BUDGET, MAX_SQUEEZING,
};
pub use state::{
    thermal_cutoff, thermal_cutoff_with, thermal_fock, thermal_product, FockData, FockDensityMatrix, SectorMatrix,
    CUTOFF_MARGIN, THERMAL_TAIL_TOL,
};
