//! First-order non-Gaussian perturbations of thermal inputs: analytic
//! second-order entropy coefficients and Fock-space builders to check them.

mod multimode;
mod oracle;
mod single;

pub use multimode::{
    multimode_delta_ic, multimode_interference, multimode_joint_norm, multimode_output_norm,
    multimode_phi_norm, MultiModePerturbation,
};
pub use oracle::{
    build_multimode_phi_fock, build_perturbed_input_fock, build_type2_phi_fock, max_admissible_epsilon,
    mode_operator, oracle_delta_ic, oracle_epsilon_fit, type1_interference, type1_moment, EpsilonFit, POLY_TAIL_TOL,
    PairOperator,
};
pub use single::{
    bracket, correction_breakdown, delta_ic_limit, xi_eigenvalues, CorrectionBreakdown,
    Type1Perturbation,
};
