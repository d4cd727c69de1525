//! Closed-form coherent information for Gaussian inputs.

mod covariance;
mod derivatives;
mod optimize;
mod thermal;
mod two_mode;

pub use covariance::{
    channel_on_covariance, coherent_info_energy_shape, coherent_info_gaussian,
    symplectic_breakdown, symplectic_from_energy_shape, SingleModeCovariance,
    SymplecticBreakdown,
};
pub use derivatives::{asymptotic_dic_dx, dic_dx_numeric, dic_dx_numeric_with_step};
pub use optimize::{optimal_energy_split, optimize_x, optimize_x_grid, ShapeOptimum};
pub use thermal::{coherent_info_thermal, thermal_decomposition, ThermalDecomposition};
pub use two_mode::{coherent_info_two_mode_squeezed, TwoModeSqueezedThermalInput};

