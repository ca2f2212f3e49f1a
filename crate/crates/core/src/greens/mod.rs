pub mod continuum;
pub mod lattice;
pub mod provider;

pub use continuum::{
    g0_branchcut, g0_long, g0_long_derivative, g0_pole, g0_single_mode, g0_single_mode_derivative,
    g0_truncated, g0_truncated_derivative, wall_factor, BranchCut,
};
pub use lattice::{
    effective_mass, hopping_for_mass, lattice_decay_constant, lattice_g0, lattice_g0_broadband,
    lattice_g0_derivative, lattice_i, lattice_i_quadrature, quadratic_band_decay_constant, LatticeSpec,
};
pub use provider::{
    central_difference, GreensProvider, LatticeGreens, LongGreens, PoleGreens, ProviderKind,
    SingleModeGreens, TruncatedGreens,
};
