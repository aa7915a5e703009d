//! Lattice representation of one-particle states, the one-step automaton
//! unitary in direct and spectral form, and the boost action on states.

mod amplitude;
mod lattice;
mod spectral;

pub use amplitude::{
    boost_state, project_positive_branch, BoostedAmplitude, Interpolant, Projection,
    SpectralAmplitude, FIXED_POINT_WEIGHT_THRESHOLD, FIXED_POINT_WINDOW,
};
pub use lattice::{cell_index, localized_state, signed_position, LatticeState};
pub use spectral::{
    eigensystem, evolve_spectral, unitary_power, zone_grid, zone_momentum, UnitaryAtK, ZoneFft,
};
