//! Gaussian wave-packets, trajectory extraction, the linearised space-time
//! boost and the relative-locality experiment.

mod locality;
mod packet;
mod spacetime;
mod trajectory;

pub use locality::{
    boost_trajectory, relative_locality_experiment, CoupleReport, LocalityReport, LocalitySetup,
};
pub use packet::{
    locate_peak, make_packet, position_width, spectral_peak, spectral_width, zone_difference,
    GaussianPacket, Peak, RIVAL_PEAK_FRACTION, SUPPORT_WIDTHS,
};
pub use spacetime::{
    boost_event, inverse_boost_offshell, spacetime_boost_matrix, spacetime_boost_matrix_fd,
    SpacetimeBoostMatrix, FD_STEP, SINGULAR_GUARD,
};
pub use trajectory::{
    fit_trajectory, fit_trajectory_with, intersect, Event, Trajectory, PARALLEL_TOLERANCE,
    WRAP_WIDTHS,
};
