use thiserror::Error;

/// Errors raised by the kinematics, lattice engine and wave-packet layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcaError {
    #[error("mass must lie in [0, 1], got {0}")]
    InvalidMass(f64),

    #[error("boost velocity must satisfy |beta| < 1, got {0}")]
    InvalidBoost(f64),

    #[error("wave-vector {0} lies outside the Brillouin zone [-pi, pi]")]
    OutsideBrillouinZone(f64),

    #[error("map is singular at k = {0} (cos k = 0)")]
    SingularPoint(f64),

    #[error("|E cos k| = {0} exceeds 1: no real frequency on this branch")]
    OutOfRange(f64),

    #[error("invariant measure diverges at k = {k} for m = {m}")]
    DivergentMeasure { k: f64, m: f64 },

    #[error("lattice needs an even number of cells >= 2, got {0}")]
    InvalidLatticeSize(usize),

    #[error("cell index {index} out of range for a lattice of {n_cells} cells")]
    CellOutOfRange { index: usize, n_cells: usize },

    #[error("internal state must have unit norm, got {0}")]
    NonUnitInternalState(f64),

    #[error("lattice size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("mass mismatch between amplitude ({expected}) and request ({got})")]
    MassMismatch { expected: f64, got: f64 },

    #[error("packet window [{lo}, {hi}] reaches a fixed point or divergent point of the measure")]
    SupportViolation { lo: f64, hi: f64 },

    #[error("spectral width must be positive and finite, got {0}")]
    InvalidWidth(f64),

    #[error("trajectory fit needs at least two time samples, got {0}")]
    TooFewSamples(usize),

    #[error("packet at x = {position:.3} with width {width:.3} comes within five widths of the periodic wrap")]
    WrapAround { position: f64, width: f64 },

    #[error("density has two comparable maxima (secondary/primary = {ratio:.3})")]
    MultiPeak { ratio: f64 },

    #[error("state carries no weight")]
    ZeroWeight,

    #[error("trajectories are parallel (|v_a - v_b| = {0:e})")]
    ParallelTrajectories(f64),

    #[error("space-time boost matrix is singular near the invariant momentum (k0 = {0})")]
    NearSingular(f64),

    #[error("relative-locality experiment needs distinct couple wave-vectors, got {0}")]
    DegenerateCouple(f64),
}

pub type Result<T> = std::result::Result<T, QcaError>;
