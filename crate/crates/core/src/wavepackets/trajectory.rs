use crate::engine::{SpectralAmplitude, ZoneFft};
use crate::error::{QcaError, Result};

use super::packet::locate_peak;

/// Packets must keep this many RMS widths away from the periodic wrap.
pub const WRAP_WIDTHS: f64 = 5.0;

/// Minimum velocity difference for two trajectories to intersect.
pub const PARALLEL_TOLERANCE: f64 = 1e-9;

/// A point in space-time, `x` in cells and `t` in steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub fn distance(&self, other: &Event) -> f64 {
        (self.t - other.t).hypot(self.x - other.x)
    }
}

/// A straight world-line `x(t) = x_ref + v t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x_ref: f64,
    pub v: f64,
    /// Root-mean-square residual of the fit, in cells.
    pub residual: f64,
    /// The measured `(t, x)` samples behind the fit; empty for constructed lines.
    pub samples: Vec<(f64, f64)>,
}

impl Trajectory {
    pub fn line(x_ref: f64, v: f64) -> Self {
        Self {
            x_ref,
            v,
            residual: 0.0,
            samples: Vec::new(),
        }
    }

    /// The line through `event` with velocity `v`.
    pub fn through(event: Event, v: f64) -> Self {
        Self::line(event.x - v * event.t, v)
    }

    #[inline]
    pub fn position(&self, t: f64) -> f64 {
        self.x_ref + self.v * t
    }

    /// Least-squares line through `(t, x)` samples.
    pub fn fit(samples: Vec<(f64, f64)>) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(QcaError::TooFewSamples(n));
        }
        let nf = n as f64;
        let t_mean = samples.iter().map(|s| s.0).sum::<f64>() / nf;
        let x_mean = samples.iter().map(|s| s.1).sum::<f64>() / nf;
        let (mut stt, mut stx) = (0.0, 0.0);
        for &(t, x) in &samples {
            stt += (t - t_mean) * (t - t_mean);
            stx += (t - t_mean) * (x - x_mean);
        }
        if stt == 0.0 {
            return Err(QcaError::TooFewSamples(1));
        }
        let v = stx / stt;
        let x_ref = x_mean - v * t_mean;
        let sse: f64 = samples
            .iter()
            .map(|&(t, x)| (x - x_ref - v * t).powi(2))
            .sum();
        Ok(Self {
            x_ref,
            v,
            residual: (sse / nf).sqrt(),
            samples,
        })
    }
}

/// Evolve `amp` to each time in `t_samples`, locate the density peak and fit
/// a straight line through the peak positions.
pub fn fit_trajectory(amp: &SpectralAmplitude, t_samples: &[u64]) -> Result<Trajectory> {
    if t_samples.len() < 2 {
        return Err(QcaError::TooFewSamples(t_samples.len()));
    }
    let fft = ZoneFft::new(amp.n_cells())?;
    fit_trajectory_with(amp, t_samples, &fft)
}

pub fn fit_trajectory_with(
    amp: &SpectralAmplitude,
    t_samples: &[u64],
    fft: &ZoneFft,
) -> Result<Trajectory> {
    let half = amp.n_cells() as f64 / 2.0;
    let mut samples = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let density = amp.evolved(t).to_lattice_with(fft).position_density();
        let peak = locate_peak(&density)?;
        if peak.position.abs() + WRAP_WIDTHS * peak.width > half {
            return Err(QcaError::WrapAround {
                position: peak.position,
                width: peak.width,
            });
        }
        samples.push((t as f64, peak.position));
    }
    Trajectory::fit(samples)
}

/// The unique crossing point of two non-parallel trajectories.
pub fn intersect(a: &Trajectory, b: &Trajectory) -> Result<Event> {
    let dv = a.v - b.v;
    if dv.abs() < PARALLEL_TOLERANCE {
        return Err(QcaError::ParallelTrajectories(dv.abs()));
    }
    let t = (b.x_ref - a.x_ref) / dv;
    // Symmetric in (a, b) so that swapping the arguments is bit-identical.
    let x = 0.5 * (a.position(t) + b.position(t));
    Ok(Event { t, x })
}
