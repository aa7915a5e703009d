use std::f64::consts::PI;

use rayon::prelude::*;

use crate::engine::{boost_state, SpectralAmplitude, ZoneFft};
use crate::error::{QcaError, Result};
use crate::kinematics::{group_velocity, Boost, MassParam};

use super::packet::{make_packet, GaussianPacket};
use super::spacetime::spacetime_boost_matrix;
use super::trajectory::{fit_trajectory_with, intersect, Event, Trajectory};

/// Parameters of the two-couple relative-locality experiment.
///
/// Couple `i` consists of two packets with wave-vectors `k_i` and `-k_i`,
/// moving in opposite directions. All four are placed so that their lab
/// world-lines cross at `event`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalitySetup {
    pub k1: f64,
    pub k2: f64,
    pub boost: Boost,
    pub mass: MassParam,
    pub n_cells: usize,
    pub sigma_k: f64,
    pub event: Event,
    /// Sampling times for the lab-frame fits.
    pub t_lab: Vec<u64>,
    /// Sampling times for the boosted-frame fits.
    pub t_boosted: Vec<u64>,
}

impl Default for LocalitySetup {
    fn default() -> Self {
        Self {
            k1: 0.05,
            k2: PI / 5.0,
            boost: Boost::new(-0.5).expect("valid default boost"),
            mass: MassParam::new(0.1).expect("valid default mass"),
            n_cells: 1 << 14,
            sigma_k: 0.002,
            event: Event { t: 800.0, x: 0.0 },
            t_lab: (0..=10).map(|i| i * 100).collect(),
            t_boosted: (0..=10).map(|i| i * 100).collect(),
        }
    }
}

/// Fits and predictions for one couple `(k, -k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupleReport {
    pub k: f64,
    /// Lab fits of the `+k` and `-k` packets.
    pub lab: [Trajectory; 2],
    /// Fits of the same packets after the boost.
    pub boosted: [Trajectory; 2],
    pub lab_event: Event,
    pub boosted_event: Event,
    /// Intersection of the constructed lab lines mapped one by one with the
    /// matrix linearised at each packet's mean wave-vector.
    pub predicted_event: Event,
    /// The lab crossing mapped with the single matrix linearised at `k`.
    pub point_event: Event,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalityReport {
    pub setup: LocalitySetup,
    pub couples: [CoupleReport; 2],
    /// Distance between the two empirical boosted crossings.
    pub delta_emp: f64,
    /// Distance between the two predicted boosted crossings.
    pub delta_pred: f64,
    /// Distance between the two crossings mapped with one matrix per couple.
    pub delta_point: f64,
    /// Largest RMS residual over all eight trajectory fits.
    pub fit_noise: f64,
}

impl LocalityReport {
    pub fn difference(&self) -> f64 {
        (self.delta_emp - self.delta_pred).abs()
    }

    /// `|delta_emp - delta_pred| / delta_pred`, or `inf` for a vanishing prediction.
    pub fn relative_error(&self) -> f64 {
        if self.delta_pred == 0.0 {
            f64::INFINITY
        } else {
            self.difference() / self.delta_pred
        }
    }
}

/// Map a lab world-line to the boosted frame with the matrix linearised at `k`.
pub fn boost_trajectory(
    line: &Trajectory,
    k: f64,
    boost: Boost,
    mass: MassParam,
    span: f64,
) -> Result<Trajectory> {
    let m = spacetime_boost_matrix(k, boost, mass)?;
    if boost.is_identity() {
        return Ok(line.clone());
    }
    let a = m.apply(Event {
        t: 0.0,
        x: line.x_ref,
    });
    let b = m.apply(Event {
        t: span,
        x: line.position(span),
    });
    let v = (b.x - a.x) / (b.t - a.t);
    Ok(Trajectory::through(a, v))
}

struct PacketRun {
    k_mean: f64,
    lab: Trajectory,
    boosted: Trajectory,
}

/// Mean wave-vector of the spectral weight `|a|^2`.
fn mean_momentum(amp: &SpectralAmplitude) -> f64 {
    amp.plane_wave()
        .iter()
        .enumerate()
        .map(|(j, a)| a.norm_sqr() * amp.momentum(j))
        .sum::<f64>()
        / amp.norm_sqr()
}

fn run_packet(setup: &LocalitySetup, k: f64, fft: &ZoneFft) -> Result<PacketRun> {
    let v = group_velocity(k, setup.mass);
    let mut spec = GaussianPacket {
        k0: k,
        sigma_k: setup.sigma_k,
        x0: Trajectory::through(setup.event, v).x_ref,
        mass: setup.mass,
    };
    // The measured line is offset from the group-velocity line by O(sigma^2)
    // effects. A translation of the packet moves the measured line rigidly,
    // so one correction places it exactly through the event.
    let probe = fit_trajectory_with(&make_packet(&spec, setup.n_cells)?, &setup.t_lab, fft)?;
    spec.x0 += setup.event.x - probe.position(setup.event.t);
    let amp = make_packet(&spec, setup.n_cells)?;
    let lab = fit_trajectory_with(&amp, &setup.t_lab, fft)?;
    let k_mean = mean_momentum(&amp);
    let boosted = boost_state(&amp, setup.boost, setup.mass)?.amplitude;
    let boosted = fit_trajectory_with(&boosted, &setup.t_boosted, fft)?;
    Ok(PacketRun {
        k_mean,
        lab,
        boosted,
    })
}

/// Build both couples, boost them, re-fit their trajectories and compare the
/// separation of the boosted crossings with the linearised prediction.
pub fn relative_locality_experiment(setup: &LocalitySetup) -> Result<LocalityReport> {
    for k in [setup.k1, setup.k2] {
        if k == 0.0 {
            return Err(QcaError::DegenerateCouple(k));
        }
    }
    let fft = ZoneFft::new(setup.n_cells)?;
    let ks = [setup.k1, -setup.k1, setup.k2, -setup.k2];
    let runs: Vec<PacketRun> = ks
        .par_iter()
        .map(|&k| run_packet(setup, k, &fft))
        .collect::<Result<_>>()?;

    let span = setup.t_lab.iter().copied().max().unwrap_or(0).max(1) as f64;
    let mut couples = Vec::with_capacity(2);
    for (c, k) in [setup.k1, setup.k2].into_iter().enumerate() {
        let (a, b) = (&runs[2 * c], &runs[2 * c + 1]);
        let lab_event = intersect(&a.lab, &b.lab)?;
        let boosted_event = intersect(&a.boosted, &b.boosted)?;
        // The constructed lab world-lines: through the event at the measured speeds.
        let la = Trajectory::through(setup.event, a.lab.v);
        let lb = Trajectory::through(setup.event, b.lab.v);
        let pa = boost_trajectory(&la, a.k_mean, setup.boost, setup.mass, span)?;
        let pb = boost_trajectory(&lb, b.k_mean, setup.boost, setup.mass, span)?;
        let predicted_event = intersect(&pa, &pb)?;
        let point_event = spacetime_boost_matrix(k, setup.boost, setup.mass)?.apply(lab_event);
        couples.push(CoupleReport {
            k,
            lab: [a.lab.clone(), b.lab.clone()],
            boosted: [a.boosted.clone(), b.boosted.clone()],
            lab_event,
            boosted_event,
            predicted_event,
            point_event,
        });
    }
    let fit_noise = runs
        .iter()
        .flat_map(|r| [r.lab.residual, r.boosted.residual])
        .fold(0.0, f64::max);
    let couples: [CoupleReport; 2] = couples.try_into().expect("two couples");
    let delta_emp = couples[0].boosted_event.distance(&couples[1].boosted_event);
    let delta_pred = couples[0]
        .predicted_event
        .distance(&couples[1].predicted_event);
    let delta_point = couples[0].point_event.distance(&couples[1].point_event);
    Ok(LocalityReport {
        setup: setup.clone(),
        couples,
        delta_emp,
        delta_pred,
        delta_point,
        fit_noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(k1: f64, k2: f64, beta: f64) -> LocalitySetup {
        LocalitySetup {
            k1,
            k2,
            boost: Boost::new(beta).unwrap(),
            n_cells: 4096,
            sigma_k: 0.01,
            event: Event { t: 300.0, x: 0.0 },
            t_lab: (0..=6).map(|i| i * 100).collect(),
            t_boosted: (0..=6).map(|i| i * 100).collect(),
            ..LocalitySetup::default()
        }
    }

    #[test]
    fn identical_couples_do_not_separate() {
        let r = relative_locality_experiment(&small(0.6, 0.6, -0.5)).unwrap();
        assert_eq!(r.delta_pred, 0.0);
        assert_eq!(r.delta_emp, 0.0);
    }

    #[test]
    fn no_separation_without_boost() {
        let r = relative_locality_experiment(&small(0.6, 1.0, 0.0)).unwrap();
        assert!(r.delta_pred < 1e-9);
        assert!(
            r.delta_emp < r.fit_noise.max(1e-6),
            "{} vs {}",
            r.delta_emp,
            r.fit_noise
        );
    }

    #[test]
    fn separation_follows_prediction() {
        let r = relative_locality_experiment(&small(0.6, 1.0, -0.5)).unwrap();
        assert!(r.delta_emp > 5.0 * r.fit_noise);
        assert!(r.relative_error() < 0.2, "{r:?}");
    }

    #[test]
    fn zero_wave_vector_rejected() {
        assert!(matches!(
            relative_locality_experiment(&small(0.0, 1.0, -0.5)),
            Err(QcaError::DegenerateCouple(_))
        ));
    }

    #[test]
    fn mapped_line_passes_through_mapped_points() {
        let mass = MassParam::new(0.2).unwrap();
        let boost = Boost::new(0.4).unwrap();
        let line = Trajectory::line(-50.0, 0.6);
        let mapped = boost_trajectory(&line, 0.6, boost, mass, 100.0).unwrap();
        let m = spacetime_boost_matrix(0.6, boost, mass).unwrap();
        let e = m.apply(Event {
            t: 37.0,
            x: line.position(37.0),
        });
        assert!((mapped.position(e.t) - e.x).abs() < 1e-9);
    }
}
