use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::engine::{signed_position, zone_momentum, LatticeState, SpectralAmplitude};
use crate::error::{QcaError, Result};
use crate::kinematics::{measure_density, MassParam};

/// Half-width of the spectral window, in units of `sigma_k`, that must stay
/// clear of the fixed points and of divergences of the measure.
pub const SUPPORT_WIDTHS: f64 = 5.0;

/// Narrow-band Gaussian packet `g(k) ~ exp(-(k - k0)^2 / (4 sigma_k^2)) exp(-i k x0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub k0: f64,
    pub sigma_k: f64,
    /// Centre in centred lattice coordinates, may be fractional.
    pub x0: f64,
    pub mass: MassParam,
}

/// Signed periodic difference `a - b` reduced to `[-pi, pi)`.
#[inline]
pub fn zone_difference(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(2.0 * PI) - PI
}

impl GaussianPacket {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_k.is_finite() && self.sigma_k > 0.0) {
            return Err(QcaError::InvalidWidth(self.sigma_k));
        }
        crate::kinematics::check_zone(self.k0)?;
        let half = SUPPORT_WIDTHS * self.sigma_k;
        let (lo, hi) = (self.k0 - half, self.k0 + half);
        let violation = QcaError::SupportViolation { lo, hi };
        if 2.0 * half >= PI {
            return Err(violation);
        }
        // Fixed points at +-pi/2, plus 0 and +-pi where the massless measure diverges.
        let mut blocked = vec![FRAC_PI_2, -FRAC_PI_2];
        if self.mass.m() == 0.0 {
            blocked.extend([0.0, PI]);
        }
        if self.mass.m() == 1.0 {
            return Err(violation);
        }
        if blocked
            .iter()
            .any(|&b| zone_difference(b, self.k0).abs() <= half)
        {
            return Err(violation);
        }
        Ok(())
    }
}

/// Sample a Gaussian packet on an `n_cells` grid, normalised in the invariant measure.
pub fn make_packet(spec: &GaussianPacket, n_cells: usize) -> Result<SpectralAmplitude> {
    spec.validate()?;
    let inv_4s2 = 1.0 / (4.0 * spec.sigma_k * spec.sigma_k);
    let g: Vec<Complex64> = (0..n_cells)
        .map(|j| {
            let k = zone_momentum(j, n_cells);
            let d = zone_difference(k, spec.k0);
            let env = (-d * d * inv_4s2).exp();
            if env == 0.0 || !measure_density(k, spec.mass).is_finite() {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(env, -k * spec.x0)
            }
        })
        .collect();
    SpectralAmplitude::from_invariant(spec.mass, &g)?.normalized()
}

/// Location and spread of a single-peaked density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Sub-cell position in centred coordinates.
    pub position: f64,
    pub index: usize,
    /// Root-mean-square width around the peak, in cells.
    pub width: f64,
}

/// Fraction of the maximum above which a second lobe counts as a rival peak.
pub const RIVAL_PEAK_FRACTION: f64 = 0.5;

fn main_lobe(values: &[f64], imax: usize, cutoff: f64) -> Vec<bool> {
    let n = values.len();
    let mut inside = vec![false; n];
    inside[imax] = true;
    let mut i = imax;
    for _ in 1..n {
        i = (i + 1) % n;
        if values[i] < cutoff || inside[i] {
            break;
        }
        inside[i] = true;
    }
    let mut i = imax;
    for _ in 1..n {
        i = (i + n - 1) % n;
        if values[i] < cutoff || inside[i] {
            break;
        }
        inside[i] = true;
    }
    inside
}

/// Index of the maximum and the rival-peak check shared by positions and spectra.
fn dominant_index(values: &[f64]) -> Result<usize> {
    let (imax, vmax) = values
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    // NaN counts as no weight.
    if vmax.is_nan() || vmax <= 0.0 {
        return Err(QcaError::ZeroWeight);
    }
    let cutoff = RIVAL_PEAK_FRACTION * vmax;
    let lobe = main_lobe(values, imax, cutoff);
    let rival = values
        .iter()
        .zip(&lobe)
        .filter(|(_, &inside)| !inside)
        .map(|(&v, _)| v)
        .fold(0.0, f64::max);
    if rival >= cutoff {
        return Err(QcaError::MultiPeak {
            ratio: rival / vmax,
        });
    }
    Ok(imax)
}

/// Three-point parabolic refinement of the maximum at `i`, in `[-0.5, 0.5]`.
fn parabolic_offset(values: &[f64], i: usize) -> f64 {
    let n = values.len();
    let (a, b, c) = (values[(i + n - 1) % n], values[i], values[(i + 1) % n]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return 0.0;
    }
    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}

/// Peak of a periodic density by parabolic interpolation around its maximum.
pub fn locate_peak(density: &[f64]) -> Result<Peak> {
    let n = density.len();
    let index = dominant_index(density)?;
    let position = signed_position(index, n) + parabolic_offset(density, index);
    let half = n as f64 / 2.0;
    let mut total = 0.0;
    let mut second = 0.0;
    for (i, &p) in density.iter().enumerate() {
        let d = (signed_position(i, n) - position + half).rem_euclid(n as f64) - half;
        total += p;
        second += p * d * d;
    }
    Ok(Peak {
        position,
        index,
        width: (second / total).sqrt(),
    })
}

/// Position-space RMS width of a single-peaked state, in cells.
pub fn position_width(state: &LatticeState) -> Result<f64> {
    Ok(locate_peak(&state.position_density())?.width)
}

/// Spectral peak and RMS width of `|g|^2 mu`, in units of `k`.
pub fn spectral_peak(amp: &SpectralAmplitude) -> Result<(f64, f64)> {
    let weights: Vec<f64> = amp.plane_wave().iter().map(|z| z.norm_sqr()).collect();
    let n = weights.len();
    let index = dominant_index(&weights)?;
    let dk = 2.0 * PI / n as f64;
    let k_peak = amp.momentum(index) + parabolic_offset(&weights, index) * dk;
    let mut total = 0.0;
    let mut second = 0.0;
    for (j, &w) in weights.iter().enumerate() {
        let d = zone_difference(amp.momentum(j), k_peak);
        total += w;
        second += w * d * d;
    }
    Ok((k_peak, (second / total).sqrt()))
}

pub fn spectral_width(amp: &SpectralAmplitude) -> Result<f64> {
    Ok(spectral_peak(amp)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(m: f64, k0: f64, sigma_k: f64, x0: f64) -> GaussianPacket {
        GaussianPacket {
            k0,
            sigma_k,
            x0,
            mass: MassParam::new(m).unwrap(),
        }
    }

    #[test]
    fn support_checks() {
        assert!(packet(0.1, 0.3, 0.02, 0.0).validate().is_ok());
        assert!(matches!(
            packet(0.1, 1.5, 0.02, 0.0).validate(),
            Err(QcaError::SupportViolation { .. })
        ));
        assert!(packet(0.1, -1.5, 0.02, 0.0).validate().is_err());
        assert!(packet(0.0, 0.05, 0.02, 0.0).validate().is_err());
        assert!(packet(0.0, 0.5, 0.02, 0.0).validate().is_ok());
        assert!(packet(0.1, 0.3, 0.0, 0.0).validate().is_err());
        assert!(packet(1.0, 0.3, 0.02, 0.0).validate().is_err());
    }

    #[test]
    fn packet_is_normalised_and_centred() {
        let spec = packet(0.1, 0.3, 0.02, -37.3);
        let amp = make_packet(&spec, 4096).unwrap();
        assert!((amp.norm_sqr() - 1.0).abs() < 1e-10);
        let peak = locate_peak(&amp.to_lattice().position_density()).unwrap();
        assert!((peak.position + 37.3).abs() < 0.5, "{peak:?}");
        // |psi(x)|^2 of a Gaussian with spectral width sigma has RMS 1/(2 sigma).
        assert!((peak.width - 25.0).abs() / 25.0 < 0.05, "{peak:?}");
    }

    #[test]
    fn spectral_width_matches_sigma() {
        for &(m, k0, s) in &[(0.1, 0.3, 0.02), (0.4, -0.8, 0.05), (0.8, 2.4, 0.03)] {
            let amp = make_packet(&packet(m, k0, s, 0.0), 2048).unwrap();
            let (kp, w) = spectral_peak(&amp).unwrap();
            assert!((w - s).abs() / s < 0.05, "m={m} k0={k0} w={w}");
            assert!((kp - k0).abs() < 0.01);
        }
    }

    #[test]
    fn multi_peak_detected() {
        let mut d = vec![0.0; 64];
        d[10] = 1.0;
        d[40] = 0.9;
        assert!(matches!(locate_peak(&d), Err(QcaError::MultiPeak { .. })));
        d[40] = 0.2;
        assert_eq!(locate_peak(&d).unwrap().index, 10);
        assert!(matches!(locate_peak(&[0.0; 8]), Err(QcaError::ZeroWeight)));
    }

    #[test]
    fn parabolic_peak_is_subcell() {
        let n = 128;
        let centre = 5.3;
        let d: Vec<f64> = (0..n)
            .map(|i| {
                let x = signed_position(i, n) - centre;
                (-x * x / 50.0).exp()
            })
            .collect();
        let p = locate_peak(&d).unwrap();
        assert!((p.position - centre).abs() < 0.05);
    }
}
