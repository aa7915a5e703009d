//! Positive-energy amplitudes over the Brillouin zone and their boosts.
//!
//! A one-particle state on the positive branch is written
//! `|psi> = int dk mu(k) g(k) |k>` with `|k> = mu(k)^{-1/2} |phi(k)>`, so the
//! amplitude in the plane-wave basis is `a(k) = mu(k)^{1/2} g(k)` and the norm
//! is `int dk mu |g|^2 = int dk |a|^2`. On the grid the stored samples are
//! `a_j = (dk mu_j)^{1/2} g_j`, whose squared moduli sum to the norm.
//!
//! Boosts act as `g'(k') = g(k(k'))`, i.e. `a'(k') = a(k(k')) |dk/dk'|^{1/2}`.
//! Off-grid values come from the trigonometric interpolant of the samples
//! `a_j`, which stays smooth through `k = +-pi/2` where `g` itself has a
//! square-root cusp.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::lattice::{check_cells, LatticeState};
use super::spectral::{eigensystem, zone_momentum, ZoneFft};
use crate::error::{QcaError, Result};
use crate::kinematics::{
    boost_jacobian, deformed_boost, dispersion, frequency, measure_density, Boost, MassParam,
};

/// Distance from `+-pi/2` inside which amplitude counts toward the
/// fixed-point warning of [`boost_state`].
pub const FIXED_POINT_WINDOW: f64 = 1e-6;

/// Weight near the fixed points above which the boost reports a warning.
pub const FIXED_POINT_WEIGHT_THRESHOLD: f64 = 1e-10;

/// Positive-energy amplitude on the zone grid `k_j = -pi + 2 pi j / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    mass: MassParam,
    samples: Vec<Complex64>,
}

impl SpectralAmplitude {
    /// Wrap plane-wave samples `a_j`.
    pub fn from_plane_wave(mass: MassParam, samples: Vec<Complex64>) -> Result<Self> {
        check_cells(samples.len())?;
        Ok(Self { mass, samples })
    }

    /// Build from samples of `g` on the grid. Points where the measure
    /// diverges must carry zero amplitude and are stored as zero.
    pub fn from_invariant(mass: MassParam, g: &[Complex64]) -> Result<Self> {
        let n_cells = g.len();
        check_cells(n_cells)?;
        let dk = 2.0 * PI / n_cells as f64;
        let samples = g
            .iter()
            .enumerate()
            .map(|(j, &gj)| {
                let mu = measure_density(zone_momentum(j, n_cells), mass);
                if mu.is_finite() {
                    gj * (dk * mu).sqrt()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(Self { mass, samples })
    }

    pub fn mass(&self) -> MassParam {
        self.mass
    }

    pub fn n_cells(&self) -> usize {
        self.samples.len()
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|j| self.momentum(j)).collect()
    }

    #[inline]
    pub fn momentum(&self, j: usize) -> f64 {
        zone_momentum(j, self.n_cells())
    }

    /// Plane-wave samples `a_j`.
    pub fn plane_wave(&self) -> &[Complex64] {
        &self.samples
    }

    /// Invariant-measure density at each grid point (`+inf` where divergent).
    pub fn measure(&self) -> Vec<f64> {
        (0..self.n_cells())
            .map(|j| measure_density(self.momentum(j), self.mass))
            .collect()
    }

    /// Samples of `g(k_j)`; zero where the measure diverges.
    pub fn invariant(&self) -> Vec<Complex64> {
        let dk = 2.0 * PI / self.n_cells() as f64;
        self.samples
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let mu = measure_density(self.momentum(j), self.mass);
                if mu.is_finite() {
                    a / (dk * mu).sqrt()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect()
    }

    /// `sum_j dk mu_j |g_j|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(QcaError::ZeroWeight);
        }
        let s = 1.0 / norm;
        Ok(Self {
            mass: self.mass,
            samples: self.samples.into_iter().map(|z| z * s).collect(),
        })
    }

    /// L2 distance between two amplitudes on the same grid.
    pub fn distance(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Free evolution for `steps` automaton steps: `a_j -> a_j exp(-i omega_j t)`.
    pub fn evolved(&self, steps: u64) -> Self {
        let t = steps as f64;
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                a * Complex64::from_polar(1.0, -frequency(self.momentum(j), self.mass) * t)
            })
            .collect();
        Self {
            mass: self.mass,
            samples,
        }
    }

    /// The lattice state `sum_j a_j e_+(k_j) |phi(k_j)>`.
    pub fn to_lattice(&self) -> LatticeState {
        let fft = ZoneFft::new(self.n_cells()).expect("amplitudes always have a valid size");
        self.to_lattice_with(&fft)
    }

    pub fn to_lattice_with(&self, fft: &ZoneFft) -> LatticeState {
        let n_cells = self.n_cells();
        let mut r = Vec::with_capacity(n_cells);
        let mut l = Vec::with_capacity(n_cells);
        for (j, &a) in self.samples.iter().enumerate() {
            let e = eigensystem(self.momentum(j), self.mass).positive;
            r.push(a * e[0]);
            l.push(a * e[1]);
        }
        fft.to_position(&mut r);
        fft.to_position(&mut l);
        LatticeState::new(r, l).expect("size preserved")
    }

    /// Band-limited interpolant through the samples `a_j`.
    pub fn interpolant(&self) -> Interpolant {
        Interpolant::new(&self.samples)
    }

    /// Interpolated `g(k)` off the grid.
    pub fn eval_invariant(&self, interp: &Interpolant, k: f64) -> Complex64 {
        let mu = measure_density(k, self.mass);
        if !mu.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let dk = 2.0 * PI / self.n_cells() as f64;
        interp.eval(k) / (dk * mu).sqrt()
    }
}

/// Trigonometric interpolant `a(k) = sum_f c_f exp(i k f)` over the centred
/// frequencies `f in [-N/2, N/2)`, the Nyquist term split symmetrically.
#[derive(Debug, Clone)]
pub struct Interpolant {
    coeffs: Vec<Complex64>,
}

/// Exact phase re-seeding period of the recurrence in [`Interpolant::eval`].
const RESEED: usize = 64;

impl Interpolant {
    pub fn new(samples: &[Complex64]) -> Self {
        let n = samples.len();
        let mut planner = rustfft::FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let mut buf = samples.to_vec();
        fft.process(&mut buf);
        // a_j = sum_f c_f (-1)^f exp(2 pi i j f / N)  =>  c_f = (-1)^f FFT(a)_f / N
        let half = n / 2;
        let scale = 1.0 / n as f64;
        let coeffs = (0..n)
            .map(|i| {
                let f = i as i64 - half as i64;
                let idx = f.rem_euclid(n as i64) as usize;
                let sign = if f.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                buf[idx] * (sign * scale)
            })
            .collect();
        Self { coeffs }
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        let n = self.coeffs.len();
        let half = n / 2;
        // Nyquist term c_{-N/2} cos(k N / 2).
        let mut acc = self.coeffs[0] * (k * half as f64).cos();
        let step = Complex64::from_polar(1.0, k);
        let mut i = 1;
        while i < n {
            let f = i as f64 - half as f64;
            let mut w = Complex64::from_polar(1.0, k * f);
            let end = (i + RESEED).min(n);
            for c in &self.coeffs[i..end] {
                acc += c * w;
                w *= step;
            }
            i = end;
        }
        acc
    }
}

/// Positive-branch projection of a lattice state.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub amplitude: SpectralAmplitude,
    pub positive_weight: f64,
    /// Weight on the negative branch, dropped by the projection.
    pub negative_weight: f64,
}

/// Project onto the positive-energy branch, `a_j = <e_+(k_j)|psi_hat(k_j)>`.
pub fn project_positive_branch(state: &LatticeState, mass: MassParam) -> Projection {
    let n_cells = state.n_cells();
    let fft = ZoneFft::new(n_cells).expect("lattice states always have a valid size");
    let mut r = state.psi_r().to_vec();
    let mut l = state.psi_l().to_vec();
    fft.to_momentum(&mut r);
    fft.to_momentum(&mut l);
    let mut samples = Vec::with_capacity(n_cells);
    let mut negative_weight = 0.0;
    for j in 0..n_cells {
        let u = eigensystem(zone_momentum(j, n_cells), mass);
        let plus = u.positive[0].conj() * r[j] + u.positive[1].conj() * l[j];
        let minus = u.negative[0].conj() * r[j] + u.negative[1].conj() * l[j];
        negative_weight += minus.norm_sqr();
        samples.push(plus);
    }
    let amplitude = SpectralAmplitude { mass, samples };
    Projection {
        positive_weight: amplitude.norm_sqr(),
        negative_weight,
        amplitude,
    }
}

/// Result of [`boost_state`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedAmplitude {
    pub amplitude: SpectralAmplitude,
    /// Weight of the input within [`FIXED_POINT_WINDOW`] of `+-pi/2`, where
    /// the interpolated boost loses accuracy.
    pub fixed_point_weight: f64,
}

impl BoostedAmplitude {
    pub fn fixed_point_warning(&self) -> bool {
        self.fixed_point_weight > FIXED_POINT_WEIGHT_THRESHOLD
    }
}

/// The unitary action of a deformed boost on a positive-branch amplitude:
/// `g'(k') = g(k(k'))` with `k(k')` the inverse deformed boost.
pub fn boost_state(
    amp: &SpectralAmplitude,
    boost: Boost,
    mass: MassParam,
) -> Result<BoostedAmplitude> {
    if amp.mass != mass {
        return Err(QcaError::MassMismatch {
            expected: amp.mass.m(),
            got: mass.m(),
        });
    }
    let fixed_point_weight: f64 = amp
        .samples
        .iter()
        .enumerate()
        .filter(|(j, _)| (amp.momentum(*j).abs() - PI / 2.0).abs() < FIXED_POINT_WINDOW)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    if boost.is_identity() {
        return Ok(BoostedAmplitude {
            amplitude: amp.clone(),
            fixed_point_weight,
        });
    }
    let interp = amp.interpolant();
    let back = boost.inverse();
    let n_cells = amp.n_cells();
    let samples: Vec<Complex64> = (0..n_cells)
        .into_par_iter()
        .map(|j| {
            let k_new = zone_momentum(j, n_cells);
            let source = deformed_boost(dispersion(k_new, mass), back, mass);
            let jac = boost_jacobian(k_new, back, mass);
            interp.eval(source.k) * jac.abs().sqrt()
        })
        .collect();
    Ok(BoostedAmplitude {
        amplitude: SpectralAmplitude { mass, samples },
        fixed_point_weight,
    })
}
