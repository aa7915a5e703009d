//! Momentum-space form of the automaton.
//!
//! The lattice transform used throughout is
//! `psi_hat(k_j) = N^{-1/2} sum_x exp(-i k_j x) psi(x)` on the grid
//! `k_j = -pi + 2 pi j / N`. With this convention the shift
//! `(S psi)(x) = psi(x + 1)` becomes multiplication by `exp(i k)` and the
//! one-step unitary acts on each mode as
//!
//! ```text
//! U(k) = [[ n e^{ik}, -i m    ],
//!         [ -i m,     n e^{-ik}]]
//! ```
//!
//! with eigenvalues `exp(-+ i omega(k))`. The eigenvalue `exp(-i omega)`
//! belongs to the positive-energy branch: wave-packets built from it move
//! with velocity `+d omega / dk`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::lattice::{check_cells, LatticeState};
use crate::error::Result;
use crate::kinematics::{frequency, MassParam};

/// `k_j = -pi + 2 pi j / N`.
#[inline]
pub fn zone_momentum(j: usize, n_cells: usize) -> f64 {
    -PI + 2.0 * PI * (j as f64) / (n_cells as f64)
}

pub fn zone_grid(n_cells: usize) -> Vec<f64> {
    (0..n_cells).map(|j| zone_momentum(j, n_cells)).collect()
}

/// Unitary lattice Fourier transform onto the zone grid.
#[derive(Clone)]
pub struct ZoneFft {
    n_cells: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ZoneFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZoneFft")
            .field("n_cells", &self.n_cells)
            .finish()
    }
}

impl ZoneFft {
    pub fn new(n_cells: usize) -> Result<Self> {
        check_cells(n_cells)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_cells,
            forward: planner.plan_fft_forward(n_cells),
            inverse: planner.plan_fft_inverse(n_cells),
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Position amplitudes to zone-grid amplitudes, in place.
    pub fn to_momentum(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n_cells);
        // exp(-i k_j x) = (-1)^x exp(-2 pi i j x / N)
        for z in data.iter_mut().skip(1).step_by(2) {
            *z = -*z;
        }
        self.forward.process(data);
        let s = 1.0 / (self.n_cells as f64).sqrt();
        for z in data.iter_mut() {
            *z *= s;
        }
    }

    /// Zone-grid amplitudes back to position amplitudes, in place.
    pub fn to_position(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n_cells);
        self.inverse.process(data);
        let s = 1.0 / (self.n_cells as f64).sqrt();
        for (x, z) in data.iter_mut().enumerate() {
            *z *= if x % 2 == 0 { s } else { -s };
        }
    }
}

/// `U(k)` with its spectral decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryAtK {
    pub k: f64,
    pub omega: f64,
    pub matrix: [[Complex64; 2]; 2],
    /// Eigenvector for `exp(-i omega)`.
    pub positive: [Complex64; 2],
    /// Eigenvector for `exp(+i omega)`.
    pub negative: [Complex64; 2],
    /// `U(k)` is a multiple of the identity (massless, `k in {0, +-pi}`);
    /// the eigenvectors are then the canonical basis.
    pub degenerate: bool,
}

impl UnitaryAtK {
    /// Eigenvalues `(exp(-i omega), exp(+i omega))` for the positive and
    /// negative branch.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(1.0, -self.omega),
            Complex64::from_polar(1.0, self.omega),
        )
    }

    /// Max-norm of `U U^dagger - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let u = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc: Complex64 = u[i].iter().zip(&u[j]).map(|(a, b)| a * b.conj()).sum();
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

/// Real unit vector `(u_z, u_x)` with `U(k) = cos(omega) + i sin(omega) (u_z sigma_z + u_x sigma_x)`.
#[inline]
fn rotation_axis(k: f64, omega: f64, mass: MassParam) -> (f64, f64) {
    let s = omega.sin();
    (mass.n() * k.sin() / s, -mass.m() / s)
}

const DEGENERATE_SIN_K: f64 = 1e-12;

pub fn eigensystem(k: f64, mass: MassParam) -> UnitaryAtK {
    let (n, m) = (mass.n(), mass.m());
    let omega = frequency(k, mass);
    let e_ik = Complex64::from_polar(1.0, k);
    let mim = Complex64::new(0.0, -m);
    let matrix = [[e_ik * n, mim], [mim, e_ik.conj() * n]];
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    let (positive, negative, degenerate) = if m == 0.0 {
        let s = k.sin();
        if s.abs() < DEGENERATE_SIN_K {
            ([one, zero], [zero, one], true)
        } else if s > 0.0 {
            // U = diag(e^{ik}, e^{-ik}); the lower component carries e^{-i|k|}.
            ([zero, one], [one, zero], false)
        } else {
            ([one, zero], [zero, one], false)
        }
    } else {
        let theta = (-m).atan2(n * k.sin());
        let (sh, ch) = (0.5 * theta).sin_cos();
        // theta lies in (-pi, 0), so -sin(theta/2) and cos(theta/2) are both
        // positive: the first component is real positive on both branches.
        (
            [Complex64::new(-sh, 0.0), Complex64::new(ch, 0.0)],
            [Complex64::new(ch, 0.0), Complex64::new(sh, 0.0)],
            false,
        )
    };

    UnitaryAtK {
        k,
        omega,
        matrix,
        positive,
        negative,
        degenerate,
    }
}

/// `U(k)^steps` as a 2x2 matrix.
pub fn unitary_power(k: f64, mass: MassParam, steps: u64) -> [[Complex64; 2]; 2] {
    let t = steps as f64;
    if mass.m() == 0.0 {
        let z = Complex64::from_polar(1.0, k * t);
        let zero = Complex64::new(0.0, 0.0);
        return [[z, zero], [zero, z.conj()]];
    }
    let omega = frequency(k, mass);
    let (uz, ux) = rotation_axis(k, omega, mass);
    let (s, c) = (omega * t).sin_cos();
    let is = Complex64::new(0.0, s);
    [
        [Complex64::new(c, 0.0) + is * uz, is * ux],
        [is * ux, Complex64::new(c, 0.0) - is * uz],
    ]
}

/// `U^steps psi` through the momentum representation.
pub fn evolve_spectral(state: &LatticeState, mass: MassParam, steps: u64) -> LatticeState {
    if steps == 0 {
        return state.clone();
    }
    let n_cells = state.n_cells();
    let fft = ZoneFft::new(n_cells).expect("lattice states always have a valid size");
    let (mut r, mut l) = state.clone().into_parts();
    fft.to_momentum(&mut r);
    fft.to_momentum(&mut l);
    for j in 0..n_cells {
        let u = unitary_power(zone_momentum(j, n_cells), mass, steps);
        let (a, b) = (r[j], l[j]);
        r[j] = u[0][0] * a + u[0][1] * b;
        l[j] = u[1][0] * a + u[1][1] * b;
    }
    fft.to_position(&mut r);
    fft.to_position(&mut l);
    LatticeState::new(r, l).expect("size preserved")
}
