use num_complex::Complex64;
use rand::Rng;

use crate::error::{QcaError, Result};
use crate::kinematics::MassParam;

/// One-particle state of the automaton: two complex amplitudes
/// `(psi_r(x), psi_l(x))` per cell on a periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    psi_r: Vec<Complex64>,
    psi_l: Vec<Complex64>,
}

pub(crate) fn check_cells(n_cells: usize) -> Result<()> {
    if n_cells < 2 || !n_cells.is_multiple_of(2) {
        Err(QcaError::InvalidLatticeSize(n_cells))
    } else {
        Ok(())
    }
}

/// Map a cell index to its centred coordinate in `[-N/2, N/2)`.
#[inline]
pub fn signed_position(index: usize, n_cells: usize) -> f64 {
    if index < n_cells / 2 {
        index as f64
    } else {
        index as f64 - n_cells as f64
    }
}

/// Map a (possibly negative) coordinate to its cell index modulo `N`.
#[inline]
pub fn cell_index(x: i64, n_cells: usize) -> usize {
    x.rem_euclid(n_cells as i64) as usize
}

impl LatticeState {
    pub fn new(psi_r: Vec<Complex64>, psi_l: Vec<Complex64>) -> Result<Self> {
        check_cells(psi_r.len())?;
        if psi_l.len() != psi_r.len() {
            return Err(QcaError::SizeMismatch {
                expected: psi_r.len(),
                got: psi_l.len(),
            });
        }
        Ok(Self { psi_r, psi_l })
    }

    pub fn zeros(n_cells: usize) -> Result<Self> {
        check_cells(n_cells)?;
        Ok(Self {
            psi_r: vec![Complex64::new(0.0, 0.0); n_cells],
            psi_l: vec![Complex64::new(0.0, 0.0); n_cells],
        })
    }

    /// A normalised state with independent Gaussian-distributed amplitudes.
    pub fn random<R: Rng + ?Sized>(n_cells: usize, rng: &mut R) -> Result<Self> {
        check_cells(n_cells)?;
        let mut draw = |_| {
            // Box-Muller keeps this free of distribution crates.
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random::<f64>();
            let r = (-2.0 * u1.ln()).sqrt();
            let a = 2.0 * std::f64::consts::PI * u2;
            Complex64::new(r * a.cos(), r * a.sin())
        };
        let psi_r = (0..n_cells).map(&mut draw).collect();
        let psi_l = (0..n_cells).map(&mut draw).collect();
        Ok(Self { psi_r, psi_l }.normalized())
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.psi_r.len()
    }

    pub fn psi_r(&self) -> &[Complex64] {
        &self.psi_r
    }

    pub fn psi_l(&self) -> &[Complex64] {
        &self.psi_l
    }

    pub(crate) fn into_parts(self) -> (Vec<Complex64>, Vec<Complex64>) {
        (self.psi_r, self.psi_l)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi_r
            .iter()
            .chain(self.psi_l.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn normalized(self) -> Self {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return self;
        }
        let s = 1.0 / norm;
        Self {
            psi_r: self.psi_r.into_iter().map(|z| z * s).collect(),
            psi_l: self.psi_l.into_iter().map(|z| z * s).collect(),
        }
    }

    /// Translate the state by `shift` cells: `psi'(x) = psi(x - shift)`.
    pub fn translated(&self, shift: i64) -> Self {
        let n = self.n_cells();
        let mut psi_r = vec![Complex64::new(0.0, 0.0); n];
        let mut psi_l = vec![Complex64::new(0.0, 0.0); n];
        for x in 0..n {
            let dst = cell_index(x as i64 + shift, n);
            psi_r[dst] = self.psi_r[x];
            psi_l[dst] = self.psi_l[x];
        }
        Self { psi_r, psi_l }
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.psi_r
            .iter()
            .zip(&other.psi_r)
            .chain(self.psi_l.iter().zip(&other.psi_l))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `p(x) = |psi_r(x)|^2 + |psi_l(x)|^2`.
    pub fn position_density(&self) -> Vec<f64> {
        self.psi_r
            .iter()
            .zip(&self.psi_l)
            .map(|(r, l)| r.norm_sqr() + l.norm_sqr())
            .collect()
    }

    /// One step of the automaton unitary:
    ///
    /// ```text
    /// psi_r'(x) = n psi_r(x+1) - i m psi_l(x)
    /// psi_l'(x) = -i m psi_r(x) + n psi_l(x-1)
    /// ```
    pub fn step_direct(&self, mass: MassParam) -> Self {
        let n_cells = self.n_cells();
        let (n, m) = (mass.n(), mass.m());
        let mut psi_r = Vec::with_capacity(n_cells);
        let mut psi_l = Vec::with_capacity(n_cells);
        for x in 0..n_cells {
            let right = if x + 1 == n_cells { 0 } else { x + 1 };
            let left = if x == 0 { n_cells - 1 } else { x - 1 };
            let r = self.psi_r[right] * n + times_minus_i(self.psi_l[x]) * m;
            let l = times_minus_i(self.psi_r[x]) * m + self.psi_l[left] * n;
            psi_r.push(r);
            psi_l.push(l);
        }
        Self { psi_r, psi_l }
    }

    /// `steps` applications of [`LatticeState::step_direct`].
    pub fn evolve_direct(&self, mass: MassParam, steps: u64) -> Self {
        let mut state = self.clone();
        for _ in 0..steps {
            state = state.step_direct(mass);
        }
        state
    }
}

#[inline]
fn times_minus_i(z: Complex64) -> Complex64 {
    Complex64::new(z.im, -z.re)
}

/// A state supported on the single cell `x0` with spinor `internal`.
pub fn localized_state(
    x0: usize,
    internal: [Complex64; 2],
    n_cells: usize,
) -> Result<LatticeState> {
    check_cells(n_cells)?;
    if x0 >= n_cells {
        return Err(QcaError::CellOutOfRange { index: x0, n_cells });
    }
    let norm = (internal[0].norm_sqr() + internal[1].norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(QcaError::NonUnitInternalState(norm));
    }
    let mut state = LatticeState::zeros(n_cells)?;
    state.psi_r[x0] = internal[0];
    state.psi_l[x0] = internal[1];
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(LatticeState::zeros(0).is_err());
        assert!(LatticeState::zeros(7).is_err());
        assert!(LatticeState::new(vec![c(1.0, 0.0); 4], vec![c(0.0, 0.0); 6]).is_err());
    }

    #[test]
    fn localized_state_examples() {
        let s = localized_state(0, [c(1.0, 0.0), c(0.0, 0.0)], 16).unwrap();
        assert_eq!(s.psi_r()[0], c(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
        let p = s.position_density();
        assert_eq!(p.iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!(p[0], 1.0);

        assert!(matches!(
            localized_state(16, [c(1.0, 0.0), c(0.0, 0.0)], 16),
            Err(QcaError::CellOutOfRange { .. })
        ));
        assert!(matches!(
            localized_state(3, [c(1.0, 0.0), c(1.0, 0.0)], 16),
            Err(QcaError::NonUnitInternalState(_))
        ));
    }

    #[test]
    fn massless_step_is_pure_transport() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = LatticeState::random(32, &mut rng).unwrap();
        let t = s.step_direct(MassParam::massless());
        for x in 0..32 {
            assert_eq!(t.psi_r()[x], s.psi_r()[(x + 1) % 32]);
            assert_eq!(t.psi_l()[x], s.psi_l()[(x + 31) % 32]);
        }
    }

    #[test]
    fn unit_mass_step_is_internal_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = LatticeState::random(16, &mut rng).unwrap();
        let t = s.step_direct(MassParam::new(1.0).unwrap());
        for x in 0..16 {
            assert_eq!(t.psi_r()[x], times_minus_i(s.psi_l()[x]));
            assert_eq!(t.psi_l()[x], times_minus_i(s.psi_r()[x]));
        }
    }

    #[test]
    fn step_preserves_norm_and_commutes_with_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mass = MassParam::new(0.37).unwrap();
        let s = LatticeState::random(64, &mut rng).unwrap();
        let t = s.step_direct(mass);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-13);
        let a = s.translated(5).step_direct(mass);
        let b = s.step_direct(mass).translated(5);
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn density_is_phase_invariant_and_sums_to_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let s = LatticeState::random(32, &mut rng).unwrap();
        let phase = Complex64::from_polar(1.0, 0.83);
        let (r, l) = s.clone().into_parts();
        let rotated = LatticeState::new(
            r.into_iter().map(|z| z * phase).collect(),
            l.into_iter().map(|z| z * phase).collect(),
        )
        .unwrap();
        let p = s.position_density();
        let q = rotated.position_density();
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn signed_positions() {
        assert_eq!(signed_position(0, 8), 0.0);
        assert_eq!(signed_position(3, 8), 3.0);
        assert_eq!(signed_position(4, 8), -4.0);
        assert_eq!(signed_position(7, 8), -1.0);
        assert_eq!(cell_index(-1, 8), 7);
        assert_eq!(cell_index(9, 8), 1);
    }
}
