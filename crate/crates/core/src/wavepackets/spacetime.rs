use std::f64::consts::FRAC_PI_2;

use crate::error::{QcaError, Result};
use crate::kinematics::{check_zone, deformed_boost, dispersion, Boost, MassParam, Region};

use super::trajectory::Event;

/// Minimum distance from `+-pi/2` at which the space-time matrix is built.
pub const SINGULAR_GUARD: f64 = 1e-3;

/// Step of the centred finite differences used as a cross-check.
pub const FD_STEP: f64 = 1e-6;

/// Linear map `(t, x) -> (t', x')` obtained by linearising the Fourier
/// conjugate of the deformed boost around a reference wave-vector.
///
/// ```text
/// t' =  dw/dw' t - dk/dw' x
/// x' = -dw/dk' t + dk/dk' x
/// ```
///
/// where `(w, k)` are the coordinates of the inverse boost, viewed as
/// functions of `(w', k')` off the mass shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeBoostMatrix {
    pub tt: f64,
    pub tx: f64,
    pub xt: f64,
    pub xx: f64,
}

impl SpacetimeBoostMatrix {
    pub fn identity() -> Self {
        Self {
            tt: 1.0,
            tx: 0.0,
            xt: 0.0,
            xx: 1.0,
        }
    }

    /// The special-relativistic matrix `gamma [[1, -beta], [-beta, 1]]`.
    pub fn lorentz(boost: Boost) -> Self {
        let (b, g) = (boost.beta(), boost.gamma());
        Self {
            tt: g,
            tx: -g * b,
            xt: -g * b,
            xx: g,
        }
    }

    pub fn apply(&self, event: Event) -> Event {
        Event {
            t: self.tt * event.t + self.tx * event.x,
            x: self.xt * event.t + self.xx * event.x,
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.tt, self.tx, self.xt, self.xx]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> f64 {
        self.tt * self.xx - self.tx * self.xt
    }
}

/// Partials of the inverse boost at `(w', k')`, as `[[dw/dw', dw/dk'], [dk/dw', dk/dk']]`.
type InversePartials = [[f64; 2]; 2];

fn to_matrix(d: InversePartials) -> SpacetimeBoostMatrix {
    SpacetimeBoostMatrix {
        tt: d[0][0],
        tx: -d[1][0],
        xt: -d[0][1],
        xx: d[1][1],
    }
}

fn check_reference(k0: f64) -> Result<()> {
    check_zone(k0)?;
    if (k0.abs() - FRAC_PI_2).abs() < SINGULAR_GUARD {
        return Err(QcaError::NearSingular(k0));
    }
    Ok(())
}

/// The lab point above `k0` and its boosted image.
fn reference_points(k0: f64, boost: Boost, mass: MassParam) -> Result<((f64, f64), (f64, f64))> {
    check_reference(k0)?;
    let point = dispersion(k0, mass);
    let image = deformed_boost(point, boost, mass);
    if (image.k.abs() - FRAC_PI_2).abs() < SINGULAR_GUARD * 1e-3 {
        return Err(QcaError::NearSingular(k0));
    }
    Ok(((point.omega, point.k), (image.omega, image.k)))
}

/// The inverse deformed boost on the full `(w', k')` plane.
pub fn inverse_boost_offshell(omega_p: f64, k_p: f64, boost: Boost) -> (f64, f64) {
    let (b, g) = (boost.beta(), boost.gamma());
    let c = k_p.cos();
    let e_p = omega_p.sin() / c;
    let p_p = k_p.sin() / c;
    let e = g * (e_p + b * p_p);
    let p = g * (p_p + b * e_p);
    let k_raw = p.atan();
    let k = match Region::of(k_p) {
        Region::B1 => k_raw,
        Region::B2 if k_raw < 0.0 => k_raw + std::f64::consts::PI,
        Region::B2 => k_raw - std::f64::consts::PI,
    };
    let ck = k.cos();
    let sin_w = e * ck;
    // cos^2 w = 1 - E^2 cos^2 k, with the sign of cos w following the branch
    // of the image frequency.
    let cos_w = (1.0 - sin_w * sin_w).max(0.0).sqrt() * omega_p.cos().signum();
    (sin_w.atan2(cos_w), k)
}

/// Analytic space-time boost matrix at `k0`.
pub fn spacetime_boost_matrix(
    k0: f64,
    boost: Boost,
    mass: MassParam,
) -> Result<SpacetimeBoostMatrix> {
    let ((omega, k), (omega_p, k_p)) = reference_points(k0, boost, mass)?;
    if boost.is_identity() {
        return Ok(SpacetimeBoostMatrix::identity());
    }
    let (b, g) = (boost.beta(), boost.gamma());
    let (sw_p, cw_p) = omega_p.sin_cos();
    let (sk_p, ck_p) = k_p.sin_cos();
    let ck2_p = ck_p * ck_p;

    // (E, p) = L_{-beta} D(w', k'), differentiated in w' and k'.
    let de = [g * cw_p / ck_p, g * (sw_p * sk_p + b) / ck2_p];
    let dp = [g * b * cw_p / ck_p, g * (1.0 + b * sw_p * sk_p) / ck2_p];

    // k = arctan p and sin w = E cos k, evaluated at the lab point.
    let (sk, ck) = k.sin_cos();
    let (sw, cw) = omega.sin_cos();
    let ck2 = ck * ck;
    let dk = [ck2 * dp[0], ck2 * dp[1]];
    let e_sin_k = sw * sk / ck;
    let dw = [
        (ck * de[0] - e_sin_k * dk[0]) / cw,
        (ck * de[1] - e_sin_k * dk[1]) / cw,
    ];
    Ok(to_matrix([dw, dk]))
}

/// The same matrix from centred finite differences of
/// [`inverse_boost_offshell`] with step `h`.
pub fn spacetime_boost_matrix_fd(
    k0: f64,
    boost: Boost,
    mass: MassParam,
    h: f64,
) -> Result<SpacetimeBoostMatrix> {
    let (_, (omega_p, k_p)) = reference_points(k0, boost, mass)?;
    if boost.is_identity() {
        return Ok(SpacetimeBoostMatrix::identity());
    }
    let f = |w: f64, k: f64| inverse_boost_offshell(w, k, boost);
    let (wp, kp) = (f(omega_p + h, k_p), f(omega_p - h, k_p));
    let (wq, kq) = (f(omega_p, k_p + h), f(omega_p, k_p - h));
    let s = 0.5 / h;
    Ok(to_matrix([
        [(wp.0 - kp.0) * s, (wq.0 - kq.0) * s],
        [(wp.1 - kp.1) * s, (wq.1 - kq.1) * s],
    ]))
}

/// Map a lab event to the boosted frame with the matrix linearised at `k0`.
pub fn boost_event(event: Event, k0: f64, boost: Boost, mass: MassParam) -> Result<Event> {
    Ok(spacetime_boost_matrix(k0, boost, mass)?.apply(event))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn mass(m: f64) -> MassParam {
        MassParam::new(m).unwrap()
    }

    fn boost(b: f64) -> Boost {
        Boost::new(b).unwrap()
    }

    #[test]
    fn identity_at_zero_beta() {
        for &k in &[0.0, 0.3, -1.2, 2.5] {
            let m = spacetime_boost_matrix(k, Boost::identity(), mass(0.3)).unwrap();
            assert!(m.max_abs_diff(&SpacetimeBoostMatrix::identity()) < 1e-10);
        }
    }

    #[test]
    fn lorentz_limit() {
        let b = boost(0.6);
        let m = spacetime_boost_matrix(1e-4, b, mass(1e-4)).unwrap();
        let l = SpacetimeBoostMatrix::lorentz(b);
        assert!(m.max_abs_diff(&l) < 1e-6, "{m:?}");
    }

    #[test]
    fn analytic_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 500 {
            let k0 = rng.random_range(-PI..PI);
            if (k0.abs() - FRAC_PI_2).abs() < 0.05 {
                continue;
            }
            let b = boost(rng.random_range(-0.95..0.95));
            let m = mass(rng.random_range(0.0..0.99));
            let a = spacetime_boost_matrix(k0, b, m).unwrap();
            let f = spacetime_boost_matrix_fd(k0, b, m, FD_STEP).unwrap();
            let scale = a.entries().iter().fold(1.0_f64, |s, v| s.max(v.abs()));
            assert!(
                a.max_abs_diff(&f) < 1e-7 * scale,
                "k0={k0} beta={} m={}: {a:?} vs {f:?}",
                b.beta(),
                m.m()
            );
            checked += 1;
        }
    }

    #[test]
    fn inverse_offshell_undoes_boost_on_shell() {
        let m = mass(0.4);
        let b = boost(-0.7);
        for &k in &[0.2, -0.9, 2.0, -2.8] {
            let p = dispersion(k, m);
            let q = deformed_boost(p, b, m);
            let (w, kk) = inverse_boost_offshell(q.omega, q.k, b);
            assert!((w - p.omega).abs() < 1e-12 && (kk - p.k).abs() < 1e-12);
        }
    }

    #[test]
    fn origin_is_fixed_and_k_dependence_present() {
        let b = boost(-0.2);
        let m = mass(0.1);
        let o = boost_event(Event { t: 0.0, x: 0.0 }, 0.7, b, m).unwrap();
        assert_eq!((o.t, o.x), (0.0, 0.0));
        let e = Event { t: 100.0, x: 30.0 };
        let a = boost_event(e, 0.0, b, m).unwrap();
        let c = boost_event(e, PI / 5.0, b, m).unwrap();
        assert!(((a.t - c.t).powi(2) + (a.x - c.x).powi(2)).sqrt() > 1e-3);
    }

    #[test]
    fn singular_near_fixed_points() {
        assert!(matches!(
            spacetime_boost_matrix(FRAC_PI_2 - 1e-4, boost(0.3), mass(0.2)),
            Err(QcaError::NearSingular(_))
        ));
    }
}
