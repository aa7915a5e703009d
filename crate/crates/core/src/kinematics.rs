//! Energy-momentum kinematics of the one-dimensional Dirac automaton.
//!
//! The automaton with mass `m` has the dispersion relation
//!
//! ```text
//! cos^2(omega) = (1 - m^2) cos^2(k)
//! ```
//!
//! which is not preserved by linear Lorentz boosts. Conjugating the linear
//! boost with the map `D(omega, k) = (sin(omega) / cos(k), tan(k))` gives a
//! nonlinear representation of the boost group that does preserve it. The two
//! momenta `k = +-pi/2` (frequency `pi/2`) are fixed by every such boost and
//! split the Brillouin zone into the regions `B1 = [-pi/2, pi/2]` and `B2`,
//! which never mix.
//!
//! All frequencies live on the branch `omega = arccos(n cos k)` in `[0, pi]`,
//! with `n = sqrt(1 - m^2)`. On `B2` this puts `omega` in `[pi/2, pi]` and the
//! image of `D` on the lower sheet `E < 0` of the hyperbola `E^2 - p^2 = m^2`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{QcaError, Result};

/// Distance from `k = +-pi/2` below which a point is treated as the fixed
/// point of the deformed boosts.
pub const FIXED_POINT_GUARD: f64 = 1e-9;

/// Slack allowed when checking that a wave-vector lies in `[-pi, pi]`.
const ZONE_SLACK: f64 = 1e-12;

/// Slack allowed on `|E cos k| <= 1` when inverting `D`.
const RANGE_SLACK: f64 = 1e-12;

/// Automaton mass `m` together with the hopping amplitude `n = sqrt(1 - m^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassParam {
    m: f64,
    n: f64,
}

impl MassParam {
    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(QcaError::InvalidMass(m));
        }
        // (1 - m)(1 + m) is exact to one rounding, unlike 1 - m*m near m = 1.
        let n = ((1.0 - m) * (1.0 + m)).sqrt();
        Ok(Self { m, n })
    }

    pub fn massless() -> Self {
        Self { m: 0.0, n: 1.0 }
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m
    }

    #[inline]
    pub fn n(&self) -> f64 {
        self.n
    }
}

/// A boost with velocity `beta` in `(-1, 1)` and Lorentz factor `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boost {
    beta: f64,
    gamma: f64,
}

impl Boost {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta.abs() >= 1.0 {
            return Err(QcaError::InvalidBoost(beta));
        }
        let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
        Ok(Self { beta, gamma })
    }

    pub fn identity() -> Self {
        Self {
            beta: 0.0,
            gamma: 1.0,
        }
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The boost with opposite velocity.
    pub fn inverse(&self) -> Self {
        Self {
            beta: -self.beta,
            gamma: self.gamma,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.beta == 0.0
    }
}

/// The two boost-invariant halves of the Brillouin zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// `k` in `[-pi/2, pi/2]`.
    B1,
    /// `k` in `[-pi, -pi/2) U (pi/2, pi]`.
    B2,
}

impl Region {
    pub fn of(k: f64) -> Self {
        if k.abs() <= FRAC_PI_2 {
            Region::B1
        } else {
            Region::B2
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Region::B1 => "B1",
            Region::B2 => "B2",
        }
    }
}

/// A point `(omega, k)` on the automaton mass shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnShellPoint {
    pub omega: f64,
    pub k: f64,
    pub region: Region,
}

/// Image of an on-shell point under `D`; satisfies `E^2 - p^2 = m^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoEnergyMomentum {
    pub e: f64,
    pub p: f64,
}

impl PseudoEnergyMomentum {
    /// The quadratic form `E^2 - p^2`, evaluated without squaring cancellation.
    pub fn invariant(&self) -> f64 {
        (self.e - self.p) * (self.e + self.p)
    }
}

/// Reduce `k` into `[-pi, pi]`, leaving values already inside untouched.
pub fn wrap_to_zone(k: f64) -> f64 {
    if k.abs() <= PI + ZONE_SLACK {
        return k;
    }
    let r = (k + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI && k > 0.0 {
        PI
    } else {
        r
    }
}

pub fn check_zone(k: f64) -> Result<f64> {
    if k.is_finite() && k.abs() <= PI + ZONE_SLACK {
        Ok(k)
    } else {
        Err(QcaError::OutsideBrillouinZone(k))
    }
}

/// Whether `k` is within [`FIXED_POINT_GUARD`] of `+-pi/2`.
#[inline]
pub fn is_near_fixed_point(k: f64) -> bool {
    (k.abs() - FRAC_PI_2).abs() < FIXED_POINT_GUARD
}

/// `omega(k) = arccos(n cos k)`.
#[inline]
pub fn frequency(k: f64, mass: MassParam) -> f64 {
    (mass.n * k.cos()).clamp(-1.0, 1.0).acos()
}

/// The on-shell point above `k`. Inputs outside `[-pi, pi]` are first reduced
/// into the zone.
pub fn dispersion(k: f64, mass: MassParam) -> OnShellPoint {
    let k = wrap_to_zone(k);
    OnShellPoint {
        omega: frequency(k, mass),
        k,
        region: Region::of(k),
    }
}

/// Group velocity `d omega / dk = n sin k / sin omega`.
///
/// For `m = 0` the velocity is `sign(k)`, with `0` at `k = 0`.
pub fn group_velocity(k: f64, mass: MassParam) -> f64 {
    if mass.m == 0.0 {
        return if k == 0.0 { 0.0 } else { k.signum() };
    }
    let sin_omega = frequency(k, mass).sin();
    mass.n * k.sin() / sin_omega
}

/// `sin k / sin omega`, the along-shell slope `dE/dp = p/E`.
fn shell_slope(k: f64, omega: f64) -> f64 {
    let s = omega.sin();
    if s == 0.0 {
        0.0
    } else {
        k.sin() / s
    }
}

/// The map `D(omega, k) = (sin(omega) / cos(k), tan(k))`.
pub fn dmap(omega: f64, k: f64) -> Result<PseudoEnergyMomentum> {
    if is_near_fixed_point(k) {
        return Err(QcaError::SingularPoint(k));
    }
    let c = k.cos();
    Ok(PseudoEnergyMomentum {
        e: omega.sin() / c,
        p: k.sin() / c,
    })
}

/// Jacobian of `D` at `(omega, k)`; rows `(E, p)`, columns `(omega, k)`.
pub fn dmap_jacobian(omega: f64, k: f64) -> Result<[[f64; 2]; 2]> {
    if is_near_fixed_point(k) {
        return Err(QcaError::SingularPoint(k));
    }
    let c = k.cos();
    let c2 = c * c;
    Ok([
        [omega.cos() / c, omega.sin() * k.sin() / c2],
        [0.0, 1.0 / c2],
    ])
}

/// Inverse of `D` on the given region.
///
/// `k` is recovered from `arctan(p)`, translated by `pi` into `B2` when
/// requested (`tan` has period `pi`). The frequency is
/// `atan2(E cos k, +-sqrt(1 + p^2 - E^2) |cos k|)`, with the sign of the
/// second argument fixed by the region; this is `arcsin(E cos k)` on `B1`
/// and `pi - arcsin(E cos k)` on `B2` without the loss of precision of
/// `arcsin` near `pi/2`.
pub fn dmap_inverse(ep: PseudoEnergyMomentum, region: Region) -> Result<(f64, f64)> {
    let k_raw = ep.p.atan();
    let k = match region {
        Region::B1 => k_raw,
        Region::B2 => {
            if k_raw < 0.0 {
                k_raw + PI
            } else {
                k_raw - PI
            }
        }
    };
    let cos_k = k.cos();
    let sin_omega = ep.e * cos_k;
    // 1 + p^2 - E^2 = (1 - E^2 cos^2 k) / cos^2 k
    let slack = 1.0 - ep.invariant();
    if slack < 0.0 && sin_omega.abs() > 1.0 + RANGE_SLACK {
        return Err(QcaError::OutOfRange(sin_omega.abs()));
    }
    let cos_omega = slack.max(0.0).sqrt() * cos_k;
    Ok((sin_omega.atan2(cos_omega), k))
}

/// The linear boost `(omega, k) -> gamma (omega - beta k, k - beta omega)`.
pub fn standard_boost(omega: f64, k: f64, boost: Boost) -> (f64, f64) {
    let (b, g) = (boost.beta, boost.gamma);
    (g * (omega - b * k), g * (k - b * omega))
}

/// Relativistic velocity addition `(b1 + b2) / (1 + b1 b2)`.
pub fn velocity_composition(b1: Boost, b2: Boost) -> Boost {
    let beta = (b1.beta + b2.beta) / (1.0 + b1.beta * b2.beta);
    let gamma = b1.gamma * b2.gamma * (1.0 + b1.beta * b2.beta);
    Boost { beta, gamma }
}

/// The deformed boost `D^-1 . L_beta . D` acting on an on-shell point.
///
/// The wave-vector follows the closed form
/// `k' = arctan[gamma (tan k - beta sin(omega)/cos k)]`, shifted by `pi`
/// when the point lies in `B2`; the frequency is taken from
/// `sin(omega') = gamma (sin(omega)/cos k - beta tan k) cos k'` together with
/// `cos(omega') = n cos k'`. Points within [`FIXED_POINT_GUARD`] of `+-pi/2`
/// are returned unchanged.
pub fn deformed_boost(point: OnShellPoint, boost: Boost, mass: MassParam) -> OnShellPoint {
    if boost.is_identity() || is_near_fixed_point(point.k) {
        return point;
    }
    let (b, g) = (boost.beta, boost.gamma);
    let c = point.k.cos();
    let e = point.omega.sin() / c;
    let p = point.k.sin() / c;
    let p_new = g * (p - b * e);
    let e_new = g * (e - b * p);
    let k_raw = p_new.atan();
    let k_new = match point.region {
        Region::B1 => k_raw,
        Region::B2 => {
            if k_raw < 0.0 {
                k_raw + PI
            } else {
                k_raw - PI
            }
        }
    };
    let c_new = k_new.cos();
    let omega_new = (e_new * c_new).atan2(mass.n * c_new);
    OnShellPoint {
        omega: omega_new,
        k: k_new,
        region: point.region,
    }
}

/// Along-shell derivative `dk'/dk` of the deformed boost at `k`.
///
/// At the fixed points this is the limiting multiplier `1 / (gamma (1 -+ beta))`.
pub fn boost_jacobian(k: f64, boost: Boost, mass: MassParam) -> f64 {
    if boost.is_identity() {
        return 1.0;
    }
    let (b, g) = (boost.beta, boost.gamma);
    if is_near_fixed_point(k) {
        return if k > 0.0 {
            1.0 / (g * (1.0 - b))
        } else {
            1.0 / (g * (1.0 + b))
        };
    }
    let point = dispersion(k, mass);
    let boosted = deformed_boost(point, boost, mass);
    let ratio = boosted.k.cos() / k.cos();
    g * (1.0 - b * shell_slope(k, point.omega)) * ratio * ratio
}

/// Density of the boost-invariant measure on the mass shell,
/// `mu(k) = 1 / (2 n sin(omega) |cos k|)`; `+inf` where it diverges.
pub fn measure_density(k: f64, mass: MassParam) -> f64 {
    let denom = 2.0 * mass.n * frequency(k, mass).sin() * k.cos().abs();
    if denom == 0.0 || is_near_fixed_point(k) {
        f64::INFINITY
    } else {
        1.0 / denom
    }
}

/// The invariant measure density `mu(k)`, with `mu(k) dk = mu(k') dk'` under
/// every deformed boost.
///
/// This is the pull-back of the Lorentz-invariant measure `dp / |E|` through
/// `D`, normalised so that `mu -> 1 / (2 omega)` for small `k` and `m`. It
/// diverges where `sin(omega) = 0` (massless, `k in {0, +-pi}`), at the fixed
/// points and for `m = 1`.
pub fn invariant_measure(k: f64, mass: MassParam) -> Result<f64> {
    let mu = measure_density(k, mass);
    if mu.is_finite() {
        Ok(mu)
    } else {
        Err(QcaError::DivergentMeasure { k, m: mass.m })
    }
}
