//! Randomized invariant sweeps with a pass/fail table.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use twofloat::TwoFloat;

use qca_dsr::engine::{boost_state, evolve_spectral, LatticeState};
use qca_dsr::kinematics::{
    boost_jacobian, deformed_boost, dispersion, dmap_jacobian, frequency, measure_density,
    standard_boost, velocity_composition, Boost, MassParam, OnShellPoint, Region,
};
use qca_dsr::wavepackets::{make_packet, GaussianPacket};

use crate::output::{fmt_f64, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    /// Boosted points stay on the mass shell.
    Dispersion,
    /// Closed-form boost against the explicit `D^-1 L D` composition on `B1`.
    Oracle,
    /// `k = +-pi/2` are fixed and `omega(+-pi/2) = pi/2`.
    FixedPoints,
    /// Small `k, m` reproduce the linear boost; `D` is the identity to first order.
    Lorentz,
    /// Two boosts compose like relativistic velocity addition.
    GroupLaw,
    /// `mu(k) / mu(k')` equals the finite-difference `|dk'/dk|`.
    Measure,
    /// Direct stepping agrees with spectral evolution.
    Evolution,
    /// Per-step norm drift of the direct stepper.
    NormDrift,
    /// Boosts of Gaussian packets preserve the invariant-measure norm.
    BoostUnitarity,
}

pub const ALL_SUITES: [Suite; 9] = [
    Suite::Dispersion,
    Suite::Oracle,
    Suite::FixedPoints,
    Suite::Lorentz,
    Suite::GroupLaw,
    Suite::Measure,
    Suite::Evolution,
    Suite::NormDrift,
    Suite::BoostUnitarity,
];

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Dispersion => "dispersion",
            Suite::Oracle => "oracle",
            Suite::FixedPoints => "fixed-points",
            Suite::Lorentz => "lorentz",
            Suite::GroupLaw => "group-law",
            Suite::Measure => "measure",
            Suite::Evolution => "evolution",
            Suite::NormDrift => "norm-drift",
            Suite::BoostUnitarity => "boost-unitarity",
        }
    }

    pub fn default_samples(&self) -> usize {
        match self {
            Suite::Dispersion | Suite::Oracle => 100_000,
            Suite::FixedPoints => 1_000,
            Suite::Lorentz | Suite::GroupLaw | Suite::Measure => 10_000,
            Suite::Evolution | Suite::NormDrift => 10,
            Suite::BoostUnitarity => 16,
        }
    }

    pub fn default_tolerance(&self) -> f64 {
        match self {
            Suite::Dispersion | Suite::Oracle | Suite::NormDrift => 1e-12,
            Suite::FixedPoints => 4.0 * f64::EPSILON,
            Suite::Lorentz => 1e-6,
            Suite::GroupLaw | Suite::Evolution => 1e-10,
            Suite::Measure | Suite::BoostUnitarity => 1e-8,
        }
    }

    fn stream(&self) -> u64 {
        ALL_SUITES.iter().position(|s| s == self).expect("listed") as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: Suite,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Inputs of the worst sample.
    pub worst: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_residual < self.tolerance
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<16} samples={:<7} max_residual={:.3e} tol={:.1e} worst: {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite.name(),
            self.samples,
            self.max_residual,
            self.tolerance,
            self.worst
        )
    }
}

/// Running maximum of a residual together with the inputs that produced it.
struct Worst {
    value: f64,
    detail: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            detail: "-".into(),
        }
    }

    fn update(&mut self, value: f64, detail: impl FnOnce() -> String) {
        // NaN counts as the worst possible residual and is never displaced.
        if self.value.is_nan() {
            return;
        }
        if value.is_nan() || value > self.value {
            self.value = value;
            self.detail = detail();
        }
    }
}

fn rng_for(suite: Suite, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream());
    rng
}

fn random_mass(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> MassParam {
    MassParam::new(rng.random_range(lo..=hi)).expect("mass in range")
}

fn random_boost(rng: &mut ChaCha8Rng, max: f64) -> Boost {
    Boost::new(rng.random_range(-max..=max)).expect("beta in range")
}

fn shell_residual(p: OnShellPoint, mass: MassParam) -> f64 {
    let c = p.omega.cos();
    let ck = p.k.cos();
    (c * c - mass.n() * mass.n() * ck * ck).abs()
}

fn dispersion_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    let mut worst = Worst::new();
    for _ in 0..samples {
        let k = rng.random_range(-PI..=PI);
        let mass = random_mass(rng, 0.0, 1.0);
        let boost = random_boost(rng, 0.999);
        let q = deformed_boost(dispersion(k, mass), boost, mass);
        worst.update(shell_residual(q, mass), || {
            format!("k={k:?} m={:?} beta={:?}", mass.m(), boost.beta())
        });
    }
    worst
}

/// Distance from `+-pi/2` kept by the oracle samples, outside the
/// fixed-point guard of the closed form.
pub const ORACLE_MARGIN: f64 = 1e-6;

/// `D^-1 L D` evaluated in double-double arithmetic on `B1`.
///
/// `cos k` and `sin k` are taken as exact inputs and `E` is built on-shell as
/// `sqrt(p^2 + m^2)`. Recovering `cos omega'` needs `1 - (E'^2 - p'^2)`, which
/// cancels catastrophically in `f64` once `E'` is large or `m -> 1`.
pub fn composition_oracle(k: f64, boost: Boost, mass: MassParam) -> (f64, f64) {
    let (c, s) = (TwoFloat::from(k.cos()), TwoFloat::from(k.sin()));
    let m = TwoFloat::from(mass.m());
    let b = TwoFloat::from(boost.beta());
    let p = s / c;
    let e = (p * p + m * m).sqrt();
    let one = TwoFloat::from(1.0);
    let g = ((one - b) * (one + b)).sqrt().recip();
    let e_new = g * (e - b * p);
    let p_new = g * (p - b * e);
    let slack = one - (e_new - p_new) * (e_new + p_new);
    let cos_part = f64::from(slack).max(0.0).sqrt();
    (f64::from(e_new).atan2(cos_part), f64::from(p_new).atan())
}

fn oracle_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    let mut worst = Worst::new();
    let edge = FRAC_PI_2 - ORACLE_MARGIN;
    for _ in 0..samples {
        let k = rng.random_range(-edge..=edge);
        let mass = random_mass(rng, 0.0, 1.0);
        let boost = random_boost(rng, 0.999);
        let (omega_c, k_c) = composition_oracle(k, boost, mass);
        let closed = deformed_boost(dispersion(k, mass), boost, mass);
        let r = (closed.omega - omega_c).abs().max((closed.k - k_c).abs());
        worst.update(r, || {
            format!("k={k:?} m={:?} beta={:?}", mass.m(), boost.beta())
        });
    }
    worst
}

fn fixed_point_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    let mut worst = Worst::new();
    for _ in 0..samples {
        let mass = random_mass(rng, 0.0, 1.0);
        let boost = random_boost(rng, 0.999);
        for k in [FRAC_PI_2, -FRAC_PI_2] {
            let p = dispersion(k, mass);
            let q = deformed_boost(p, boost, mass);
            let r = (q.k - k)
                .abs()
                .max((q.omega - p.omega).abs())
                .max((frequency(k, mass) - FRAC_PI_2).abs());
            worst.update(r, || {
                format!("k={k:?} m={:?} beta={:?}", mass.m(), boost.beta())
            });
        }
    }
    worst
}

fn lorentz_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    let mut worst = Worst::new();
    let j = dmap_jacobian(0.0, 0.0).expect("regular at the origin");
    let r = (j[0][0] - 1.0)
        .abs()
        .max(j[0][1].abs())
        .max(j[1][0].abs())
        .max((j[1][1] - 1.0).abs());
    worst.update(r, || "Jacobian of D at the origin".into());
    for _ in 0..samples {
        let k = rng.random_range(-1e-3..=1e-3);
        let mass = random_mass(rng, 0.0, 1e-3);
        let boost = random_boost(rng, 0.9);
        let p = dispersion(k, mass);
        let q = deformed_boost(p, boost, mass);
        let (w_s, k_s) = standard_boost(p.omega, p.k, boost);
        let r = (q.omega - w_s).abs().max((q.k - k_s).abs());
        worst.update(r, || {
            format!("k={k:?} m={:?} beta={:?}", mass.m(), boost.beta())
        });
    }
    worst
}

fn group_law_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    let mut worst = Worst::new();
    for _ in 0..samples {
        let k = rng.random_range(-PI..=PI);
        let mass = random_mass(rng, 0.0, 1.0);
        let (b1, b2) = (random_boost(rng, 0.9), random_boost(rng, 0.9));
        let p = dispersion(k, mass);
        let twice = deformed_boost(deformed_boost(p, b1, mass), b2, mass);
        let once = deformed_boost(p, velocity_composition(b1, b2), mass);
        let r = (twice.omega - once.omega)
            .abs()
            .max((twice.k - once.k).abs());
        worst.update(r, || {
            format!(
                "k={k:?} m={:?} beta1={:?} beta2={:?}",
                mass.m(),
                b1.beta(),
                b2.beta()
            )
        });
    }
    worst
}

/// Whether `k` is at least `margin` away from the zeros of `cos k` and `sin omega`.
fn regular(k: f64, mass: MassParam, margin: f64) -> bool {
    k.cos().abs() > margin && frequency(k, mass).sin() > margin
}

fn measure_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    const H: f64 = 1e-6;
    const MARGIN: f64 = 0.1;
    let mut worst = Worst::new();
    let mut done = 0;
    while done < samples {
        let k = rng.random_range(-PI..=PI);
        let mass = random_mass(rng, 0.05, 0.95);
        let boost = random_boost(rng, 0.9);
        let image = |k: f64| deformed_boost(dispersion(k, mass), boost, mass).k;
        let kp = image(k);
        if !(regular(k, mass, MARGIN) && regular(kp, mass, MARGIN))
            || Region::of(k + H) != Region::of(k - H)
        {
            continue;
        }
        let fd = (image(k + H) - image(k - H)) / (2.0 * H);
        let ratio = measure_density(k, mass) / measure_density(kp, mass);
        let r = (ratio / fd.abs() - 1.0).abs();
        worst.update(r, || {
            format!("k={k:?} m={:?} beta={:?}", mass.m(), boost.beta())
        });
        done += 1;
    }
    worst
}

const EVOLUTION_CELLS: usize = 256;
const EVOLUTION_STEPS: u64 = 100;

fn evolution_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    let mut worst = Worst::new();
    for _ in 0..samples {
        let mass = random_mass(rng, 0.0, 1.0);
        let state = LatticeState::random(EVOLUTION_CELLS, rng).expect("even lattice");
        let direct = state.evolve_direct(mass, EVOLUTION_STEPS);
        let spectral = evolve_spectral(&state, mass, EVOLUTION_STEPS);
        worst.update(direct.max_abs_diff(&spectral), || {
            format!("m={:?} N={EVOLUTION_CELLS} T={EVOLUTION_STEPS}", mass.m())
        });
    }
    worst
}

fn norm_drift_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    let mut worst = Worst::new();
    for _ in 0..samples {
        let mass = random_mass(rng, 0.0, 1.0);
        let mut state = LatticeState::random(EVOLUTION_CELLS, rng).expect("even lattice");
        let mut norm = state.norm_sqr();
        for t in 1..=EVOLUTION_STEPS {
            state = state.step_direct(mass);
            let next = state.norm_sqr();
            worst.update((next - norm).abs(), || format!("m={:?} step={t}", mass.m()));
            norm = next;
        }
    }
    worst
}

const UNITARITY_CELLS: usize = 1024;

/// Grid points per `sigma_k` required of both the lab and the boosted
/// spectrum; the norm sum aliases like `exp(-2 pi^2 (sigma / dk)^2)`.
const UNITARITY_RESOLUTION: f64 = 2.0;

/// Smallest power-of-two lattice, at least [`UNITARITY_CELLS`], resolving a
/// spectral width `sigma`.
fn resolving_cells(sigma: f64) -> usize {
    let n = (2.0 * PI * UNITARITY_RESOLUTION / sigma).ceil() as usize;
    n.next_power_of_two().max(UNITARITY_CELLS)
}

/// Minimum distance of a sampled packet centre from `+-pi/2`, in units of
/// `sigma_k`. The grid neighbours of a fixed point carry weight of order
/// `|g(pi/2)|^2` that the boost rescales, so the tail there must be negligible.
pub const UNITARITY_CLEARANCE: f64 = 7.0;

fn boost_unitarity_suite(rng: &mut ChaCha8Rng, samples: usize) -> Worst {
    let mut worst = Worst::new();
    let mut done = 0;
    while done < samples {
        let mass = random_mass(rng, 0.05, 0.9);
        let boost = random_boost(rng, 0.99);
        let k0 = rng.random_range(-PI..=PI);
        let sigma_k = rng.random_range(0.02..=0.1);
        if (k0.abs() - FRAC_PI_2).abs() < UNITARITY_CLEARANCE * sigma_k {
            continue;
        }
        let spec = GaussianPacket {
            k0,
            sigma_k,
            // Centred, so the boosted packet cannot reach the periodic wrap.
            x0: 0.0,
            mass,
        };
        let stretch = boost_jacobian(k0, boost, mass).abs();
        let cells = resolving_cells(sigma_k * stretch.min(1.0));
        let Ok(amp) = make_packet(&spec, cells) else {
            continue;
        };
        let boosted = boost_state(&amp, boost, mass).expect("matching mass");
        let r = (boosted.amplitude.norm_sqr() - amp.norm_sqr()).abs();
        worst.update(r, || {
            format!(
                "k0={:?} sigma_k={:?} m={:?} beta={:?} cells={cells}",
                spec.k0,
                spec.sigma_k,
                mass.m(),
                boost.beta()
            )
        });
        done += 1;
    }
    worst
}

/// Run one suite with `samples` random draws from the stream of `seed`.
pub fn run_suite(suite: Suite, seed: u64, samples: usize, tolerance: f64) -> SuiteResult {
    let mut rng = rng_for(suite, seed);
    let worst = match suite {
        Suite::Dispersion => dispersion_suite(&mut rng, samples),
        Suite::Oracle => oracle_suite(&mut rng, samples),
        Suite::FixedPoints => fixed_point_suite(&mut rng, samples),
        Suite::Lorentz => lorentz_suite(&mut rng, samples),
        Suite::GroupLaw => group_law_suite(&mut rng, samples),
        Suite::Measure => measure_suite(&mut rng, samples),
        Suite::Evolution => evolution_suite(&mut rng, samples),
        Suite::NormDrift => norm_drift_suite(&mut rng, samples),
        Suite::BoostUnitarity => boost_unitarity_suite(&mut rng, samples),
    };
    SuiteResult {
        suite,
        samples,
        max_residual: worst.value,
        tolerance,
        worst: worst.detail,
    }
}

/// Run every suite; `samples` overrides all default counts and `tolerances`
/// overrides defaults by suite name.
pub fn run_property_suite(
    seed: u64,
    samples: Option<usize>,
    tolerances: &BTreeMap<String, f64>,
) -> Vec<SuiteResult> {
    ALL_SUITES
        .par_iter()
        .map(|&s| {
            let n = samples.unwrap_or_else(|| s.default_samples());
            let tol = tolerances
                .get(s.name())
                .copied()
                .unwrap_or_else(|| s.default_tolerance());
            run_suite(s, seed, n, tol)
        })
        .collect()
}

pub fn results_table(results: &[SuiteResult]) -> Table {
    let mut t = Table::new(&[
        "suite",
        "samples",
        "max_residual",
        "tolerance",
        "status",
        "worst",
    ]);
    for r in results {
        t.push(vec![
            r.suite.name().to_string(),
            r.samples.to_string(),
            fmt_f64(r.max_residual),
            fmt_f64(r.tolerance),
            if r.passed() { "pass" } else { "fail" }.to_string(),
            r.worst.clone(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use qca_dsr::kinematics::{dmap, dmap_inverse, standard_boost, PseudoEnergyMomentum, Region};

    #[test]
    fn extended_oracle_matches_f64_composition_away_from_edges() {
        let mass = MassParam::new(0.1).unwrap();
        let boost = Boost::new(0.5).unwrap();
        let p = dispersion(0.2, mass);
        let ep = dmap(p.omega, p.k).unwrap();
        let (e, q) = standard_boost(ep.e, ep.p, boost);
        let (omega, k) = dmap_inverse(PseudoEnergyMomentum { e, p: q }, Region::B1).unwrap();
        let (omega_x, k_x) = composition_oracle(0.2, boost, mass);
        assert!((omega - omega_x).abs() < 1e-14 && (k - k_x).abs() < 1e-14);
    }

    #[test]
    fn resolving_cells_track_width() {
        assert_eq!(resolving_cells(1.0), UNITARITY_CELLS);
        let n = resolving_cells(1e-3);
        assert!(n.is_power_of_two() && 2.0 * PI / n as f64 <= 1e-3 / UNITARITY_RESOLUTION);
    }

    #[test]
    fn fixed_seed_reproduces_residuals() {
        let a = run_property_suite(11, Some(50), &BTreeMap::new());
        let b = run_property_suite(11, Some(50), &BTreeMap::new());
        assert_eq!(a, b);
        assert!(a.iter().all(SuiteResult::passed), "{a:#?}");
    }

    #[test]
    fn tolerance_override_is_honoured() {
        let mut tol = BTreeMap::new();
        tol.insert("dispersion".to_string(), 1e-300);
        let r = run_property_suite(3, Some(20), &tol);
        let d = r.iter().find(|r| r.suite == Suite::Dispersion).unwrap();
        assert_eq!(d.tolerance, 1e-300);
    }

    #[test]
    fn nan_is_worst() {
        let mut w = Worst::new();
        w.update(1.0, || "a".into());
        w.update(f64::NAN, || "nan".into());
        w.update(2.0, || "b".into());
        assert!(w.value.is_nan());
        assert_eq!(w.detail, "nan");
    }
}
