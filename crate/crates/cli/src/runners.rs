//! One runner per experiment; each writes its files under the output directory.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use qca_dsr::engine::{
    boost_state, cell_index, evolve_spectral, localized_state, project_positive_branch,
    signed_position, LatticeState, SpectralAmplitude,
};
use qca_dsr::kinematics::{
    boost_jacobian, deformed_boost, dispersion, group_velocity, measure_density, Boost, MassParam,
};
use qca_dsr::wavepackets::{
    locate_peak, make_packet, relative_locality_experiment, spectral_peak, Event, GaussianPacket,
    LocalityReport, LocalitySetup, Trajectory,
};

use crate::config::{Experiment, ExperimentConfig, InitialState};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, spectral_table, state_table, write_report, Table};
use crate::suite::{results_table, run_property_suite};

/// Files written by a run and a short human-readable summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

impl RunOutcome {
    fn write(&mut self, dir: &Path, name: &str, table: &Table) -> CliResult<()> {
        let path = dir.join(name);
        table.write(&path)?;
        self.files.push(path);
        Ok(())
    }
}

/// Validate `cfg` and run its experiment.
pub fn run(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Dispersion => run_dispersion_sweep(cfg),
        Experiment::BoostPoint => run_boost_point(cfg),
        Experiment::BoostLocalized => run_boost_localized(cfg),
        Experiment::BoostPacket => run_boost_packet(cfg),
        Experiment::RelativeLocality => run_relative_locality(cfg),
        Experiment::Evolve => run_evolve(cfg),
        Experiment::Verify => run_verify(cfg),
    }
}

fn masses(cfg: &ExperimentConfig) -> CliResult<Vec<MassParam>> {
    cfg.masses
        .iter()
        .map(|&m| MassParam::new(m).map_err(CliError::from))
        .collect()
}

fn boosts(cfg: &ExperimentConfig) -> CliResult<Vec<Boost>> {
    cfg.betas
        .iter()
        .map(|&b| Boost::new(b).map_err(CliError::from))
        .collect()
}

/// Masses for which states can be boosted: the measure diverges everywhere at `m = 1`.
fn boostable_masses(cfg: &ExperimentConfig) -> CliResult<Vec<MassParam>> {
    let ms = masses(cfg)?;
    if ms.iter().any(|m| m.m() == 1.0) {
        return Err(CliError::Validation(
            "boosting states needs m < 1 (the invariant measure diverges at m = 1)".into(),
        ));
    }
    Ok(ms)
}

/// Uniform grid of `n` points over `[-pi, pi]`, endpoints included.
pub fn k_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -PI + 2.0 * PI * (i as f64 / (n - 1) as f64))
        .collect()
}

fn tag(m: MassParam, b: Boost) -> String {
    format!("m{}_b{}", m.m(), b.beta())
}

pub fn run_dispersion_sweep(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let mut out = RunOutcome::default();
    let mut t = Table::new(&["m", "k", "omega", "v"]);
    let grid = k_grid(cfg.k_samples);
    for mass in masses(cfg)? {
        for &k in &grid {
            let p = dispersion(k, mass);
            t.push_numbers(&[mass.m(), k, p.omega, group_velocity(k, mass)]);
        }
        out.summary.push(format!(
            "m = {}: omega(0) = {:.6}, max |v| = {:.6}",
            mass.m(),
            dispersion(0.0, mass).omega,
            mass.n()
        ));
    }
    out.write(&cfg.out, "dispersion.csv", &t)?;
    Ok(out)
}

pub fn run_boost_point(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let mut out = RunOutcome::default();
    let mut t = Table::new(&[
        "m",
        "beta",
        "k",
        "omega",
        "region",
        "k_boosted",
        "omega_boosted",
        "dk_boosted_dk",
        "mu",
        "mu_boosted",
    ]);
    let grid = k_grid(cfg.k_samples);
    for mass in masses(cfg)? {
        for boost in boosts(cfg)? {
            for &k in &grid {
                let p = dispersion(k, mass);
                let q = deformed_boost(p, boost, mass);
                let mut row: Vec<String> = [mass.m(), boost.beta(), k, p.omega]
                    .iter()
                    .map(|&x| fmt_f64(x))
                    .collect();
                row.push(p.region.as_str().to_string());
                row.extend(
                    [
                        q.k,
                        q.omega,
                        boost_jacobian(k, boost, mass),
                        measure_density(k, mass),
                        measure_density(q.k, mass),
                    ]
                    .iter()
                    .map(|&x| fmt_f64(x)),
                );
                t.push(row);
            }
        }
    }
    out.write(&cfg.out, "boost_point.csv", &t)?;
    out.summary.push(format!("{} boosted points", t.len()));
    Ok(out)
}

fn density_table(lab: &LatticeState, boosted: &LatticeState) -> Table {
    let n = lab.n_cells();
    let (p, q) = (lab.position_density(), boosted.position_density());
    let mut t = Table::new(&["x", "p_lab", "p_boosted"]);
    for i in (n / 2..n).chain(0..n / 2) {
        t.push_numbers(&[signed_position(i, n), p[i], q[i]]);
    }
    t
}

fn internal_spinor(state: InitialState) -> [Complex64; 2] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match state {
        InitialState::LocalizedL => [zero, one],
        InitialState::LocalizedSym => [one * FRAC_1_SQRT_2, one * FRAC_1_SQRT_2],
        InitialState::LocalizedR | InitialState::Packet => [one, zero],
    }
}

fn localized(cfg: &ExperimentConfig) -> CliResult<LatticeState> {
    let x = cell_index(cfg.x0[0] as i64, cfg.cells);
    Ok(localized_state(x, internal_spinor(cfg.state), cfg.cells)?)
}

pub fn run_boost_localized(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let mut out = RunOutcome::default();
    let state = localized(cfg)?;
    let mut summary = Table::new(&[
        "m",
        "beta",
        "frame",
        "norm",
        "positive_weight",
        "negative_weight",
        "fixed_point_weight",
    ]);
    for mass in boostable_masses(cfg)? {
        let proj = project_positive_branch(&state, mass);
        let lab = proj.amplitude.clone().normalized()?;
        for boost in boosts(cfg)? {
            let boosted = boost_state(&lab, boost, mass)?;
            let name = tag(mass, boost);
            let (ls, bs) = (lab.to_lattice(), boosted.amplitude.to_lattice());
            out.write(
                &cfg.out,
                &format!("localized_{name}_lab_state.csv"),
                &state_table(&ls),
            )?;
            out.write(
                &cfg.out,
                &format!("localized_{name}_boosted_state.csv"),
                &state_table(&bs),
            )?;
            out.write(
                &cfg.out,
                &format!("localized_{name}_lab_spectrum.csv"),
                &spectral_table(&lab),
            )?;
            out.write(
                &cfg.out,
                &format!("localized_{name}_boosted_spectrum.csv"),
                &spectral_table(&boosted.amplitude),
            )?;
            out.write(
                &cfg.out,
                &format!("localized_{name}_density.csv"),
                &density_table(&ls, &bs),
            )?;
            for (frame, amp) in [("lab", &lab), ("boosted", &boosted.amplitude)] {
                let mut row = vec![fmt_f64(mass.m()), fmt_f64(boost.beta()), frame.to_string()];
                row.extend(
                    [
                        amp.norm_sqr(),
                        proj.positive_weight,
                        proj.negative_weight,
                        boosted.fixed_point_weight,
                    ]
                    .iter()
                    .map(|&x| fmt_f64(x)),
                );
                summary.push(row);
            }
            out.summary.push(format!(
                "m = {}, beta = {}: boosted norm = {:.12}{}",
                mass.m(),
                boost.beta(),
                boosted.amplitude.norm_sqr(),
                if boosted.fixed_point_warning() {
                    " (warning: weight at the fixed points)"
                } else {
                    ""
                }
            ));
        }
    }
    out.write(&cfg.out, "localized_summary.csv", &summary)?;
    Ok(out)
}

fn packet_amplitude(
    cfg: &ExperimentConfig,
    mass: MassParam,
    k0: f64,
    x0: f64,
) -> CliResult<SpectralAmplitude> {
    let spec = GaussianPacket {
        k0,
        sigma_k: cfg.sigma_k,
        x0,
        mass,
    };
    Ok(make_packet(&spec, cfg.cells)?)
}

pub fn run_boost_packet(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let mut out = RunOutcome::default();
    let mut summary = Table::new(&[
        "m",
        "beta",
        "k0",
        "x0",
        "frame",
        "norm",
        "peak_x",
        "width_x",
        "peak_k",
        "width_k",
        "fixed_point_weight",
    ]);
    for mass in boostable_masses(cfg)? {
        for boost in boosts(cfg)? {
            for (i, (k0, x0)) in cfg.packet_pairs()?.into_iter().enumerate() {
                let lab = packet_amplitude(cfg, mass, k0, x0)?;
                let boosted = boost_state(&lab, boost, mass)?;
                let name = format!("packet{i}_{}", tag(mass, boost));
                let (ls, bs) = (lab.to_lattice(), boosted.amplitude.to_lattice());
                out.write(
                    &cfg.out,
                    &format!("{name}_lab_state.csv"),
                    &state_table(&ls),
                )?;
                out.write(
                    &cfg.out,
                    &format!("{name}_boosted_state.csv"),
                    &state_table(&bs),
                )?;
                out.write(
                    &cfg.out,
                    &format!("{name}_lab_spectrum.csv"),
                    &spectral_table(&lab),
                )?;
                out.write(
                    &cfg.out,
                    &format!("{name}_boosted_spectrum.csv"),
                    &spectral_table(&boosted.amplitude),
                )?;
                out.write(
                    &cfg.out,
                    &format!("{name}_density.csv"),
                    &density_table(&ls, &bs),
                )?;
                let mut widths = [0.0; 2];
                for (f, (frame, amp, state)) in
                    [("lab", &lab, &ls), ("boosted", &boosted.amplitude, &bs)]
                        .into_iter()
                        .enumerate()
                {
                    let peak = locate_peak(&state.position_density())?;
                    let (k_peak, k_width) = spectral_peak(amp)?;
                    widths[f] = peak.width;
                    let mut row = [mass.m(), boost.beta(), k0, x0]
                        .iter()
                        .map(|&x| fmt_f64(x))
                        .collect::<Vec<_>>();
                    row.push(frame.to_string());
                    row.extend(
                        [
                            amp.norm_sqr(),
                            peak.position,
                            peak.width,
                            k_peak,
                            k_width,
                            boosted.fixed_point_weight,
                        ]
                        .iter()
                        .map(|&x| fmt_f64(x)),
                    );
                    summary.push(row);
                }
                out.summary.push(format!(
                    "m = {}, beta = {}, k0 = {k0}: norm {:.12} -> {:.12}, width ratio {:.4}",
                    mass.m(),
                    boost.beta(),
                    lab.norm_sqr(),
                    boosted.amplitude.norm_sqr(),
                    widths[1] / widths[0]
                ));
            }
        }
    }
    out.write(&cfg.out, "packet_summary.csv", &summary)?;
    Ok(out)
}

/// The relative-locality setup described by `cfg`.
pub fn locality_setup(cfg: &ExperimentConfig) -> CliResult<LocalitySetup> {
    let times: Vec<u64> = (0..=cfg.steps).step_by(cfg.sample_every as usize).collect();
    Ok(LocalitySetup {
        k1: cfg.k0[0],
        k2: cfg.k0[1],
        boost: Boost::new(cfg.betas[0])?,
        mass: MassParam::new(cfg.masses[0])?,
        n_cells: cfg.cells,
        sigma_k: cfg.sigma_k,
        event: Event {
            t: cfg.event_t,
            x: cfg.event_x,
        },
        t_lab: times.clone(),
        t_boosted: times,
    })
}

fn event_entries(prefix: &str, e: Event) -> [(String, String); 2] {
    [
        (format!("{prefix}_t"), fmt_f64(e.t)),
        (format!("{prefix}_x"), fmt_f64(e.x)),
    ]
}

fn trajectory_entries(prefix: &str, tr: &Trajectory) -> [(String, String); 3] {
    [
        (format!("{prefix}_x_ref"), fmt_f64(tr.x_ref)),
        (format!("{prefix}_v"), fmt_f64(tr.v)),
        (format!("{prefix}_residual"), fmt_f64(tr.residual)),
    ]
}

/// Key-value report of a relative-locality run, echoing the configuration.
pub fn locality_report_entries(
    cfg: &ExperimentConfig,
    r: &LocalityReport,
) -> Vec<(String, String)> {
    let mut e = cfg.echo();
    for (i, c) in r.couples.iter().enumerate() {
        let p = format!("couple{}", i + 1);
        e.push((format!("{p}_k"), fmt_f64(c.k)));
        for (member, j) in [("plus", 0), ("minus", 1)] {
            e.extend(trajectory_entries(&format!("{p}_{member}_lab"), &c.lab[j]));
            e.extend(trajectory_entries(
                &format!("{p}_{member}_boosted"),
                &c.boosted[j],
            ));
        }
        e.extend(event_entries(&format!("{p}_lab_event"), c.lab_event));
        e.extend(event_entries(
            &format!("{p}_boosted_event"),
            c.boosted_event,
        ));
        e.extend(event_entries(
            &format!("{p}_predicted_event"),
            c.predicted_event,
        ));
        e.extend(event_entries(&format!("{p}_point_event"), c.point_event));
    }
    e.push(("delta_emp".into(), fmt_f64(r.delta_emp)));
    e.push(("delta_pred".into(), fmt_f64(r.delta_pred)));
    e.push(("delta_point".into(), fmt_f64(r.delta_point)));
    e.push(("delta_difference".into(), fmt_f64(r.difference())));
    e.push(("delta_relative_error".into(), fmt_f64(r.relative_error())));
    e.push(("fit_noise".into(), fmt_f64(r.fit_noise)));
    e
}

/// Measured peak positions: one row per sample time, frame and couple member.
pub fn locality_trajectory_table(r: &LocalityReport) -> Table {
    let mut t = Table::new(&["t", "x_fit_pair1", "x_fit_pair2", "frame", "member"]);
    for (frame, boosted) in [("lab", false), ("boosted", true)] {
        for (member, j) in [("plus", 0), ("minus", 1)] {
            let pick = |c: usize| {
                let cr = &r.couples[c];
                if boosted {
                    &cr.boosted[j]
                } else {
                    &cr.lab[j]
                }
            };
            for (s1, s2) in pick(0).samples.iter().zip(&pick(1).samples) {
                let mut row = vec![fmt_f64(s1.0), fmt_f64(s1.1), fmt_f64(s2.1)];
                row.push(frame.to_string());
                row.push(member.to_string());
                t.push(row);
            }
        }
    }
    t
}

pub fn run_relative_locality(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let mut out = RunOutcome::default();
    let setup = locality_setup(cfg)?;
    let report = relative_locality_experiment(&setup)?;
    let path = cfg.out.join("relative_locality_report.txt");
    write_report(&path, &locality_report_entries(cfg, &report))?;
    out.files.push(path);
    out.write(
        &cfg.out,
        "relative_locality_trajectories.csv",
        &locality_trajectory_table(&report),
    )?;
    out.summary.push(format!(
        "delta_emp = {:.6}, delta_pred = {:.6}, relative error = {:.3e}, fit noise = {:.3e}",
        report.delta_emp,
        report.delta_pred,
        report.relative_error(),
        report.fit_noise
    ));
    Ok(out)
}

pub fn run_evolve(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let mut out = RunOutcome::default();
    let mut track = Table::new(&["m", "t", "norm", "peak_x", "width_x"]);
    for mass in masses(cfg)? {
        let initial = match cfg.state {
            InitialState::Packet => {
                let mut sum = vec![Complex64::new(0.0, 0.0); cfg.cells];
                for (k0, x0) in cfg.packet_pairs()? {
                    let amp = packet_amplitude(cfg, mass, k0, x0)?;
                    for (s, a) in sum.iter_mut().zip(amp.plane_wave()) {
                        *s += a;
                    }
                }
                SpectralAmplitude::from_plane_wave(mass, sum)?
                    .normalized()?
                    .to_lattice()
            }
            _ => localized(cfg)?,
        };
        let mut t = 0;
        let mut last = initial.clone();
        while t <= cfg.steps {
            let state = evolve_spectral(&initial, mass, t);
            // Multi-peaked densities have no single peak; those rows carry NaN.
            let (px, w) = match locate_peak(&state.position_density()) {
                Ok(p) => (p.position, p.width),
                Err(_) => (f64::NAN, f64::NAN),
            };
            track.push_numbers(&[mass.m(), t as f64, state.norm_sqr(), px, w]);
            last = state;
            t += cfg.sample_every;
        }
        if !cfg.steps.is_multiple_of(cfg.sample_every) {
            last = evolve_spectral(&initial, mass, cfg.steps);
        }
        out.write(
            &cfg.out,
            &format!("evolve_m{}_initial_state.csv", mass.m()),
            &state_table(&initial),
        )?;
        out.write(
            &cfg.out,
            &format!("evolve_m{}_final_state.csv", mass.m()),
            &state_table(&last),
        )?;
        out.summary.push(format!(
            "m = {}: evolved {} steps, final norm {:.15}",
            mass.m(),
            cfg.steps,
            last.norm_sqr()
        ));
    }
    out.write(&cfg.out, "evolve_track.csv", &track)?;
    Ok(out)
}

pub fn run_verify(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let mut out = RunOutcome::default();
    let results = run_property_suite(cfg.seed, cfg.samples, &cfg.tolerances);
    out.write(&cfg.out, "verify_report.csv", &results_table(&results))?;
    out.summary.extend(results.iter().map(|r| r.line()));
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.suite.name())
        .collect();
    if !failed.is_empty() {
        for line in &out.summary {
            eprintln!("{line}");
        }
        return Err(CliError::Numerical(format!(
            "property suites failed: {}",
            failed.join(", ")
        )));
    }
    Ok(out)
}
