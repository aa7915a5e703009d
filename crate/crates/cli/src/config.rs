//! Experiment configuration: defaults per experiment, a plain `key = value`
//! file format and validation against the preconditions of the library.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qca_dsr::kinematics::{Boost, MassParam};
use qca_dsr::wavepackets::GaussianPacket;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Dispersion,
    BoostPoint,
    BoostLocalized,
    BoostPacket,
    RelativeLocality,
    Evolve,
    Verify,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Dispersion => "dispersion-sweep",
            Experiment::BoostPoint => "boost-point",
            Experiment::BoostLocalized => "boost-localized",
            Experiment::BoostPacket => "boost-packet",
            Experiment::RelativeLocality => "relative-locality",
            Experiment::Evolve => "evolve",
            Experiment::Verify => "verify",
        }
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "dispersion" | "dispersion-sweep" => Experiment::Dispersion,
            "boost-point" => Experiment::BoostPoint,
            "boost-localized" => Experiment::BoostLocalized,
            "boost-packet" => Experiment::BoostPacket,
            "relative-locality" => Experiment::RelativeLocality,
            "evolve" => Experiment::Evolve,
            "verify" => Experiment::Verify,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown experiment '{other}'"
                )))
            }
        })
    }
}

/// Initial state used by `boost-localized` and `evolve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Gaussian packets built from `k0`, `sigma_k` and `x0`.
    Packet,
    /// A single occupied cell with spinor `(1, 0)`.
    LocalizedR,
    /// A single occupied cell with spinor `(0, 1)`.
    LocalizedL,
    /// A single occupied cell with spinor `(1, 1) / sqrt 2`.
    LocalizedSym,
}

impl FromStr for InitialState {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "packet" => InitialState::Packet,
            "r" | "localized-r" => InitialState::LocalizedR,
            "l" | "localized-l" => InitialState::LocalizedL,
            "sym" | "localized-sym" => InitialState::LocalizedSym,
            other => {
                return Err(CliError::Validation(format!(
                    "state must be one of packet, r, l, sym; got '{other}'"
                )))
            }
        })
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialState::Packet => "packet",
            InitialState::LocalizedR => "r",
            InitialState::LocalizedL => "l",
            InitialState::LocalizedSym => "sym",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub masses: Vec<f64>,
    pub betas: Vec<f64>,
    pub cells: usize,
    pub k0: Vec<f64>,
    pub sigma_k: f64,
    /// Packet centres, or the occupied cell of a localized state, in centred coordinates.
    pub x0: Vec<f64>,
    pub steps: u64,
    /// Sampling interval of `evolve` and of the relative-locality fits.
    pub sample_every: u64,
    /// Number of points of the uniform k-grid of `dispersion` and `boost-point`.
    pub k_samples: usize,
    pub state: InitialState,
    pub event_t: f64,
    pub event_x: f64,
    pub out: PathBuf,
    pub seed: u64,
    /// Overrides the sample count of every randomized suite of `verify`.
    pub samples: Option<usize>,
    /// Tolerance overrides for `verify`, keyed by suite name.
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            masses: vec![0.1],
            betas: vec![-0.99],
            cells: 1024,
            k0: vec![0.3],
            sigma_k: 0.02,
            x0: vec![0.0],
            steps: 500,
            sample_every: 50,
            k_samples: 1001,
            state: InitialState::Packet,
            event_t: 800.0,
            event_x: 0.0,
            out: PathBuf::from("out"),
            seed: 0,
            samples: None,
            tolerances: BTreeMap::new(),
        };
        match experiment {
            Experiment::Dispersion => Self {
                masses: vec![0.1, 0.2, 0.4, 0.8, 1.0],
                ..base
            },
            Experiment::BoostPoint => Self {
                masses: vec![0.1, 0.3, 0.8],
                betas: vec![-0.99, 0.4, 0.8, 0.99],
                ..base
            },
            Experiment::BoostLocalized => Self {
                masses: vec![0.1, 0.3, 0.8],
                betas: vec![-0.99, 0.4, 0.8, 0.99],
                state: InitialState::LocalizedR,
                ..base
            },
            Experiment::BoostPacket => Self {
                cells: 2048,
                ..base
            },
            Experiment::RelativeLocality => Self {
                betas: vec![-0.5],
                cells: 1 << 14,
                k0: vec![0.05, PI / 5.0],
                sigma_k: 0.002,
                steps: 1000,
                sample_every: 100,
                ..base
            },
            Experiment::Evolve => Self {
                cells: 4096,
                x0: vec![-600.0],
                ..base
            },
            Experiment::Verify => base,
        }
    }

    /// Defaults for `experiment`, overlaid with the entries of a config file.
    pub fn from_file(experiment: Experiment, path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::defaults(experiment);
        for (key, value) in parse_pairs(&text)? {
            cfg.set(&key, &value)?;
        }
        Ok(cfg)
    }

    /// Set a field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "experiment" => {
                let named: Experiment = value.parse()?;
                if named != self.experiment {
                    return Err(CliError::Validation(format!(
                        "config names experiment '{}' but '{}' was requested",
                        named.name(),
                        self.experiment.name()
                    )));
                }
            }
            "mass" | "masses" => self.masses = parse_list(key, value)?,
            "beta" | "betas" => self.betas = parse_list(key, value)?,
            "cells" | "n_cells" => self.cells = parse_scalar(key, value)?,
            "k0" => self.k0 = parse_list(key, value)?,
            "sigma_k" | "sigma-k" => self.sigma_k = parse_scalar(key, value)?,
            "x0" => self.x0 = parse_list(key, value)?,
            "steps" => self.steps = parse_scalar(key, value)?,
            "sample_every" => self.sample_every = parse_scalar(key, value)?,
            "k_samples" => self.k_samples = parse_scalar(key, value)?,
            "state" => self.state = value.parse()?,
            "event_t" => self.event_t = parse_scalar(key, value)?,
            "event_x" => self.event_x = parse_scalar(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = parse_scalar(key, value)?,
            "samples" => self.samples = Some(parse_scalar(key, value)?),
            _ => match key.strip_prefix("tol.") {
                Some(suite) if !suite.is_empty() => {
                    self.tolerances
                        .insert(suite.to_string(), parse_scalar(key, value)?);
                }
                _ => return Err(CliError::Validation(format!("unknown config key '{key}'"))),
            },
        }
        Ok(())
    }

    /// Check every field against the preconditions of the operations it feeds.
    pub fn validate(&self) -> CliResult<()> {
        let fail = |msg: String| Err(CliError::Validation(msg));
        if self.masses.is_empty() {
            return fail("mass list must be nonempty".into());
        }
        for &m in &self.masses {
            MassParam::new(m).map_err(CliError::from)?;
        }
        for &b in &self.betas {
            Boost::new(b).map_err(CliError::from)?;
        }
        for (suite, &tol) in &self.tolerances {
            if !(tol.is_finite() && tol > 0.0) {
                return fail(format!(
                    "tolerance for '{suite}' must be positive, got {tol}"
                ));
            }
        }
        if self.samples == Some(0) {
            return fail("samples must be at least 1".into());
        }
        let needs_lattice = !matches!(
            self.experiment,
            Experiment::Dispersion | Experiment::BoostPoint | Experiment::Verify
        );
        if needs_lattice && (self.cells < 8 || !self.cells.is_multiple_of(2)) {
            return fail(format!(
                "cells must be an even number >= 8, got {}",
                self.cells
            ));
        }
        match self.experiment {
            Experiment::Dispersion | Experiment::BoostPoint => {
                if self.k_samples < 2 {
                    return fail(format!("k_samples must be >= 2, got {}", self.k_samples));
                }
                if self.experiment == Experiment::BoostPoint && self.betas.is_empty() {
                    return fail("beta list must be nonempty".into());
                }
            }
            Experiment::BoostLocalized => {
                self.require_betas()?;
                if self.state == InitialState::Packet {
                    return fail("boost-localized needs a localized state (r, l or sym)".into());
                }
                self.check_cells_in_range()?;
            }
            Experiment::BoostPacket => {
                self.require_betas()?;
                self.check_packets()?;
            }
            Experiment::Evolve => {
                if self.sample_every == 0 {
                    return fail("sample_every must be >= 1".into());
                }
                if self.state == InitialState::Packet {
                    self.check_packets()?;
                } else {
                    self.check_cells_in_range()?;
                }
            }
            Experiment::RelativeLocality => {
                if self.masses.len() != 1 || self.betas.len() != 1 {
                    return fail("relative-locality takes exactly one mass and one beta".into());
                }
                if self.k0.len() != 2 {
                    return fail(format!(
                        "relative-locality needs k0 = k1, k2 (two values), got {}",
                        self.k0.len()
                    ));
                }
                if self.k0.contains(&0.0) {
                    return fail("relative-locality couples need k != 0".into());
                }
                if self.sample_every == 0 || self.steps < self.sample_every {
                    return fail("relative-locality needs 1 <= sample_every <= steps".into());
                }
                if !(self.event_t.is_finite() && self.event_x.is_finite()) {
                    return fail("event coordinates must be finite".into());
                }
                let mass = MassParam::new(self.masses[0]).map_err(CliError::from)?;
                for &k in &self.k0 {
                    for k in [k, -k] {
                        GaussianPacket {
                            k0: k,
                            sigma_k: self.sigma_k,
                            x0: 0.0,
                            mass,
                        }
                        .validate()
                        .map_err(CliError::from)?;
                    }
                }
            }
            Experiment::Verify => {}
        }
        Ok(())
    }

    fn require_betas(&self) -> CliResult<()> {
        if self.betas.is_empty() {
            Err(CliError::Validation("beta list must be nonempty".into()))
        } else {
            Ok(())
        }
    }

    fn check_cells_in_range(&self) -> CliResult<()> {
        let half = (self.cells / 2) as f64;
        for &x in &self.x0 {
            if x.fract() != 0.0 || x < -half || x >= half {
                return Err(CliError::Validation(format!(
                    "localized cell x0 = {x} must be an integer in [-{half}, {half})"
                )));
            }
        }
        if self.x0.len() != 1 {
            return Err(CliError::Validation(
                "a localized state takes exactly one x0".into(),
            ));
        }
        Ok(())
    }

    /// The `(k0, x0)` pairs of the packets; a single `x0` is shared by all.
    pub fn packet_pairs(&self) -> CliResult<Vec<(f64, f64)>> {
        if self.k0.is_empty() {
            return Err(CliError::Validation("k0 list must be nonempty".into()));
        }
        match self.x0.len() {
            1 => Ok(self.k0.iter().map(|&k| (k, self.x0[0])).collect()),
            n if n == self.k0.len() => Ok(self.k0.iter().copied().zip(self.x0.clone()).collect()),
            n => Err(CliError::Validation(format!(
                "x0 list must have one entry or one per k0 ({}), got {n}",
                self.k0.len()
            ))),
        }
    }

    fn check_packets(&self) -> CliResult<()> {
        let half = (self.cells / 2) as f64;
        for (k, x) in self.packet_pairs()? {
            if !(x.is_finite() && x.abs() < half) {
                return Err(CliError::Validation(format!(
                    "packet centre x0 = {x} must lie inside (-{half}, {half})"
                )));
            }
            for &m in &self.masses {
                GaussianPacket {
                    k0: k,
                    sigma_k: self.sigma_k,
                    x0: x,
                    mass: MassParam::new(m).map_err(CliError::from)?,
                }
                .validate()
                .map_err(CliError::from)?;
            }
        }
        Ok(())
    }

    /// `key = value` lines reproducing this configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = vec![
            ("experiment".to_string(), self.experiment.name().to_string()),
            ("mass".into(), list(&self.masses)),
            ("beta".into(), list(&self.betas)),
            ("cells".into(), self.cells.to_string()),
            ("k0".into(), list(&self.k0)),
            ("sigma_k".into(), format!("{:?}", self.sigma_k)),
            ("x0".into(), list(&self.x0)),
            ("steps".into(), self.steps.to_string()),
            ("sample_every".into(), self.sample_every.to_string()),
            ("k_samples".into(), self.k_samples.to_string()),
            ("state".into(), self.state.to_string()),
            ("event_t".into(), format!("{:?}", self.event_t)),
            ("event_x".into(), format!("{:?}", self.event_x)),
            ("out".into(), self.out.display().to_string()),
            ("seed".into(), self.seed.to_string()),
        ];
        if let Some(s) = self.samples {
            out.push(("samples".into(), s.to_string()));
        }
        for (suite, tol) in &self.tolerances {
            out.push((format!("tol.{suite}"), format!("{tol:?}")));
        }
        out
    }
}

/// Split a config text into `(key, value)` pairs, rejecting malformed lines
/// and repeated keys.
pub fn parse_pairs(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(CliError::Validation(format!(
                "line {}: empty key",
                lineno + 1
            )));
        }
        if !seen.insert(key.to_string()) {
            return Err(CliError::Validation(format!(
                "line {}: duplicate key '{key}'",
                lineno + 1
            )));
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Validation(format!("cannot parse '{value}' for key '{key}'")))
}

/// Comma-separated numbers; `pi`, `-pi` and `pi/N` are accepted as shorthands.
pub fn parse_list(key: &str, value: &str) -> CliResult<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            parse_number(s)
                .ok_or_else(|| CliError::Validation(format!("cannot parse '{s}' for key '{key}'")))
        })
        .collect()
}

fn parse_number(s: &str) -> Option<f64> {
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (body, 1.0),
    };
    let coeff = match num.strip_suffix("pi").map(str::trim) {
        Some("") => 1.0,
        Some(c) => c
            .strip_suffix('*')
            .unwrap_or(c)
            .trim()
            .parse::<f64>()
            .ok()?,
        None => return None,
    };
    Some(sign * coeff * PI / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let text = "# header\nmass = 0.1, 0.2  # two masses\n\nbeta=-0.5\n";
        let pairs = parse_pairs(text).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0], ("mass".into(), "0.1, 0.2".into()));
        assert!(parse_pairs("mass 0.1").is_err());
        assert!(parse_pairs("mass = 1\nmass = 2").is_err());
    }

    #[test]
    fn pi_shorthands() {
        let v = parse_list("k0", "pi/5, -pi, 0.25, 2pi/3").unwrap();
        assert_eq!(v, vec![PI / 5.0, -PI, 0.25, 2.0 * PI / 3.0]);
        assert!(parse_list("k0", "tau").is_err());
    }

    #[test]
    fn validation_names_precondition() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Dispersion);
        cfg.set("mass", "1.5").unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("mass must lie in [0, 1]"), "{err}");

        let mut cfg = ExperimentConfig::defaults(Experiment::BoostPacket);
        cfg.set("k0", "1.55").unwrap();
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .contains("fixed point"));

        let mut cfg = ExperimentConfig::defaults(Experiment::BoostPacket);
        cfg.set("cells", "1023").unwrap();
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::defaults(Experiment::RelativeLocality);
        cfg.set("k0", "0.3").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn defaults_validate() {
        for e in [
            Experiment::Dispersion,
            Experiment::BoostPoint,
            Experiment::BoostLocalized,
            Experiment::BoostPacket,
            Experiment::RelativeLocality,
            Experiment::Evolve,
            Experiment::Verify,
        ] {
            ExperimentConfig::defaults(e).validate().unwrap();
        }
    }

    #[test]
    fn unknown_and_mismatched_keys() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Evolve);
        assert!(cfg.set("colour", "red").is_err());
        assert!(cfg.set("experiment", "boost-point").is_err());
        cfg.set("experiment", "evolve").unwrap();
        cfg.set("tol.dispersion", "1e-10").unwrap();
        assert_eq!(cfg.tolerances["dispersion"], 1e-10);
    }
}
