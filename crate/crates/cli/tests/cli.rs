use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qca-dsr"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, sub: &str, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec![sub, "--out", out];
    args.extend_from_slice(extra);
    run(&args)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn assert_ok(o: &Output) {
    assert_eq!(
        code(o),
        0,
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
}

/// Header and rows of a CSV file; numeric columns parsed where possible.
struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Self {
        let mut r =
            csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let header = r.headers().unwrap().iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
            .collect();
        Self { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    fn f(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }

    fn s(&self, row: usize, name: &str) -> &str {
        &self.rows[row][self.col(name)]
    }
}

fn report(path: &Path) -> BTreeMap<String, String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn dispersion_rows_have_the_expected_limits() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), "dispersion", &["--mass", "0,1"]);
    assert_ok(&o);
    let t = Csv::read(&dir.path().join("dispersion.csv"));
    assert_eq!(t.header, ["m", "k", "omega", "v"]);
    let mut seen = [0, 0];
    for i in 0..t.rows.len() {
        let (m, k, omega, v) = (t.f(i, "m"), t.f(i, "k"), t.f(i, "omega"), t.f(i, "v"));
        if m == 1.0 {
            assert!((omega - FRAC_PI_2).abs() < 1e-15, "row {i}");
            assert_eq!(v, 0.0);
            seen[1] += 1;
        } else {
            assert!(
                (omega - k.abs()).abs() < 1e-12,
                "row {i}: omega {omega} k {k}"
            );
            seen[0] += 1;
        }
    }
    assert!(seen[0] > 100 && seen[0] == seen[1]);
}

#[test]
fn every_float_uses_full_precision_scientific_format() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(dir.path(), "dispersion", &["--mass", "0.3"]));
    let t = Csv::read(&dir.path().join("dispersion.csv"));
    for field in t.rows.iter().flatten() {
        let (mantissa, _) = field.split_once('e').expect("scientific notation");
        let digits = mantissa.trim_start_matches('-').split_once('.').unwrap().1;
        assert_eq!(digits.len(), 16, "{field}");
    }
}

#[test]
fn invalid_parameters_exit_with_validation_code() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&run_in(dir.path(), "dispersion", &["--mass", "1.5"])),
        1
    );
    assert_eq!(
        code(&run_in(dir.path(), "boost-point", &["--beta", "1.0"])),
        1
    );
    assert_eq!(
        code(&run_in(dir.path(), "boost-packet", &["--sigma-k", "-0.1"])),
        1
    );
    assert_eq!(code(&run(&["no-such-command"])), 1);
    let cfg = write_config(dir.path(), "unknown_key = 3\n");
    assert_eq!(
        code(&run_in(
            dir.path(),
            "dispersion",
            &["--config", cfg.to_str().unwrap()]
        )),
        1
    );
}

#[test]
fn numerical_failure_exits_with_code_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "# impossible bound\ntol.oracle = 1e-300\nsamples = 200\n",
    );
    let o = run_in(dir.path(), "verify", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let t = Csv::read(&dir.path().join("verify_report.csv"));
    let oracle = (0..t.rows.len())
        .find(|&i| t.s(i, "suite") == "oracle")
        .unwrap();
    assert_eq!(t.s(oracle, "status"), "fail");
}

#[test]
fn io_failures_exit_with_code_three() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.cfg");
    assert_eq!(
        code(&run_in(
            dir.path(),
            "dispersion",
            &["--config", missing.to_str().unwrap()]
        )),
        3
    );
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    assert_eq!(code(&run_in(&blocker.join("sub"), "dispersion", &[])), 3);
}

#[test]
fn help_exits_cleanly() {
    let o = run(&["--help"]);
    assert_ok(&o);
    assert!(String::from_utf8_lossy(&o.stdout).contains("relative-locality"));
}

#[test]
fn identical_seeds_give_identical_files() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        assert_ok(&run_in(dir.path(), "verify", &["--seed", "42"]));
    }
    let read = |d: &TempDir| fs::read(d.path().join("verify_report.csv")).unwrap();
    assert_eq!(read(&a), read(&b));

    let c = TempDir::new().unwrap();
    assert_ok(&run_in(c.path(), "verify", &["--seed", "43"]));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn unboosted_localized_density_is_unchanged() {
    let dir = TempDir::new().unwrap();
    let o = run_in(
        dir.path(),
        "boost-localized",
        &["--mass", "0.3", "--beta", "0", "--cells", "256"],
    );
    assert_ok(&o);
    let density = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().ends_with("_density.csv"))
        .expect("density file");
    let t = Csv::read(&density);
    assert_eq!(t.header, ["x", "p_lab", "p_boosted"]);
    assert_eq!(t.rows.len(), 256);
    for i in 0..t.rows.len() {
        assert!((t.f(i, "p_lab") - t.f(i, "p_boosted")).abs() < 1e-12);
    }
}

#[test]
fn packet_norms_are_preserved_and_states_sum_to_one() {
    let dir = TempDir::new().unwrap();
    let o = run_in(
        dir.path(),
        "boost-packet",
        &[
            "--mass",
            "0.1",
            "--beta",
            "-0.99",
            "--k0",
            "0.3",
            "--sigma-k",
            "0.02",
            "--cells",
            "2048",
        ],
    );
    assert_ok(&o);
    let t = Csv::read(&dir.path().join("packet_summary.csv"));
    assert_eq!(t.rows.len(), 2);
    let (lab, boosted) = (t.f(0, "norm"), t.f(1, "norm"));
    assert_eq!(t.s(0, "frame"), "lab");
    assert!((lab - 1.0).abs() < 1e-10);
    assert!((boosted - lab).abs() < 1e-8);

    for frame in ["lab", "boosted"] {
        let path = dir
            .path()
            .join(format!("packet0_m0.1_b-0.99_{frame}_state.csv"));
        let s = Csv::read(&path);
        assert_eq!(
            s.header,
            ["x", "re_psi_r", "im_psi_r", "re_psi_l", "im_psi_l"]
        );
        let total: f64 = (0..s.rows.len())
            .map(|i| {
                ["re_psi_r", "im_psi_r", "re_psi_l", "im_psi_l"]
                    .iter()
                    .map(|c| s.f(i, c).powi(2))
                    .sum::<f64>()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-8, "{frame}: {total}");

        let path = dir
            .path()
            .join(format!("packet0_m0.1_b-0.99_{frame}_spectrum.csv"));
        let g = Csv::read(&path);
        assert_eq!(g.header, ["k", "re_g", "im_g", "mu"]);
        assert!((g.f(0, "k") + PI).abs() < 1e-12);
    }
}

fn small_locality_config(dir: &Path, k0: &str, beta: &str) -> PathBuf {
    write_config(
        dir,
        &format!(
            "# reduced relative-locality run\n\
             k0 = {k0}\n\
             beta = {beta}\n\
             mass = 0.1\n\
             cells = 4096\n\
             sigma_k = 0.01\n\
             event_t = 300\n\
             steps = 600\n\
             sample_every = 100\n"
        ),
    )
}

#[test]
fn locality_report_echoes_the_configuration() {
    let dir = TempDir::new().unwrap();
    let cfg = small_locality_config(dir.path(), "0.6, 1.0", "-0.5");
    assert_ok(&run_in(
        dir.path(),
        "relative-locality",
        &["--config", cfg.to_str().unwrap()],
    ));
    let r = report(&dir.path().join("relative_locality_report.txt"));
    assert_eq!(r["experiment"], "relative-locality");
    assert_eq!(r["cells"], "4096");
    assert_eq!(r["sigma_k"], "0.01");
    assert_eq!(r["beta"], "-0.5");
    assert_eq!(r["k0"], "0.6, 1.0");
    let emp: f64 = r["delta_emp"].parse().unwrap();
    let noise: f64 = r["fit_noise"].parse().unwrap();
    assert!(emp > 5.0 * noise);

    let t = Csv::read(&dir.path().join("relative_locality_trajectories.csv"));
    assert_eq!(&t.header[..4], ["t", "x_fit_pair1", "x_fit_pair2", "frame"]);
    let frames: Vec<&str> = (0..t.rows.len()).map(|i| t.s(i, "frame")).collect();
    assert!(frames.contains(&"lab") && frames.contains(&"boosted"));
}

#[test]
fn identical_couples_predict_no_separation() {
    let dir = TempDir::new().unwrap();
    let cfg = small_locality_config(dir.path(), "0.6, 0.6", "-0.5");
    assert_ok(&run_in(
        dir.path(),
        "relative-locality",
        &["--config", cfg.to_str().unwrap()],
    ));
    let r = report(&dir.path().join("relative_locality_report.txt"));
    assert_eq!(r["delta_pred"].parse::<f64>().unwrap(), 0.0);
    assert_eq!(r["delta_emp"].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn command_line_overrides_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "mass = 0.2\n");
    assert_ok(&run_in(
        dir.path(),
        "dispersion",
        &["--config", cfg.to_str().unwrap(), "--mass", "0.4"],
    ));
    let t = Csv::read(&dir.path().join("dispersion.csv"));
    assert!((0..t.rows.len()).all(|i| t.f(i, "m") == 0.4));
}
