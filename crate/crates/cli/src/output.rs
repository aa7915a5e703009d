//! Plot-ready output: CSV tables with full double precision and key-value reports.

use std::fs;
use std::path::{Path, PathBuf};

use qca_dsr::engine::{signed_position, LatticeState, SpectralAmplitude};

use crate::error::{CliError, CliResult};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `contents` to `path` through a temporary sibling and a rename, so a
/// reader never observes a half-written file.
fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a row; its length must match the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width differs from header"
        );
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        // Writing into a Vec cannot fail.
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, &self.to_bytes())
    }
}

/// Position-space state with columns `x, re_psi_r, im_psi_r, re_psi_l, im_psi_l`,
/// ordered by centred coordinate.
pub fn state_table(state: &LatticeState) -> Table {
    let n = state.n_cells();
    let mut t = Table::new(&["x", "re_psi_r", "im_psi_r", "re_psi_l", "im_psi_l"]);
    for i in (n / 2..n).chain(0..n / 2) {
        let (r, l) = (state.psi_r()[i], state.psi_l()[i]);
        t.push_numbers(&[signed_position(i, n), r.re, r.im, l.re, l.im]);
    }
    t
}

/// Invariant amplitude with columns `k, re_g, im_g, mu`.
pub fn spectral_table(amp: &SpectralAmplitude) -> Table {
    let mut t = Table::new(&["k", "re_g", "im_g", "mu"]);
    let g = amp.invariant();
    let mu = amp.measure();
    for (j, (g, mu)) in g.iter().zip(&mu).enumerate() {
        t.push_numbers(&[amp.momentum(j), g.re, g.im, *mu]);
    }
    t
}

/// A `key = value` text report.
pub fn write_report(path: &Path, entries: &[(String, String)]) -> CliResult<()> {
    let mut text = String::new();
    for (k, v) in entries {
        text.push_str(k);
        text.push_str(" = ");
        text.push_str(v);
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for &x in &[0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push_numbers(&[1.0, -2.0]);
        let s = String::from_utf8(t.to_bytes()).unwrap();
        assert_eq!(s, "a,b\n1.0000000000000000e0,-2.0000000000000000e0\n");
    }

    #[test]
    fn state_rows_are_centred() {
        let s = LatticeState::zeros(4).unwrap();
        let t = state_table(&s);
        let text = String::from_utf8(t.to_bytes()).unwrap();
        let xs: Vec<&str> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .collect();
        assert_eq!(xs[0], fmt_f64(-2.0));
        assert_eq!(xs[3], fmt_f64(1.0));
    }
}
