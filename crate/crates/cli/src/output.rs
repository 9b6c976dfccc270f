//! CSV output. Numbers are written as the shortest decimal that parses back
//! to the same `f64`, so files are byte-stable across runs and platforms.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qtraj_core::statespace::{DensityMatrix, StateVector};

use crate::error::{CliError, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: PathBuf, header: &[String]) -> Result<Self> {
        let file = File::create(&path).map_err(|source| CliError::Write { path: path.clone(), source })?;
        let mut w = Self { path, out: BufWriter::new(file) };
        w.line(header.join(","))?;
        Ok(w)
    }

    fn line(&mut self, line: String) -> Result<()> {
        writeln!(self.out, "{line}").map_err(|source| CliError::Write { path: self.path.clone(), source })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        self.line(values.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","))
    }

    pub fn raw_row(&mut self, fields: &[String]) -> Result<()> {
        self.line(fields.join(","))
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush().map_err(|source| CliError::Write { path: self.path.clone(), source })?;
        Ok(self.path)
    }
}

/// `t,re_rho_0_0,im_rho_0_0,...`, row-major over the matrix.
pub fn density_header(dim: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..dim {
        for j in 0..dim {
            h.push(format!("re_rho_{i}_{j}"));
            h.push(format!("im_rho_{i}_{j}"));
        }
    }
    h
}

pub fn density_row(t: f64, rho: &DensityMatrix) -> Vec<f64> {
    let mut row = vec![t];
    for z in rho.entries().iter() {
        row.push(z.re);
        row.push(z.im);
    }
    row
}

pub fn write_density_series(path: PathBuf, times: &[f64], states: &[DensityMatrix]) -> Result<PathBuf> {
    let dim = states.first().map_or(0, |s| s.dim());
    let mut w = CsvWriter::create(path, &density_header(dim))?;
    for (t, rho) in times.iter().zip(states) {
        w.row(&density_row(*t, rho))?;
    }
    w.finish()
}

pub fn state_columns(dim: usize) -> Vec<String> {
    (0..dim).flat_map(|k| [format!("re_psi_{k}"), format!("im_psi_{k}")]).collect()
}

pub fn push_state(row: &mut Vec<f64>, psi: &StateVector) {
    for z in psi.amplitudes() {
        row.push(z.re);
        row.push(z.im);
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })
}
