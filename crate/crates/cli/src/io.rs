//! File formats read and written by the command-line driver.

use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use sbm::fock::BosonicOperator;
use sbm::transpile::Units;
use sbm::{ComplexMatrix, SbmError, C64};

use crate::CliError;

/// Reporting tolerance used when `SBM_TOL` is unset.
pub const DEFAULT_REPORT_TOL: f64 = 1e-13;

/// `SBM_TOL`, if set, replaces the reporting tolerance: the magnitude below
/// which operator entries are omitted from written artifacts.
pub fn report_tol() -> Result<f64, CliError> {
    match std::env::var("SBM_TOL") {
        Err(_) => Ok(DEFAULT_REPORT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
            _ => Err(CliError::Invalid(format!("SBM_TOL must be a non-negative number, got {s:?}"))),
        },
    }
}

fn default_units() -> Units {
    Units::Wavenumber
}

/// Dense matrix as row-major real and optional imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default = "default_units")]
    pub units: Units,
    pub real: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<Vec<f64>>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, units: Units) -> Self {
        let rows = |f: fn(&C64) -> f64| m.outer_iter().map(|r| r.iter().map(f).collect()).collect();
        let imag: Vec<Vec<f64>> = rows(|z| z.im);
        let has_imag = imag.iter().flatten().any(|&x| x != 0.0);
        Self {
            units,
            real: rows(|z| z.re),
            imag: has_imag.then_some(imag),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, SbmError> {
        let n = self.real.len();
        if n == 0 {
            return Err(SbmError::Empty);
        }
        let check = |rows: &Vec<Vec<f64>>| -> Result<(), SbmError> {
            if rows.len() != n {
                return Err(SbmError::DimensionMismatch {
                    expected: n,
                    got: rows.len(),
                });
            }
            for r in rows {
                if r.len() != n {
                    return Err(SbmError::NotSquare { rows: n, cols: r.len() });
                }
                if r.iter().any(|x| !x.is_finite()) {
                    return Err(SbmError::InvalidParameter("non-finite matrix entry".into()));
                }
            }
            Ok(())
        };
        check(&self.real)?;
        if let Some(im) = &self.imag {
            check(im)?;
        }
        Ok(ComplexMatrix::from_shape_fn((n, n), |(i, j)| {
            let im = self.imag.as_ref().map_or(0.0, |m| m[i][j]);
            C64::new(self.real[i][j], im)
        }))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(CliError::Failed)?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// Sparse listing of a single-mode operator on its truncated Fock space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub k: usize,
    pub cutoff: usize,
    pub units: Units,
    pub report_tol: f64,
    pub entries: Vec<Entry>,
}

impl OperatorFile {
    pub fn new(k: usize, op: &BosonicOperator, units: Units, report_tol: f64) -> Self {
        let entries = op
            .matrix()
            .indexed_iter()
            .filter(|(_, z)| z.norm() > report_tol)
            .map(|((row, col), z)| Entry {
                row,
                col,
                re: z.re,
                im: z.im,
            })
            .collect();
        Self {
            k,
            cutoff: op.cutoff().levels(),
            units,
            report_tol,
            entries,
        }
    }
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Failed)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.into()))?;
    text.push('\n');
    write_text(dir, name, &text)
}
