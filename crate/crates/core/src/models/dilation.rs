//! Unitary dilation of a real 2×2 population map and its execution on the
//! compiled two-mode circuit.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::SVD;

use crate::error::{Result, SbmError};
use crate::fock::FockCutoff;
use crate::numerics::{from_real, ComplexMatrix, C64};
use crate::simulate::{FockState, PreparedCircuit};
use crate::transpile::{compile_circuit, transpile};

use super::spin_boson::check_distribution;

/// Slack on `σ_max ≤ 1` accepted by [`dilate_strict`].
pub const CONTRACTION_TOL: f64 = 1e-8;

/// `U = [[Q, S1], [S2, −Qᵀ]]` with `Q = P/rescale`, `S1 = √(I − QQᵀ)`,
/// `S2 = √(I − QᵀQ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedUnitary {
    pub matrix: Array2<f64>,
    pub rescale: f64,
    pub singular_values: [f64; 2],
}

impl DilatedUnitary {
    pub fn complex(&self) -> ComplexMatrix {
        from_real(&self.matrix)
    }

    /// `max |UᵀU − I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let g = self.matrix.t().dot(&self.matrix) - Array2::<f64>::eye(4);
        g.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn svd2(p: &Array2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    if p.dim() != (2, 2) {
        return Err(SbmError::DimensionMismatch {
            expected: 4,
            got: p.len(),
        });
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(SbmError::InvalidParameter("non-finite map entry".into()));
    }
    let (u, sv, vt) = p.svd(true, true).map_err(|e| SbmError::EigenSolver(e.to_string()))?;
    Ok((u.expect("requested"), sv, vt.expect("requested")))
}

/// Largest singular value.
pub(crate) fn spectral_norm(p: &Array2<f64>) -> Result<f64> {
    Ok(svd2(p)?.1[0])
}

fn build(p: &Array2<f64>, strict: bool) -> Result<DilatedUnitary> {
    let (w, sv, xt) = svd2(p)?;
    let sigma_max = sv[0];
    if strict && sigma_max > 1.0 + CONTRACTION_TOL {
        return Err(SbmError::NonContractive { sigma_max });
    }
    let rescale = if strict { 1.0 } else { sigma_max.max(1.0) };
    let q = p / rescale;
    let defect = sv.mapv(|s| (1.0 - (s / rescale).powi(2)).max(0.0).sqrt());
    let x = xt.t();
    let s1 = w.dot(&Array2::from_diag(&defect)).dot(&w.t());
    let s2 = x.dot(&Array2::from_diag(&defect)).dot(&xt);

    let mut m = Array2::<f64>::zeros((4, 4));
    m.slice_mut(s![..2, ..2]).assign(&q);
    m.slice_mut(s![..2, 2..]).assign(&s1);
    m.slice_mut(s![2.., ..2]).assign(&s2);
    m.slice_mut(s![2.., 2..]).assign(&q.t().mapv(|v| -v));
    Ok(DilatedUnitary {
        matrix: m,
        rescale,
        singular_values: [sv[0], sv[1]],
    })
}

/// Dilate `P`, dividing by `σ_max` first whenever `σ_max > 1`.
pub fn dilate(p: &Array2<f64>) -> Result<DilatedUnitary> {
    build(p, false)
}

/// Dilate `P`, refusing maps with `σ_max > 1 + CONTRACTION_TOL`.
pub fn dilate_strict(p: &Array2<f64>) -> Result<DilatedUnitary> {
    build(p, true)
}

fn padded(v: &[f64]) -> Result<Array1<f64>> {
    if v.len() != 2 {
        return Err(SbmError::DimensionMismatch {
            expected: 2,
            got: v.len(),
        });
    }
    check_distribution(v)?;
    Ok(Array1::from(vec![v[0], v[1], 0.0, 0.0]))
}

/// `rescale · (U [v; 0])[..2]`, which equals `P v`.
pub fn dilated_step(d: &DilatedUnitary, v: &[f64]) -> Result<[f64; 2]> {
    let out = d.matrix.dot(&padded(v)?) * d.rescale;
    Ok([out[0], out[1]])
}

/// Result of running one dilated step on the compiled two-mode circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilatedCircuitStep {
    pub populations: [f64; 2],
    /// Weight outside the two-qubit subspace after the circuit.
    pub leakage: f64,
    /// Largest `|Im|` among the two read-out amplitudes.
    pub imaginary: f64,
}

/// Same as [`dilated_step`], with `U` transpiled, compiled to SNAIL and
/// cross-Kerr gates and applied to `v/‖v‖` encoded on two modes.
pub fn dilated_circuit_step(d: &DilatedUnitary, v: &[f64], cutoff: FockCutoff) -> Result<DilatedCircuitStep> {
    let x = padded(v)?;
    let norm = x.dot(&x).sqrt();
    let circuit = compile_circuit(&transpile(&d.complex())?)?;
    let qubits = x.mapv(|a| C64::new(a / norm, 0.0));
    let initial = FockState::from_qubits(2, cutoff, &qubits)?;
    let out = PreparedCircuit::new(&circuit, cutoff)?.run(&initial)?;
    let amps = out.qubit_amplitudes();
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let scale = norm * d.rescale;
    Ok(DilatedCircuitStep {
        populations: [amps[0].re * scale, amps[1].re * scale],
        leakage: (1.0 - kept).max(0.0),
        imaginary: amps[0].im.abs().max(amps[1].im.abs()),
    })
}
