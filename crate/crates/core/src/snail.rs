//! SNAIL parameter records for 2×2 Hamiltonians and the cross-Kerr CZ.
//!
//! With `H₀₁ = R e^{iφ}` and `b = a e^{iφ}`, the single-mode image of a 2×2
//! Hermitian `H` is
//!
//! ```text
//! H₀₀ + ω b†b + 2R (b + b†) + g₃ (b + b†)³ − g₃ (b†³ + b³),   g₃ = −R/3,
//! ```
//!
//! which equals `H₀₀ + ω b†b + R(b + b†) − R(b†b² + b†²b)` term by term and
//! therefore never couples `{|0⟩, |1⟩}` to higher levels.

use std::f64::consts::{PI, TAU};

use ndarray::{array, Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SbmError};
use crate::fock::{ladder, matrix_power, number_diag, truncate, BosonicOperator, FockCutoff};
use crate::numerics::{dagger, expm_hermitian, identity, ComplexMatrix, HermitianMatrix, C64};

/// Hardware parameters of one driven SNAIL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnailParams {
    /// Constant energy `H₀₀`.
    pub offset: f64,
    /// Oscillator frequency `ħω = H₁₁ − H₀₀`.
    pub omega: f64,
    /// Coefficient `2R` of `(b + b†)`.
    pub drive: f64,
    /// Third-order coupling `g₃ = −R/3`.
    pub g3: f64,
    /// Drive phase `φ ∈ (−π, π]`.
    pub phase: f64,
    /// Fourth-order coupling, always zero.
    #[serde(default)]
    pub g4: f64,
}

impl SnailParams {
    /// Displacement `R = |H₀₁|`.
    pub fn r12(&self) -> f64 {
        self.drive / 2.0
    }

    /// `ω ≤ 0`: allowed here, but a physical oscillator would be unstable.
    pub fn is_energetically_unstable(&self) -> bool {
        self.omega <= 0.0
    }

    /// The 2×2 Hamiltonian these parameters encode.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let h01 = C64::from_polar(self.r12(), self.phase);
        array![
            [C64::new(self.offset, 0.0), h01],
            [h01.conj(), C64::new(self.offset + self.omega, 0.0)]
        ]
    }

    /// Fold a global phase `e^{iγ}` into the record (`offset −= γ`).
    pub fn with_global_phase(mut self, gamma: f64) -> Self {
        self.offset -= gamma;
        self
    }

    pub(crate) fn check(&self) -> Result<()> {
        let fields = [self.offset, self.omega, self.drive, self.g3, self.phase, self.g4];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(SbmError::InvalidParameter("non-finite SNAIL parameter".into()));
        }
        if self.drive < 0.0 {
            return Err(SbmError::InvalidParameter("drive must be non-negative".into()));
        }
        if self.g4 != 0.0 {
            return Err(SbmError::InvalidParameter("g4 must be zero".into()));
        }
        let tol = 1e-12 * self.drive.max(1.0);
        if (self.g3 + self.r12() / 3.0).abs() > tol {
            return Err(SbmError::InvalidParameter(format!(
                "g3 = {} inconsistent with drive = {}",
                self.g3, self.drive
            )));
        }
        Ok(())
    }
}

/// Controlled-phase between two modes, `exp(−i χt n₁n₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossKerrGate {
    pub chi_t: f64,
    pub modes: [usize; 2],
}

impl CrossKerrGate {
    /// `χt = π`, which is CZ on the qubit subspace.
    pub fn cz(a: usize, b: usize) -> Self {
        Self {
            chi_t: PI,
            modes: [a, b],
        }
    }
}

/// Map `(−π, π]`; `atan2` can return `−π` for a negative-zero imaginary part.
fn principal_angle(x: f64) -> f64 {
    let y = x - TAU * ((x + PI) / TAU).floor();
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Read the SNAIL parameters off a 2×2 Hermitian matrix.
pub fn compile_1q(h: &HermitianMatrix) -> Result<SnailParams> {
    if h.dim() != 2 {
        return Err(SbmError::DimensionMismatch {
            expected: 2,
            got: h.dim(),
        });
    }
    let h01 = h[(0, 1)];
    let r = h01.norm();
    let phase = if r == 0.0 { 0.0 } else { principal_angle(h01.arg()) };
    Ok(SnailParams {
        offset: h[(0, 0)].re,
        omega: h[(1, 1)].re - h[(0, 0)].re,
        drive: 2.0 * r,
        g3: -r / 3.0,
        phase,
        g4: 0.0,
    })
}

/// Single-mode operator realized by `p`, truncated at `cutoff` (`D ≥ 3`).
pub fn snail_operator(p: &SnailParams, cutoff: FockCutoff) -> Result<BosonicOperator> {
    if cutoff.levels() < 3 {
        return Err(SbmError::CutoffTooSmall {
            required: 3,
            got: cutoff.levels(),
        });
    }
    p.check()?;
    let d = cutoff.levels();
    let padded = d + 3;
    let b = ladder(padded).mapv(|z| z * C64::from_polar(1.0, p.phase));
    let bd = dagger(&b);
    let x = &b + &bd;
    let cubic = &matrix_power(&b, 3) + &matrix_power(&bd, 3);
    let n = number_diag(padded);
    let mut h = identity(padded).mapv(|z| z * p.offset);
    h.scaled_add(C64::new(p.omega, 0.0), &n);
    h.scaled_add(C64::new(p.drive, 0.0), &x);
    h.scaled_add(C64::new(p.g3, 0.0), &matrix_power(&x, 3));
    h.scaled_add(C64::new(-p.g3, 0.0), &cubic);
    BosonicOperator::new(1, cutoff, truncate(&h, d))
}

/// `exp(−i H_snail)` for unit gate time.
pub fn snail_unitary(p: &SnailParams, cutoff: FockCutoff) -> Result<ComplexMatrix> {
    let op = snail_operator(p, cutoff)?;
    expm_hermitian(op.matrix(), 1.0)
}

/// Reduce to `(−2π, 0]`, the branch on which `ω = −λ ≥ 0`.
fn nonpositive_angle(lambda: f64) -> f64 {
    let y = lambda - TAU * (lambda / TAU).ceil();
    if y <= -TAU {
        y + TAU
    } else {
        y
    }
}

/// Parameters of `diag(1, e^{iλ})` via `H = diag(0, −λ)`, with `λ` moved to
/// `(−2π, 0]` so that `ω ≥ 0`.
pub fn rz_params(lambda: f64) -> SnailParams {
    let l = nonpositive_angle(lambda);
    SnailParams {
        offset: 0.0,
        omega: -l,
        drive: 0.0,
        g3: 0.0,
        phase: 0.0,
        g4: 0.0,
    }
}

/// Parameters of `R_x(θ)` via `H = [[0, θ/2], [θ/2, 0]]`.
pub fn rx_params(theta: f64) -> SnailParams {
    let r = (theta / 2.0).abs();
    SnailParams {
        offset: 0.0,
        omega: 0.0,
        drive: 2.0 * r,
        g3: -r / 3.0,
        phase: if theta < 0.0 { PI } else { 0.0 },
        g4: 0.0,
    }
}

/// `exp(−iπ N⊗N)` on two modes, mode 0 most significant.
pub fn cross_kerr_cz(cutoff: FockCutoff) -> Result<BosonicOperator> {
    cross_kerr(PI, cutoff)
}

/// `exp(−i χt N⊗N)` on two modes.
pub fn cross_kerr(chi_t: f64, cutoff: FockCutoff) -> Result<BosonicOperator> {
    let d = cutoff.levels();
    if d < 2 {
        return Err(SbmError::CutoffTooSmall { required: 2, got: d });
    }
    let diag = Array1::from_iter((0..d * d).map(|i| {
        let n1 = (i / d) as f64;
        let n2 = (i % d) as f64;
        C64::from_polar(1.0, -chi_t * n1 * n2)
    }));
    BosonicOperator::new(2, cutoff, Array2::from_diag(&diag))
}
