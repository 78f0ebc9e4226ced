//! Truncated Fock-space operators and the single-bosonic-mode (SBM) mapping.
//!
//! A `k×k` Hermitian matrix `H` is represented by the single-mode operator
//!
//! ```text
//! H_sbm = Σ_nm H_nm P_nm,
//! P_nm  = 1/(k−1)!² · √(m!/n!) · (a†)ⁿ Γ_k^{k−1} (a†)^{k−1−m},
//! Γ_k   = ((k−1) − N) a,
//! ```
//!
//! whose top `k×k` Fock block is `H` and which does not couple the first `k`
//! levels to the rest of the ladder.
//!
//! Operator polynomials are evaluated on a ladder padded by their raising
//! degree and then truncated to the requested cutoff, so every stored matrix
//! element equals the corresponding element of the untruncated operator. State
//! labels are 0-based throughout.

use ndarray::{s, Array2};

use crate::error::{Result, SbmError};
use crate::numerics::{dagger, identity, max_abs_diff, ComplexMatrix, HermitianMatrix, C64, C_ZERO};

/// Number of retained oscillator levels `D` (basis `|0⟩ … |D−1⟩`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(SbmError::CutoffTooSmall {
                required: 1,
                got: 0,
            });
        }
        Ok(Self(levels))
    }

    /// Smallest cutoff that maps a `k×k` matrix exactly: `2k − 1`.
    pub fn minimum_for(k: usize) -> Self {
        Self((2 * k).saturating_sub(1).max(1))
    }

    /// Default cutoff for a `k×k` mapping: `2k`, one level of headroom.
    pub fn default_for(k: usize) -> Self {
        Self((2 * k).max(1))
    }

    pub fn levels(self) -> usize {
        self.0
    }

    fn require(self, required: usize) -> Result<()> {
        if self.0 < required {
            return Err(SbmError::CutoffTooSmall {
                required,
                got: self.0,
            });
        }
        Ok(())
    }
}

/// Dense operator on `modes` oscillators, each truncated at the same cutoff.
///
/// Multi-mode basis index is `Σ_j n_j D^{modes−1−j}` (mode 0 most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct BosonicOperator {
    modes: usize,
    cutoff: FockCutoff,
    matrix: ComplexMatrix,
}

impl BosonicOperator {
    pub fn new(modes: usize, cutoff: FockCutoff, matrix: ComplexMatrix) -> Result<Self> {
        let expected = cutoff
            .levels()
            .checked_pow(modes as u32)
            .ok_or(SbmError::DimensionCap {
                dim: usize::MAX,
                cap: usize::MAX,
            })?;
        if modes == 0 || matrix.dim() != (expected, expected) {
            return Err(SbmError::DimensionMismatch {
                expected,
                got: matrix.nrows(),
            });
        }
        Ok(Self {
            modes,
            cutoff,
            matrix,
        })
    }

    pub(crate) fn single_mode(matrix: ComplexMatrix) -> Self {
        let d = matrix.nrows();
        Self {
            modes: 1,
            cutoff: FockCutoff(d),
            matrix,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            modes: self.modes,
            cutoff: self.cutoff,
            matrix: dagger(&self.matrix),
        }
    }

    /// Leading `k×k` block.
    pub fn top_block(&self, k: usize) -> ComplexMatrix {
        self.matrix.slice(s![..k, ..k]).to_owned()
    }

    /// Largest `|⟨j|O|l⟩|` with exactly one of `j`, `l` below `k`.
    pub fn off_block_coupling(&self, k: usize) -> f64 {
        let mut worst = 0.0_f64;
        for ((j, l), z) in self.matrix.indexed_iter() {
            if (j < k) != (l < k) {
                worst = worst.max(z.norm());
            }
        }
        worst
    }
}

/// Raw truncated annihilator of dimension `d`: `(m−1, m) = √m`.
pub(crate) fn ladder(d: usize) -> ComplexMatrix {
    let mut a = Array2::zeros((d, d));
    for m in 1..d {
        a[[m - 1, m]] = C64::new((m as f64).sqrt(), 0.0);
    }
    a
}

pub(crate) fn number_diag(d: usize) -> ComplexMatrix {
    Array2::from_diag(&ndarray::Array1::from_iter(
        (0..d).map(|n| C64::new(n as f64, 0.0)),
    ))
}

pub(crate) fn truncate(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    m.slice(s![..d, ..d]).to_owned()
}

pub(crate) fn matrix_power(m: &ComplexMatrix, p: usize) -> ComplexMatrix {
    let mut out = identity(m.nrows());
    for _ in 0..p {
        out = out.dot(m);
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// Annihilation operator `a` with `a|m⟩ = √m |m−1⟩`.
pub fn annihilation(cutoff: FockCutoff) -> Result<BosonicOperator> {
    cutoff.require(2)?;
    Ok(BosonicOperator::single_mode(ladder(cutoff.levels())))
}

/// Creation operator `a†`.
pub fn creation(cutoff: FockCutoff) -> Result<BosonicOperator> {
    annihilation(cutoff).map(|a| a.adjoint())
}

/// Number operator `N = a†a`.
pub fn number(cutoff: FockCutoff) -> BosonicOperator {
    BosonicOperator::single_mode(number_diag(cutoff.levels()))
}

fn gamma_raw(k: usize, d: usize) -> ComplexMatrix {
    let shift = &identity(d).mapv(|z| z * (k as f64 - 1.0)) - &number_diag(d);
    shift.dot(&ladder(d))
}

/// `Γ_k = ((k−1) − N) a`, the adjoint of the Dyson-Maleev raising operator at
/// spin `s = (k−1)/2`.
pub fn gamma_k(k: usize, cutoff: FockCutoff) -> Result<BosonicOperator> {
    if k == 0 {
        return Err(SbmError::InvalidParameter("k must be positive".into()));
    }
    cutoff.require(FockCutoff::minimum_for(k).levels())?;
    Ok(BosonicOperator::single_mode(gamma_raw(k, cutoff.levels())))
}

/// Shared pieces of the `P_nm` products for one `(k, D)`.
struct TransitionBasis {
    k: usize,
    d: usize,
    /// `(a†)ⁿ Γ^{k−1}` on the padded ladder, for n = 0..k.
    left: Vec<ComplexMatrix>,
    /// `(a†)^{k−1−m}` on the padded ladder, for m = 0..k.
    right: Vec<ComplexMatrix>,
}

impl TransitionBasis {
    fn new(k: usize, cutoff: FockCutoff) -> Result<Self> {
        if k == 0 {
            return Err(SbmError::InvalidParameter("k must be positive".into()));
        }
        cutoff.require(FockCutoff::minimum_for(k).levels())?;
        let d = cutoff.levels();
        let padded = d + k - 1;
        let create = dagger(&ladder(padded));
        let gamma_pow = matrix_power(&gamma_raw(k, padded), k - 1);
        let mut left = Vec::with_capacity(k);
        let mut acc = gamma_pow;
        for _ in 0..k {
            left.push(acc.clone());
            acc = create.dot(&acc);
        }
        let right = (0..k)
            .map(|m| matrix_power(&create, k - 1 - m))
            .collect();
        Ok(Self { k, d, left, right })
    }

    fn coefficient(&self, n: usize, m: usize) -> f64 {
        let kf = factorial(self.k - 1);
        (factorial(m) / factorial(n)).sqrt() / (kf * kf)
    }

    fn op(&self, n: usize, m: usize) -> ComplexMatrix {
        let c = self.coefficient(n, m);
        let full = self.left[n].dot(&self.right[m]).mapv(|z| z * c);
        truncate(&full, self.d)
    }
}

/// The transition operator `P_nm`, whose top `k×k` block is `|n⟩⟨m|`.
pub fn transition_op(n: usize, m: usize, k: usize, cutoff: FockCutoff) -> Result<BosonicOperator> {
    for idx in [n, m] {
        if idx >= k {
            return Err(SbmError::IndexOutOfRange { index: idx, dim: k });
        }
    }
    let basis = TransitionBasis::new(k, cutoff)?;
    Ok(BosonicOperator::single_mode(basis.op(n, m)))
}

/// Result of the SBM mapping.
#[derive(Debug, Clone)]
pub struct SbmHamiltonian {
    pub k: usize,
    pub source: HermitianMatrix,
    pub operator: BosonicOperator,
}

impl SbmHamiltonian {
    /// `max |top block − H|`.
    pub fn top_block_residual(&self) -> f64 {
        max_abs_diff(&self.operator.top_block(self.k), self.source.matrix())
    }

    /// Largest coupling between the first `k` levels and the rest.
    pub fn off_block_residual(&self) -> f64 {
        self.operator.off_block_coupling(self.k)
    }
}

/// Map a Hermitian matrix onto a single bosonic mode: `Σ_nm H_nm P_nm`.
pub fn sbm_map(h: &HermitianMatrix, cutoff: FockCutoff) -> Result<SbmHamiltonian> {
    let k = h.dim();
    let basis = TransitionBasis::new(k, cutoff)?;
    let padded = basis.left[0].nrows();
    let mut total = Array2::<C64>::zeros((padded, padded));
    for n in 0..k {
        // Σ_m H_nm c_nm (a†)^{k−1−m}, then one product with the left factor.
        let mut inner = Array2::<C64>::zeros((padded, padded));
        for m in 0..k {
            let coeff = h[(n, m)] * basis.coefficient(n, m);
            if coeff != C_ZERO {
                inner.scaled_add(coeff, &basis.right[m]);
            }
        }
        total += &basis.left[n].dot(&inner);
    }
    let operator = BosonicOperator::single_mode(truncate(&total, basis.d));
    Ok(SbmHamiltonian {
        k,
        source: h.clone(),
        operator,
    })
}

/// Dyson-Maleev spin operators on a truncated ladder (raw truncated products,
/// no padding): `S₊ = a†(2s − N)`, `S₋ = a`, `S_z = N − s`.
#[derive(Debug, Clone)]
pub struct DysonMaleev {
    pub spin: f64,
    pub s_plus: ComplexMatrix,
    pub s_minus: ComplexMatrix,
    pub s_z: ComplexMatrix,
}

impl DysonMaleev {
    /// Operators at spin `s = (k−1)/2`, the value whose `S₊†` is `Γ_k`.
    pub fn for_dimension(k: usize, cutoff: FockCutoff) -> Self {
        let d = cutoff.levels();
        let spin = (k as f64 - 1.0) / 2.0;
        let a = ladder(d);
        let n = number_diag(d);
        let two_s = identity(d).mapv(|z| z * (2.0 * spin));
        Self {
            spin,
            s_plus: dagger(&a).dot(&(&two_s - &n)),
            s_minus: a,
            s_z: &n - &identity(d).mapv(|z| z * spin),
        }
    }

    /// `[S₊, S₋]`.
    pub fn commutator(&self) -> ComplexMatrix {
        self.s_plus.dot(&self.s_minus) - self.s_minus.dot(&self.s_plus)
    }
}
