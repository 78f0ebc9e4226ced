//! Dense complex matrix functions: normal eigendecomposition, the matrix
//! exponential, the principal logarithm of a unitary and the square root of a
//! positive-semidefinite matrix.
//!
//! Everything here is a pure function of its input. Hermitian eigenproblems
//! go to LAPACK (`?heev`/`?syev` through `ndarray-linalg`); the remaining
//! functions are built on top of that.

use std::f64::consts::PI;

use ndarray::{Array1, Array2, Axis, ShapeBuilder};
use ndarray_linalg::{Eigh, Inverse, UPLO};
pub use num_complex::Complex64 as C64;

use crate::error::{Result, SbmError};

/// Dense complex matrix, row-major.
pub type ComplexMatrix = Array2<C64>;

pub const C_ZERO: C64 = C64::new(0.0, 0.0);
pub const C_ONE: C64 = C64::new(1.0, 0.0);
pub const C_I: C64 = C64::new(0.0, 1.0);

/// Tolerance on `‖M − M†‖_max` for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `‖U†U − I‖_max` for accepting a matrix as unitary.
pub const UNITARY_TOL: f64 = 1e-8;
/// Eigenvalues of a PSD input above `-PSD_CLAMP` are clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Generator eigenvalues within this distance of `-π` are moved to `+π`.
pub const BRANCH_SNAP: f64 = 1e-12;

/// Eigenvalues and unitary eigenvectors (as columns) of a normal matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Array1<C64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let scaled = &self.eigenvectors * &self.eigenvalues.view().insert_axis(Axis(0));
        scaled.dot(&dagger(&self.eigenvectors))
    }

    /// `V diag(f(λ)) V†`.
    pub fn map<F: Fn(C64) -> C64>(&self, f: F) -> ComplexMatrix {
        let mapped = self.eigenvalues.mapv(f);
        let scaled = &self.eigenvectors * &mapped.view().insert_axis(Axis(0));
        scaled.dot(&dagger(&self.eigenvectors))
    }
}

/// A square complex matrix certified Hermitian to within [`HERMITIAN_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_square(&m)?;
        let residual = hermiticity_residual(&m);
        if residual > HERMITIAN_TOL {
            return Err(SbmError::NotHermitian { residual });
        }
        Ok(Self(m))
    }

    /// Real symmetric matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(SbmError::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, |r| r.len()),
            });
        }
        Self::new(Array2::from_shape_fn((n, n), |(i, j)| C64::new(rows[i][j], 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Array1<f64>> {
        eigh(&self.0).map(|(vals, _)| vals)
    }
}

impl std::ops::Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[[i, j]]
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    Array2::from_diag_elem(n, C_ONE)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = Array2::zeros((m.ncols(), m.nrows()));
    out.zip_mut_with(&m.t(), |o, z| *o = z.conj());
    out
}

pub fn from_real(m: &Array2<f64>) -> ComplexMatrix {
    m.mapv(|x| C64::new(x, 0.0))
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |a − b|` entrywise.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &dagger(m))
}

pub fn unitarity_residual(m: &ComplexMatrix) -> f64 {
    max_abs_diff(&dagger(m).dot(m), &identity(m.nrows()))
}

/// `|tr(A† B)| / n`, equal to one iff `B = e^{iγ} A` for unitary inputs.
pub fn trace_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let tr: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    tr.norm() / a.nrows() as f64
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == C_ZERO {
            continue;
        }
        out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
            .assign(&b.mapv(|y| x * y));
    }
    out
}

pub(crate) fn check_square(m: &ComplexMatrix) -> Result<usize> {
    let (rows, cols) = m.dim();
    if rows == 0 || cols == 0 {
        return Err(SbmError::Empty);
    }
    if rows != cols {
        return Err(SbmError::NotSquare { rows, cols });
    }
    Ok(rows)
}

fn lapack_err(e: ndarray_linalg::error::LinalgError) -> SbmError {
    SbmError::EigenSolver(e.to_string())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized before it reaches LAPACK, so it only has to be
/// Hermitian to within [`HERMITIAN_TOL`].
pub fn eigh(h: &ComplexMatrix) -> Result<(Array1<f64>, ComplexMatrix)> {
    check_square(h)?;
    let residual = hermiticity_residual(h);
    if residual > HERMITIAN_TOL {
        return Err(SbmError::NotHermitian { residual });
    }
    let sym = (h + &dagger(h)).mapv(|z| z * 0.5);
    hermitian_eigh(&sym)
}

// ndarray-linalg returns the eigenvectors of conj(H) for row-major complex
// input, so LAPACK always gets a column-major copy.
fn hermitian_eigh(h: &ComplexMatrix) -> Result<(Array1<f64>, ComplexMatrix)> {
    let mut f = Array2::zeros(h.raw_dim().f());
    f.assign(h);
    f.eigh(UPLO::Lower).map_err(lapack_err)
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
pub fn eigh_real(m: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(SbmError::NotSquare { rows, cols });
    }
    m.eigh(UPLO::Lower).map_err(lapack_err)
}

/// Eigendecomposition of a normal matrix.
///
/// For `is_hermitian` the input goes straight to the Hermitian solver.
/// Otherwise the commuting Hermitian parts `A = (M + M†)/2` and
/// `B = (M − M†)/2i` are diagonalized jointly through `A + cB` for a short,
/// fixed list of mixing constants `c`; the first mix whose eigenvectors also
/// diagonalize `M` wins. Eigenvalues are sorted by real part, ties (within
/// `1e-10·‖M‖`) broken by imaginary part.
pub fn eig_normal(m: &ComplexMatrix, is_hermitian: bool) -> Result<EigenDecomposition> {
    let n = check_square(m)?;
    let scale = max_abs(m).max(1.0);

    let (values, vectors) = if is_hermitian {
        let (vals, vecs) = eigh(m)?;
        (vals.mapv(|x| C64::new(x, 0.0)), vecs)
    } else {
        const MIXES: [f64; 6] = [
            0.618_033_988_749_894_9,
            std::f64::consts::SQRT_2,
            std::f64::consts::FRAC_1_PI,
            std::f64::consts::E,
            -0.577_215_664_901_532_9,
            7.389_056_098_930_65,
        ];
        let md = dagger(m);
        let herm = (m + &md).mapv(|z| z * 0.5);
        let anti = (m - &md).mapv(|z| z * C64::new(0.0, -0.5));
        let mut found = None;
        for c in MIXES {
            let mix = &herm + &anti.mapv(|z| z * c);
            let sym = (&mix + &dagger(&mix)).mapv(|z| z * 0.5);
            let (_, vecs) = hermitian_eigh(&sym)?;
            let d = dagger(&vecs).dot(m).dot(&vecs);
            let mut off = 0.0_f64;
            for ((i, j), z) in d.indexed_iter() {
                if i != j {
                    off = off.max(z.norm());
                }
            }
            if off <= 1e-11 * scale {
                found = Some((d.diag().to_owned(), vecs));
                break;
            }
        }
        found.ok_or_else(|| {
            SbmError::EigenSolver("matrix is not normal to working precision".into())
        })?
    };

    let order = sorted_order(&values, 1e-10 * scale);
    let eigenvalues = Array1::from_iter(order.iter().map(|&i| values[i]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.column_mut(dst).assign(&vectors.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn sorted_order(values: &Array1<C64>, tie: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
    // Groups of (numerically) equal real parts are ordered by imaginary part.
    let mut start = 0;
    while start < order.len() {
        let anchor = values[order[start]].re;
        let mut end = start + 1;
        while end < order.len() && values[order[end]].re - anchor <= tie {
            end += 1;
        }
        order[start..end].sort_by(|&a, &b| values[a].im.total_cmp(&values[b].im));
        start = end;
    }
    order
}

/// Matrix exponential.
///
/// An exactly anti-Hermitian input (`M = −iH`) is exponentiated through the
/// eigendecomposition of `H`, which keeps the result unitary to roundoff.
/// Anything else goes through Padé-13 scaling and squaring.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(m)?;
    let scale = max_abs(m).max(1.0);
    let h = m.mapv(|z| z * C_I);
    if hermiticity_residual(&h) <= 1e-14 * scale {
        return expm_hermitian(&h, 1.0);
    }
    Ok(expm_pade(m))
}

/// `exp(−i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh(h)?;
    let phases = vals.mapv(|x| C64::from_polar(1.0, -x * t));
    let scaled = &vecs * &phases.view().insert_axis(Axis(0));
    Ok(scaled.dot(&dagger(&vecs)))
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

fn expm_pade(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.nrows();
    let norm1 = m
        .axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = m.mapv(|z| z / 2f64.powi(squarings));
    let eye = identity(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = |i: usize| C64::new(PADE13[i], 0.0);
    let lin = |c6: usize, c4: usize, c2: usize| {
        a6.mapv(|z| z * b(c6)) + a4.mapv(|z| z * b(c4)) + a2.mapv(|z| z * b(c2))
    };
    let u_inner = a6.dot(&lin(13, 11, 9)) + lin(7, 5, 3) + eye.mapv(|z| z * b(1));
    let u = a.dot(&u_inner);
    let v = a6.dot(&lin(12, 10, 8)) + lin(6, 4, 2) + eye.mapv(|z| z * b(0));
    // (V − U) is well conditioned for ‖A‖₁ ≤ θ₁₃.
    let q = (&v - &u).inv().expect("Padé denominator is nonsingular after scaling");
    let mut r = q.dot(&(&v + &u));
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    r
}

/// Principal generator of a unitary together with branch-cut bookkeeping.
#[derive(Debug, Clone)]
pub struct PrincipalLog {
    /// Hermitian `H` with spectrum in `(−π, π]` and `exp(−iH) = U`.
    pub generator: ComplexMatrix,
    /// Number of eigenphases that sat on the branch point and were moved to `+π`.
    pub branch_cut_hits: usize,
}

/// Hermitian `H` with eigenvalues in `(−π, π]` such that `exp(−iH) = U`.
pub fn logm_principal(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    logm_principal_detailed(u).map(|log| log.generator)
}

pub fn logm_principal_detailed(u: &ComplexMatrix) -> Result<PrincipalLog> {
    check_square(u)?;
    let residual = unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(SbmError::NotUnitary { residual });
    }
    let eig = eig_normal(u, false)?;
    let on_branch = |lambda: &C64| -lambda.arg() <= -PI + BRANCH_SNAP;
    let hits = eig.eigenvalues.iter().filter(|l| on_branch(l)).count();
    let generator = eig.map(|lambda| {
        let h = -lambda.arg();
        C64::new(if on_branch(&lambda) { h + 2.0 * PI } else { h }, 0.0)
    });
    let generator = (&generator + &dagger(&generator)).mapv(|z| z * 0.5);
    Ok(PrincipalLog {
        generator,
        branch_cut_hits: hits,
    })
}

/// Square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues in `[−PSD_CLAMP, 0)` are clamped to zero; anything more
/// negative is rejected.
pub fn sqrtm_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh(m)?;
    if let Some(&bad) = vals.iter().find(|&&x| x < -PSD_CLAMP) {
        return Err(SbmError::NegativeEigenvalue { value: bad });
    }
    let roots = vals.mapv(|x| C64::new(x.max(0.0).sqrt(), 0.0));
    let scaled = &vecs * &roots.view().insert_axis(Axis(0));
    Ok(scaled.dot(&dagger(&vecs)))
}
