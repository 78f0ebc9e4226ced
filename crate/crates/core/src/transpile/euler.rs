//! Single-qubit gates and the ZYZ Euler decomposition.

use std::f64::consts::{PI, TAU};

use ndarray::array;

use crate::error::{Result, SbmError};
use crate::numerics::{check_square, unitarity_residual, ComplexMatrix, C64, UNITARY_TOL};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `Rz(θ) = diag(e^{−iθ/2}, e^{iθ/2})`.
pub fn rz(theta: f64) -> ComplexMatrix {
    array![
        [C64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
        [c(0.0, 0.0), C64::from_polar(1.0, theta / 2.0)]
    ]
}

/// `Ry(θ) = exp(−iθY/2)`.
pub fn ry(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    array![[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

/// `Rx(θ) = exp(−iθX/2)`.
pub fn rx(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    array![[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn hadamard() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    array![[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
}

pub fn phase_s() -> ComplexMatrix {
    array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]
}

pub fn pauli_x() -> ComplexMatrix {
    array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_y() -> ComplexMatrix {
    array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> ComplexMatrix {
    array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

/// Angles of `U = e^{iγ} Rz(φ) Ry(θ) Rz(λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
    pub global_phase: f64,
}

impl EulerAngles {
    /// `Rz(φ) Ry(θ) Rz(λ)` without the global phase.
    pub fn rotation(&self) -> ComplexMatrix {
        rotation_matrix(self.theta, self.phi, self.lambda)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let g = C64::from_polar(1.0, self.global_phase);
        self.rotation().mapv(|z| z * g)
    }

    /// True when the rotation part is a multiple of the identity.
    pub fn is_identity(&self, tol: f64) -> bool {
        if self.theta.abs() > tol {
            return false;
        }
        let w = (self.phi + self.lambda).rem_euclid(TAU);
        w < tol || TAU - w < tol
    }
}

pub fn rotation_matrix(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
    rz(phi).dot(&ry(theta)).dot(&rz(lambda))
}

const TIE: f64 = 1e-14;

/// ZYZ decomposition with `θ ∈ [0, π]` and `φ = 0` whenever `θ ∈ {0, π}`.
pub fn euler_angles_1q(u: &ComplexMatrix) -> Result<EulerAngles> {
    if check_square(u)? != 2 {
        return Err(SbmError::DimensionMismatch {
            expected: 2,
            got: u.nrows(),
        });
    }
    let residual = unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(SbmError::NotUnitary { residual });
    }
    let det = u[[0, 0]] * u[[1, 1]] - u[[0, 1]] * u[[1, 0]];
    let gamma = det.arg() / 2.0;
    let v = u.mapv(|z| z * C64::from_polar(1.0, -gamma));
    let cos_half = v[[1, 1]].norm();
    let sin_half = v[[1, 0]].norm();
    let theta = 2.0 * sin_half.atan2(cos_half);
    let (phi, lambda) = if sin_half <= TIE {
        (0.0, 2.0 * v[[1, 1]].arg())
    } else if cos_half <= TIE {
        (0.0, -2.0 * v[[1, 0]].arg())
    } else {
        let sum = v[[1, 1]].arg();
        let diff = v[[1, 0]].arg();
        (sum + diff, sum - diff)
    };
    Ok(EulerAngles {
        theta: theta.min(PI),
        phi,
        lambda,
        global_phase: gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{identity, max_abs_diff};
    use crate::random::haar_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_angles() {
        let e = euler_angles_1q(&identity(2)).unwrap();
        assert_eq!((e.theta, e.phi, e.lambda, e.global_phase), (0.0, 0.0, 0.0, 0.0));
        assert!(e.is_identity(1e-12));
    }

    #[test]
    fn pauli_x_reconstructs() {
        let e = euler_angles_1q(&pauli_x()).unwrap();
        assert!((e.theta - PI).abs() < 1e-15);
        assert_eq!(e.phi, 0.0);
        assert!(max_abs_diff(&e.matrix(), &pauli_x()) < 1e-10);
    }

    #[test]
    fn hadamard_reconstructs() {
        let e = euler_angles_1q(&hadamard()).unwrap();
        assert!(max_abs_diff(&e.matrix(), &hadamard()) < 1e-10);
        assert!((0.0..=PI).contains(&e.theta));
    }

    #[test]
    fn haar_unitaries_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let u = haar_unitary(&mut rng, 2);
            let e = euler_angles_1q(&u).unwrap();
            assert!((0.0..=PI).contains(&e.theta));
            assert!(max_abs_diff(&e.matrix(), &u) < 1e-10);
        }
        for g in [pauli_y(), pauli_z(), phase_s(), rz(0.3), ry(PI), rx(-2.0)] {
            let e = euler_angles_1q(&g).unwrap();
            assert!(max_abs_diff(&e.matrix(), &g) < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(euler_angles_1q(&identity(3)).is_err());
        assert!(euler_angles_1q(&identity(2).mapv(|z| z * 2.0)).is_err());
    }
}
