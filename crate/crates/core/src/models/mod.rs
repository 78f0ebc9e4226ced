//! Benchmark Hamiltonians: a two-level donor/acceptor, the FMO 4-site
//! exciton model and a spin-boson model with a discretized Ohmic bath.

mod dilation;
mod spin_boson;

pub use dilation::{
    dilate, dilate_strict, dilated_circuit_step, dilated_step, DilatedCircuitStep, DilatedUnitary, CONTRACTION_TOL,
};
pub use spin_boson::{
    continuum_reorganization_energy, discretize_ohmic, population_superoperator, reference_propagate,
    spin_boson_hamiltonian, thermal_ensemble, DiscretizedBath, EnsembleMember, SpinBosonPropagator, SpinBosonSpec,
    SuperoperatorSeries, VibronicHamiltonian, DENSE_DIM_CAP, ENSEMBLE_WEIGHT,
};

use crate::error::{Result, SbmError};
use crate::numerics::{ComplexMatrix, HermitianMatrix, C64};

/// `[[−ε, Δ], [Δ, ε]]`.
pub fn tls_hamiltonian(epsilon: f64, delta: f64) -> HermitianMatrix {
    HermitianMatrix::from_real_rows(&[&[-epsilon, delta], &[delta, epsilon]]).expect("2x2 symmetric")
}

/// Donor population of the TLS started in the donor state, where `scale` is
/// the phase per unit energy per unit time.
pub fn tls_donor_population(epsilon: f64, delta: f64, t: f64, scale: f64) -> f64 {
    let omega = (epsilon * epsilon + delta * delta).sqrt();
    if omega == 0.0 {
        return 1.0;
    }
    let s = (omega * t * scale).sin();
    1.0 - (delta * delta) / (omega * omega) * s * s
}

/// Frenkel exciton matrix in the single-excitation basis: site energies on
/// the diagonal, `J_jk` at `(j, k)` and `(k, j)`.
pub fn frenkel_hamiltonian(site_energies: &[f64], couplings: &[(usize, usize, f64)]) -> Result<HermitianMatrix> {
    let n = site_energies.len();
    if n == 0 {
        return Err(SbmError::Empty);
    }
    let mut m = ComplexMatrix::zeros((n, n));
    for (j, &e) in site_energies.iter().enumerate() {
        m[[j, j]] = C64::new(e, 0.0);
    }
    for &(j, k, v) in couplings {
        for idx in [j, k] {
            if idx >= n {
                return Err(SbmError::IndexOutOfRange { index: idx, dim: n });
            }
        }
        if j == k {
            return Err(SbmError::InvalidParameter(format!("coupling of site {j} to itself")));
        }
        m[[j, k]] = C64::new(v, 0.0);
        m[[k, j]] = C64::new(v, 0.0);
    }
    HermitianMatrix::new(m)
}

/// FMO sites 1-4, cm⁻¹.
pub fn fmo_hamiltonian() -> HermitianMatrix {
    frenkel_hamiltonian(
        &[310.0, 230.0, 0.0, 180.0],
        &[
            (0, 1, -97.9),
            (0, 2, 5.5),
            (0, 3, -5.8),
            (1, 2, 30.1),
            (1, 3, 7.3),
            (2, 3, -58.8),
        ],
    )
    .expect("valid site list")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tls_layout_and_spectrum() {
        let h = tls_hamiltonian(50.0, 20.0);
        assert_eq!(h[(0, 0)].re, -50.0);
        assert_eq!(h[(0, 1)].re, 20.0);
        assert_eq!(h[(1, 1)].re, 50.0);
        assert!(tls_hamiltonian(0.0, 0.0).matrix().iter().all(|z| *z == C64::new(0.0, 0.0)));
        let e = tls_hamiltonian(3.0, 4.0).eigenvalues().unwrap();
        assert!((e[0] + 5.0).abs() < 1e-14 && (e[1] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn fmo_entries() {
        let h = fmo_hamiltonian();
        assert_eq!(h[(0, 1)].re, -97.9);
        assert_eq!(h[(2, 3)].re, -58.8);
        assert_eq!(h.matrix(), &h.matrix().t().to_owned());
        let trace: f64 = (0..4).map(|i| h[(i, i)].re).sum();
        assert_eq!(trace, 720.0);
    }

    #[test]
    fn frenkel_validation() {
        assert!(frenkel_hamiltonian(&[], &[]).is_err());
        assert!(frenkel_hamiltonian(&[0.0, 1.0], &[(0, 2, 1.0)]).is_err());
        assert!(frenkel_hamiltonian(&[0.0, 1.0], &[(1, 1, 1.0)]).is_err());
    }

    #[test]
    fn rabi_formula_limits() {
        assert_eq!(tls_donor_population(50.0, 20.0, 0.0, 1.0), 1.0);
        assert_eq!(tls_donor_population(1.0, 0.0, 3.0, 1.0), 1.0);
        // resonant case: full transfer at quarter period
        let p = tls_donor_population(0.0, 1.0, std::f64::consts::FRAC_PI_2, 1.0);
        assert!(p.abs() < 1e-15);
    }
}
