//! Seeded random test data: Hermitian matrices and Haar-distributed unitaries.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{dagger, ComplexMatrix, C64};

fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    Array2::from_shape_simple_fn((n, n), || {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `(G + G†)/2` for a complex Ginibre matrix `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n);
    (&g + &dagger(&g)).mapv(|z| z * 0.5)
}

/// Haar-random unitary via modified Gram-Schmidt on a Ginibre matrix.
///
/// Orthonormalizing the columns in order is the QR factorization with a
/// positive diagonal in `R`, which is exactly the phase fix that makes the
/// result Haar distributed.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut q = ginibre(rng, n);
    for j in 0..n {
        for i in 0..j {
            let proj: C64 = (0..n).map(|r| q[[r, i]].conj() * q[[r, j]]).sum();
            for r in 0..n {
                let qi = q[[r, i]];
                q[[r, j]] -= proj * qi;
            }
        }
        let norm = (0..n).map(|r| q[[r, j]].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            q[[r, j]] /= norm;
        }
    }
    q
}
