//! Two-qubit Cartan decomposition and fixed CZ templates.
//!
//! Any `U ∈ U(4)` factors as `U = e^{iδ} (A₀⊗A₁) exp(i(aXX + bYY + cZZ)) (B₀⊗B₁)`.
//! The local factors come from the magic basis, in which `SU(2)⊗SU(2)` is
//! `SO(4)` and the interaction term is diagonal.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use ndarray::{array, s, Array1, Array2};

use super::euler::{hadamard, pauli_x, pauli_y, pauli_z, phase_s, rx, ry, rz};
use crate::error::{Result, SbmError};
use crate::numerics::{dagger, eigh_real, identity, kron, max_abs_diff, ComplexMatrix, C64};

/// Coordinates of `exp(i(aXX + bYY + cZZ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanCoordinates {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CartanCoordinates {
    fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }
}

/// `exp(i(aXX + bYY + cZZ))`.
pub fn interaction(coords: CartanCoordinates) -> ComplexMatrix {
    let m = magic_basis();
    let [a, b, c] = coords.as_array();
    let phases = [a - b + c, -a + b + c, a + b - c, -a - b - c];
    let d = Array2::from_diag(&Array1::from_iter(phases.iter().map(|&t| C64::from_polar(1.0, t))));
    m.dot(&d).dot(&dagger(&m))
}

/// Columns `Φ⁺, iΦ⁻, iΨ⁺, Ψ⁻`: eigenvectors of `XX, YY, ZZ` with signs
/// `(+,−,+), (−,+,+), (+,+,−), (−,−,−)`.
pub fn magic_basis() -> ComplexMatrix {
    let r = FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let re = C64::new(r, 0.0);
    let im = C64::new(0.0, r);
    array![
        [re, im, z, z],
        [z, z, im, re],
        [z, z, im, -re],
        [re, -im, z, z]
    ]
}

/// Result of the Cartan factorization, `U = e^{iδ} L · N(a,b,c) · R`.
#[derive(Debug, Clone)]
pub struct TwoQubitKak {
    pub phase: f64,
    pub left: (ComplexMatrix, ComplexMatrix),
    pub coords: CartanCoordinates,
    pub right: (ComplexMatrix, ComplexMatrix),
}

impl TwoQubitKak {
    pub fn matrix(&self) -> ComplexMatrix {
        let l = kron(&self.left.0, &self.left.1);
        let r = kron(&self.right.0, &self.right.1);
        let g = C64::from_polar(1.0, self.phase);
        l.dot(&interaction(self.coords)).dot(&r).mapv(|z| z * g)
    }
}

fn det4(m: &ComplexMatrix) -> C64 {
    // Laplace expansion along the first row via 3×3 minors.
    let minor = |col: usize| {
        let cols: Vec<usize> = (0..4).filter(|&j| j != col).collect();
        let e = |i: usize, j: usize| m[[i, cols[j]]];
        e(1, 0) * (e(2, 1) * e(3, 2) - e(2, 2) * e(3, 1))
            - e(1, 1) * (e(2, 0) * e(3, 2) - e(2, 2) * e(3, 0))
            + e(1, 2) * (e(2, 0) * e(3, 1) - e(2, 1) * e(3, 0))
    };
    (0..4)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            m[[0, j]] * minor(j) * sign
        })
        .sum()
}

fn det_real(p: &Array2<f64>) -> f64 {
    det4(&p.mapv(|x| C64::new(x, 0.0))).re
}

/// Real orthogonal `P` with `PᵀMP` diagonal, for complex symmetric unitary `M`.
fn diagonalize_symmetric_unitary(m: &ComplexMatrix) -> Result<Array2<f64>> {
    use std::f64::consts::{E, FRAC_1_PI, FRAC_1_SQRT_2, SQRT_2};
    const MIXES: [(f64, f64); 6] = [
        (1.0, 0.0),
        (0.0, 1.0),
        (1.0, 0.618_033_988_749_894_9),
        (FRAC_1_PI, 1.0),
        (1.0, -E),
        (FRAC_1_SQRT_2, SQRT_2),
    ];
    let re = m.mapv(|z| z.re);
    let im = m.mapv(|z| z.im);
    let mut best: Option<(f64, Array2<f64>)> = None;
    for (r1, r2) in MIXES {
        let mix = &re * r1 + &im * r2;
        let sym = (&mix + &mix.t()) * 0.5;
        let (_, p) = eigh_real(&sym)?;
        let pc = p.mapv(|x| C64::new(x, 0.0));
        let d = pc.t().dot(m).dot(&pc);
        let mut off = 0.0_f64;
        for ((i, j), z) in d.indexed_iter() {
            if i != j {
                off = off.max(z.norm());
            }
        }
        if off < 1e-13 {
            return Ok(p);
        }
        if best.as_ref().is_none_or(|(b, _)| off < *b) {
            best = Some((off, p));
        }
    }
    match best {
        Some((off, p)) if off < 1e-9 => Ok(p),
        _ => Err(SbmError::EigenSolver(
            "could not diagonalize the magic-basis symmetric form".into(),
        )),
    }
}

/// Split a 4×4 product `A⊗C` into its factors.
pub fn product_factors(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    // The 2×2 block with the largest weight is A_ij · C.
    let mut pick = (0, 0);
    let mut weight = -1.0;
    for i in 0..2 {
        for j in 0..2 {
            let w: f64 = m
                .slice(s![2 * i..2 * i + 2, 2 * j..2 * j + 2])
                .iter()
                .map(|z| z.norm_sqr())
                .sum();
            if w > weight {
                weight = w;
                pick = (i, j);
            }
        }
    }
    let block = m
        .slice(s![2 * pick.0..2 * pick.0 + 2, 2 * pick.1..2 * pick.1 + 2])
        .to_owned();
    let det = block[[0, 0]] * block[[1, 1]] - block[[0, 1]] * block[[1, 0]];
    if det.norm() < 1e-6 {
        return Err(SbmError::InvalidCircuit("matrix is not a product of local gates".into()));
    }
    let cfac = block.mapv(|z| z / det.sqrt());
    let stripped = m.dot(&kron(&identity(2), &dagger(&cfac)));
    let afac = array![
        [stripped[[0, 0]], stripped[[0, 2]]],
        [stripped[[2, 0]], stripped[[2, 2]]]
    ];
    if max_abs_diff(&kron(&afac, &cfac), m) > 1e-8 {
        return Err(SbmError::InvalidCircuit("matrix is not a product of local gates".into()));
    }
    Ok((afac, cfac))
}

/// Cartan factorization with all coordinates reduced to `(−π/4, π/4]`.
pub fn kak_decompose(u: &ComplexMatrix) -> Result<TwoQubitKak> {
    let det = det4(u);
    let delta = det.arg() / 4.0;
    let v = u.mapv(|z| z * C64::from_polar(1.0, -delta));
    let b = magic_basis();
    let bd = dagger(&b);
    let vm = bd.dot(&v).dot(&b);
    let msym = vm.t().dot(&vm);

    let mut p = diagonalize_symmetric_unitary(&msym)?;
    if det_real(&p) < 0.0 {
        p.column_mut(0).mapv_inplace(|x| -x);
    }
    let pc = p.mapv(|x| C64::new(x, 0.0));
    let d2 = pc.t().dot(&msym).dot(&pc).diag().to_owned();
    let mut theta: Vec<f64> = d2.iter().map(|z| z.arg() / 2.0).collect();
    // Π d² = 1, so Σθ is a multiple of π; make it zero so that det K₁ = 1.
    let total: f64 = theta.iter().sum();
    theta[3] -= PI * (total / PI).round();

    let dinv = Array2::from_diag(&Array1::from_iter(theta.iter().map(|&t| C64::from_polar(1.0, -t))));
    let k1 = vm.dot(&pc).dot(&dinv);
    let left = product_factors(&b.dot(&k1).dot(&bd))?;
    let mut right = product_factors(&b.dot(&pc.t()).dot(&bd))?;

    let mut coords = [
        (theta[0] + theta[2]) / 2.0,
        (theta[1] + theta[2]) / 2.0,
        (theta[0] + theta[1]) / 2.0,
    ];
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    for (x, pauli) in coords.iter_mut().zip(paulis.iter()) {
        // exp(i(x)PP) = exp(i(x − kπ/2)PP) · (iPP)^k
        let k = ((*x - FRAC_PI_4) / FRAC_PI_2).ceil();
        *x -= k * FRAC_PI_2;
        let k = (k as i64).rem_euclid(4);
        for _ in 0..k {
            right.0 = pauli.dot(&right.0).mapv(|z| z * C64::new(0.0, 1.0));
            right.1 = pauli.dot(&right.1);
        }
    }

    Ok(TwoQubitKak {
        phase: delta,
        left,
        coords: CartanCoordinates {
            a: coords[0],
            b: coords[1],
            c: coords[2],
        },
        right,
    })
}

/// One step of a template in matrix-product order.
#[derive(Debug, Clone)]
pub(crate) enum Element {
    Local(ComplexMatrix, ComplexMatrix),
    Cz,
}

fn local(a: ComplexMatrix, c: ComplexMatrix) -> Element {
    Element::Local(a, c)
}

fn cnot01() -> Vec<Element> {
    vec![
        local(identity(2), hadamard()),
        Element::Cz,
        local(identity(2), hadamard()),
    ]
}

fn cnot10() -> Vec<Element> {
    vec![
        local(hadamard(), identity(2)),
        Element::Cz,
        local(hadamard(), identity(2)),
    ]
}

fn conjugated(g: &ComplexMatrix, core: Vec<Element>) -> Vec<Element> {
    let mut out = vec![local(g.clone(), g.clone())];
    out.extend(core);
    out.push(local(dagger(g), dagger(g)));
    out
}

/// Elements realizing `N(a,b,c)` up to global phase, CZ count chosen by
/// which coordinates vanish within `tol`.
pub(crate) fn interaction_template(coords: CartanCoordinates, tol: f64) -> Vec<Element> {
    let x = coords.as_array();
    let zero: Vec<bool> = x.iter().map(|v| v.abs() <= tol).collect();
    let nzero = zero.iter().filter(|&&z| z).count();

    if nzero == 3 {
        return Vec::new();
    }

    if nzero == 2 {
        let axis = zero.iter().position(|&z| !z).unwrap_or(2);
        if (x[axis].abs() - FRAC_PI_4).abs() <= tol {
            // exp(iπ/4 ZZ) = e^{iπ/4} (S†⊗S†) CZ
            let sd = dagger(&phase_s());
            let mut core = vec![local(sd.clone(), sd), Element::Cz];
            if x[axis] < 0.0 {
                core.insert(0, local(pauli_x(), identity(2)));
                core.push(local(pauli_x(), identity(2)));
            }
            return match axis {
                0 => conjugated(&hadamard(), core),
                1 => conjugated(&rx(FRAC_PI_2), core),
                _ => core,
            };
        }
    }

    if nzero >= 1 {
        // exp(i(pXX + qZZ)) = CN01 (Rx(−2p) ⊗ Rz(−2q)) CN01
        let base = |p: f64, q: f64| {
            let mut v = cnot01();
            v.push(local(rx(-2.0 * p), rz(-2.0 * q)));
            v.extend(cnot01());
            v
        };
        return if zero[1] {
            base(x[0], x[2])
        } else if zero[0] {
            // S maps X to Y and keeps Z.
            conjugated(&phase_s(), base(x[1], x[2]))
        } else {
            // Rx(π/2) keeps X and maps Z to −Y.
            conjugated(&rx(FRAC_PI_2), base(x[0], x[1]))
        };
    }

    let (a, b, c) = (x[0], x[1], x[2]);
    let mut v = vec![local(rz(FRAC_PI_2), identity(2))];
    v.extend(cnot10());
    v.push(local(identity(2), ry(FRAC_PI_2 - 2.0 * b)));
    v.extend(cnot01());
    v.push(local(rz(FRAC_PI_2 - 2.0 * c), ry(2.0 * a - FRAC_PI_2)));
    v.extend(cnot10());
    v.push(local(identity(2), rz(-FRAC_PI_2)));
    v
}

pub(crate) fn cz_matrix() -> ComplexMatrix {
    let one = C64::new(1.0, 0.0);
    Array2::from_diag(&array![one, one, one, -one])
}

pub(crate) fn elements_matrix(elements: &[Element]) -> ComplexMatrix {
    elements.iter().fold(identity(4), |acc, e| match e {
        Element::Local(a, c) => acc.dot(&kron(a, c)),
        Element::Cz => acc.dot(&cz_matrix()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::trace_fidelity;
    use crate::random::haar_unitary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn magic_basis_is_unitary_and_diagonalizes_paulis() {
        let b = magic_basis();
        assert!(max_abs_diff(&dagger(&b).dot(&b), &identity(4)) < 1e-15);
        let n = interaction(CartanCoordinates { a: 0.3, b: -0.2, c: 0.1 });
        let h = &kron(&pauli_x(), &pauli_x()) * C64::new(0.3, 0.0)
            + &kron(&pauli_y(), &pauli_y()) * C64::new(-0.2, 0.0)
            + &kron(&pauli_z(), &pauli_z()) * C64::new(0.1, 0.0);
        let expected = crate::numerics::expm_hermitian(&h, -1.0).unwrap();
        assert!(max_abs_diff(&n, &expected) < 1e-14);
    }

    #[test]
    fn product_factor_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = haar_unitary(&mut rng, 2);
            let c = haar_unitary(&mut rng, 2);
            let (fa, fc) = product_factors(&kron(&a, &c)).unwrap();
            assert!(max_abs_diff(&kron(&fa, &fc), &kron(&a, &c)) < 1e-13);
        }
        assert!(product_factors(&cz_matrix()).is_err());
    }

    #[test]
    fn kak_reconstructs_haar_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let u = haar_unitary(&mut rng, 4);
            let k = kak_decompose(&u).unwrap();
            assert!(max_abs_diff(&k.matrix(), &u) < 1e-11);
            for x in k.coords.as_array() {
                assert!(x > -FRAC_PI_4 - 1e-12 && x <= FRAC_PI_4 + 1e-12);
            }
        }
    }

    #[test]
    fn templates_match_interaction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cases = vec![
            [0.0, 0.0, 0.0],
            [FRAC_PI_4, 0.0, 0.0],
            [0.0, FRAC_PI_4, 0.0],
            [0.0, 0.0, FRAC_PI_4],
            [-FRAC_PI_4, 0.0, 0.0],
            [0.0, -FRAC_PI_4, 0.0],
            [0.0, 0.0, -FRAC_PI_4],
        ];
        for _ in 0..30 {
            let r: [f64; 3] = [0, 1, 2].map(|_| rng.random_range(-FRAC_PI_4..FRAC_PI_4));
            cases.push(r);
            cases.push([r[0], 0.0, r[2]]);
            cases.push([0.0, r[1], r[2]]);
            cases.push([r[0], r[1], 0.0]);
            cases.push([r[0], 0.0, 0.0]);
        }
        for [a, b, c] in cases {
            let coords = CartanCoordinates { a, b, c };
            let template = interaction_template(coords, 1e-9);
            let f = trace_fidelity(&elements_matrix(&template), &interaction(coords));
            assert!((f - 1.0).abs() < 1e-12, "({a}, {b}, {c}): fidelity {f}");
        }
    }

    #[test]
    fn cz_has_quarter_coordinate() {
        let k = kak_decompose(&cz_matrix()).unwrap();
        let quarter = k.coords.as_array().iter().filter(|x| (x.abs() - FRAC_PI_4).abs() < 1e-12).count();
        let zero = k.coords.as_array().iter().filter(|x| x.abs() < 1e-12).count();
        assert_eq!((quarter, zero), (1, 2));
    }
}
