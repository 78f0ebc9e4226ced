//! Rotation + CZ circuits for 1- and 2-qubit unitaries, and their compilation
//! into SNAIL and cross-Kerr records.
//!
//! Qubit 0 is the most significant bit of the basis index. Gate lists are in
//! time order: the first gate acts first.

mod euler;
mod kak;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub use euler::{euler_angles_1q, hadamard, pauli_x, pauli_y, pauli_z, phase_s, rotation_matrix, rx, ry, rz, EulerAngles};
pub use kak::{interaction, kak_decompose, magic_basis, product_factors, CartanCoordinates, TwoQubitKak};

use crate::error::{Result, SbmError};
use crate::numerics::{
    check_square, eigh, identity, kron, logm_principal, trace_fidelity, unitarity_residual, ComplexMatrix,
    HermitianMatrix, C64, UNITARY_TOL,
};
use crate::snail::{compile_1q, CrossKerrGate, SnailParams};
use kak::{cz_matrix, elements_matrix, interaction_template, Element};

/// Tolerance for deciding that a Cartan coordinate vanishes or sits at `±π/4`.
pub const COORDINATE_TOL: f64 = 1e-9;

/// Tolerance below which a rotation is treated as the identity.
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "cm^-1")]
    Wavenumber,
    #[serde(rename = "dimensionless")]
    Dimensionless,
}

/// Abstract gate: `Rz(φ)Ry(θ)Rz(λ)` on one qubit, CZ, or a global phase `e^{iγ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GateIR {
    #[serde(rename = "rot")]
    Rotation1Q {
        target: usize,
        theta: f64,
        phi: f64,
        lambda: f64,
    },
    Cz { targets: [usize; 2] },
    #[serde(rename = "phase")]
    GlobalPhase { gamma: f64 },
}

impl GateIR {
    fn check(&self, width: usize) -> Result<()> {
        let modes: &[usize] = match self {
            GateIR::Rotation1Q { target, .. } => std::slice::from_ref(target),
            GateIR::Cz { targets } => targets,
            GateIR::GlobalPhase { .. } => &[],
        };
        check_modes(modes, width)
    }
}

fn check_modes(modes: &[usize], width: usize) -> Result<()> {
    for &m in modes {
        if m >= width {
            return Err(SbmError::IndexOutOfRange { index: m, dim: width });
        }
    }
    if modes.len() == 2 && modes[0] == modes[1] {
        return Err(SbmError::InvalidCircuit("two-mode gate needs distinct modes".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub width: usize,
    pub units: Units,
    pub gates: Vec<GateIR>,
}

impl CircuitIR {
    pub fn new(width: usize, gates: Vec<GateIR>) -> Result<Self> {
        let c = Self {
            width,
            units: Units::Dimensionless,
            gates,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(SbmError::InvalidCircuit("width must be positive".into()));
        }
        self.gates.iter().try_for_each(|g| g.check(self.width))
    }

    pub fn cz_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, GateIR::Cz { .. })).count()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, GateIR::Rotation1Q { .. }))
            .count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }
}

/// Compiled gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SnailGate {
    Snail {
        target: usize,
        #[serde(flatten)]
        params: SnailParams,
    },
    #[serde(rename = "crosskerr")]
    CrossKerr { targets: [usize; 2], chi_t: f64 },
}

impl From<CrossKerrGate> for SnailGate {
    fn from(g: CrossKerrGate) -> Self {
        SnailGate::CrossKerr {
            targets: g.modes,
            chi_t: g.chi_t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnailCircuit {
    pub width: usize,
    pub units: Units,
    pub gates: Vec<SnailGate>,
    /// Phase `e^{iγ}` not absorbed into any SNAIL offset (circuits without
    /// SNAIL gates).
    #[serde(default, skip_serializing_if = "is_zero")]
    pub global_phase: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl SnailCircuit {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(SbmError::InvalidCircuit("width must be positive".into()));
        }
        for g in &self.gates {
            match g {
                SnailGate::Snail { target, params } => {
                    check_modes(std::slice::from_ref(target), self.width)?;
                    params.check()?;
                }
                SnailGate::CrossKerr { targets, .. } => check_modes(targets, self.width)?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    /// SNAIL records with `ω ≤ 0`.
    pub fn unstable_gates(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, SnailGate::Snail { params, .. } if params.is_energetically_unstable()))
            .count()
    }
}

/// `H` with `exp(−iH) = U`, eigenphases in `(−π, π]`.
pub fn effective_hamiltonian(u: &ComplexMatrix) -> Result<HermitianMatrix> {
    HermitianMatrix::new(logm_principal(u)?)
}

fn check_unitary(u: &ComplexMatrix) -> Result<usize> {
    let n = check_square(u)?;
    let residual = unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(SbmError::NotUnitary { residual });
    }
    Ok(n)
}

fn rotation_gate(target: usize, e: &EulerAngles) -> GateIR {
    GateIR::Rotation1Q {
        target,
        theta: e.theta,
        phi: e.phi,
        lambda: e.lambda,
    }
}

/// Rotation + phase circuit for a 2×2 unitary.
pub fn decompose_1q(u: &ComplexMatrix) -> Result<CircuitIR> {
    let e = euler_angles_1q(u)?;
    let mut gates = Vec::new();
    if !e.is_identity(IDENTITY_TOL) {
        gates.push(rotation_gate(0, &e));
    }
    let mut c = CircuitIR::new(1, gates)?;
    push_phase(&mut c, u)?;
    Ok(c)
}

/// Append the phase that makes `reconstruct(c) = u`.
fn push_phase(c: &mut CircuitIR, u: &ComplexMatrix) -> Result<()> {
    let w = reconstruct(c)?;
    let overlap: C64 = w.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
    let gamma = overlap.arg();
    if gamma != 0.0 {
        c.gates.push(GateIR::GlobalPhase { gamma });
    }
    Ok(())
}

/// At most three CZ gates plus single-qubit rotations and one phase record.
pub fn decompose_2q(u: &ComplexMatrix) -> Result<CircuitIR> {
    if check_unitary(u)? != 4 {
        return Err(SbmError::DimensionMismatch {
            expected: 4,
            got: u.nrows(),
        });
    }
    let mut c = CircuitIR::new(2, Vec::new())?;
    if trace_fidelity(&cz_matrix(), u) > 1.0 - 1e-14 {
        c.gates.push(GateIR::Cz { targets: [0, 1] });
        push_phase(&mut c, u)?;
        return Ok(c);
    }

    let k = kak_decompose(u)?;
    let mut elements = vec![Element::Local(k.left.0.clone(), k.left.1.clone())];
    elements.extend(interaction_template(k.coords, COORDINATE_TOL));
    elements.push(Element::Local(k.right.0.clone(), k.right.1.clone()));

    // Merge neighbouring local layers (matrix order), then emit in time order.
    let mut layers: Vec<Element> = Vec::new();
    for e in elements {
        match (layers.last_mut(), e) {
            (Some(Element::Local(a, b)), Element::Local(x, y)) => {
                *a = a.dot(&x);
                *b = b.dot(&y);
            }
            (_, e) => layers.push(e),
        }
    }
    debug_assert!(trace_fidelity(&elements_matrix(&layers), u) > 1.0 - 1e-9);
    for layer in layers.iter().rev() {
        match layer {
            Element::Cz => c.gates.push(GateIR::Cz { targets: [0, 1] }),
            Element::Local(a, b) => {
                for (target, m) in [(0, a), (1, b)] {
                    let e = euler_angles_1q(m)?;
                    if !e.is_identity(IDENTITY_TOL) {
                        c.gates.push(rotation_gate(target, &e));
                    }
                }
            }
        }
    }
    push_phase(&mut c, u)?;
    Ok(c)
}

/// Dispatch on the matrix size (2 or 4).
pub fn transpile(u: &ComplexMatrix) -> Result<CircuitIR> {
    match check_unitary(u)? {
        2 => decompose_1q(u),
        4 => decompose_2q(u),
        n => Err(SbmError::UnsupportedWidth(n.trailing_zeros() as usize)),
    }
}

/// Embed a single-qubit matrix on `target` of a `width`-qubit register.
fn embed_1q(m: &ComplexMatrix, target: usize, width: usize) -> ComplexMatrix {
    (0..width).fold(identity(1), |acc, q| {
        if q == target {
            kron(&acc, m)
        } else {
            kron(&acc, &identity(2))
        }
    })
}

fn cz_on(targets: [usize; 2], width: usize) -> ComplexMatrix {
    let dim = 1usize << width;
    let bit = |i: usize, q: usize| (i >> (width - 1 - q)) & 1;
    let diag = ndarray::Array1::from_iter((0..dim).map(|i| {
        if bit(i, targets[0]) == 1 && bit(i, targets[1]) == 1 {
            C64::new(-1.0, 0.0)
        } else {
            C64::new(1.0, 0.0)
        }
    }));
    ndarray::Array2::from_diag(&diag)
}

/// Ordered product of the gate matrices on `2^width` amplitudes.
pub fn reconstruct(c: &CircuitIR) -> Result<ComplexMatrix> {
    c.validate()?;
    let mut u = identity(1 << c.width);
    for g in &c.gates {
        match *g {
            GateIR::Rotation1Q {
                target,
                theta,
                phi,
                lambda,
            } => u = embed_1q(&rotation_matrix(theta, phi, lambda), target, c.width).dot(&u),
            GateIR::Cz { targets } => u = cz_on(targets, c.width).dot(&u),
            GateIR::GlobalPhase { gamma } => u.mapv_inplace(|z| z * C64::from_polar(1.0, gamma)),
        }
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    /// Shift one generator eigenvalue by 2π when that turns `ω ≤ 0` into
    /// `ω > 0`. The gate unitary is unchanged.
    pub stabilize: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self { stabilize: true }
    }
}

fn stabilized(h: HermitianMatrix) -> Result<HermitianMatrix> {
    let omega = h[(1, 1)].re - h[(0, 0)].re;
    if omega > 0.0 {
        return Ok(h);
    }
    let (_, vecs) = eigh(h.matrix())?;
    // Pick the eigenvector with the most weight on |1⟩.
    let j = if vecs[[1, 0]].norm_sqr() >= vecs[[1, 1]].norm_sqr() { 0 } else { 1 };
    let gain = TAU * (vecs[[1, j]].norm_sqr() - vecs[[0, j]].norm_sqr());
    if omega + gain <= 0.0 {
        return Ok(h);
    }
    let v = vecs.column(j);
    let mut m = h.into_inner();
    for r in 0..2 {
        for s in 0..2 {
            m[[r, s]] += v[r] * v[s].conj() * TAU;
        }
    }
    HermitianMatrix::new(m)
}

/// One SNAIL record per rotation, one cross-Kerr gate per CZ, order kept.
pub fn compile_circuit(c: &CircuitIR) -> Result<SnailCircuit> {
    compile_circuit_with(c, CompileOptions::default())
}

pub fn compile_circuit_with(c: &CircuitIR, opts: CompileOptions) -> Result<SnailCircuit> {
    c.validate()?;
    let mut gates = Vec::with_capacity(c.gates.len());
    let mut phase = 0.0;
    for g in &c.gates {
        match *g {
            GateIR::Rotation1Q {
                target,
                theta,
                phi,
                lambda,
            } => {
                let mut h = effective_hamiltonian(&rotation_matrix(theta, phi, lambda))?;
                if opts.stabilize {
                    h = stabilized(h)?;
                }
                gates.push(SnailGate::Snail {
                    target,
                    params: compile_1q(&h)?,
                });
            }
            GateIR::Cz { targets } => gates.push(CrossKerrGate::cz(targets[0], targets[1]).into()),
            GateIR::GlobalPhase { gamma } => phase += gamma,
        }
    }
    let mut global_phase = phase;
    if let Some(SnailGate::Snail { params, .. }) = gates.iter_mut().find(|g| matches!(g, SnailGate::Snail { .. })) {
        *params = params.with_global_phase(phase);
        global_phase = 0.0;
    }
    Ok(SnailCircuit {
        width: c.width,
        units: c.units,
        gates,
        global_phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{expm_hermitian, max_abs_diff};
    use crate::random::haar_unitary;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn effective_hamiltonian_examples() {
        assert!(crate::numerics::max_abs(effective_hamiltonian(&identity(2)).unwrap().matrix()) < 1e-15);
        let h = effective_hamiltonian(&cz_matrix()).unwrap();
        let mut expected = ndarray::Array2::zeros((4, 4));
        expected[[3, 3]] = C64::new(PI, 0.0);
        assert!(max_abs_diff(h.matrix(), &expected) < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let u = haar_unitary(&mut rng, 2);
            let h = effective_hamiltonian(&u).unwrap();
            assert!(max_abs_diff(&expm_hermitian(h.matrix(), 1.0).unwrap(), &u) < 1e-9);
        }
    }

    #[test]
    fn identity_needs_no_gates() {
        let c = decompose_2q(&identity(4)).unwrap();
        assert!(c.gates.is_empty());
        assert_eq!(reconstruct(&CircuitIR::new(2, vec![]).unwrap()).unwrap(), identity(4));
    }

    #[test]
    fn cz_is_one_gate() {
        let c = decompose_2q(&cz_matrix()).unwrap();
        assert_eq!(c.gates, vec![GateIR::Cz { targets: [0, 1] }]);
        assert_eq!(reconstruct(&c).unwrap(), cz_matrix());
    }

    #[test]
    fn haar_round_trip_and_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let u = haar_unitary(&mut rng, 4);
            let c = decompose_2q(&u).unwrap();
            assert!(c.cz_count() <= 3);
            assert!(max_abs_diff(&reconstruct(&c).unwrap(), &u) < 1e-9);
        }
    }

    #[test]
    fn product_gates_use_no_cz() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u = kron(&haar_unitary(&mut rng, 2), &haar_unitary(&mut rng, 2));
            let c = decompose_2q(&u).unwrap();
            assert_eq!(c.cz_count(), 0);
            assert!(max_abs_diff(&reconstruct(&c).unwrap(), &u) < 1e-9);
        }
    }

    #[test]
    fn cnot_and_swap_counts() {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let cnot = array![[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]];
        let swap = array![[o, z, z, z], [z, z, o, z], [z, o, z, z], [z, z, z, o]];
        let c = decompose_2q(&cnot).unwrap();
        assert_eq!(c.cz_count(), 1);
        assert!(max_abs_diff(&reconstruct(&c).unwrap(), &cnot) < 1e-9);
        let c = decompose_2q(&swap).unwrap();
        assert_eq!(c.cz_count(), 3);
        assert!(max_abs_diff(&reconstruct(&c).unwrap(), &swap) < 1e-9);
    }

    #[test]
    fn single_qubit_dispatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = haar_unitary(&mut rng, 2);
        let c = transpile(&u).unwrap();
        assert_eq!(c.width, 1);
        assert!(max_abs_diff(&reconstruct(&c).unwrap(), &u) < 1e-10);
        assert!(matches!(transpile(&identity(8)), Err(SbmError::UnsupportedWidth(3))));
    }

    #[test]
    fn rz_compiles_to_positive_frequency() {
        let c = CircuitIR::new(
            1,
            vec![GateIR::Rotation1Q {
                target: 0,
                theta: 0.0,
                phi: 0.0,
                lambda: -PI / 2.0,
            }],
        )
        .unwrap();
        let s = compile_circuit(&c).unwrap();
        match s.gates[0] {
            SnailGate::Snail { params, .. } => {
                assert!((params.omega - PI / 2.0).abs() < 1e-12);
                assert!(params.drive.abs() < 1e-12);
            }
            _ => panic!("expected a SNAIL gate"),
        }
        let flipped = CircuitIR::new(
            1,
            vec![GateIR::Rotation1Q {
                target: 0,
                theta: 0.0,
                phi: 0.0,
                lambda: PI / 2.0,
            }],
        )
        .unwrap();
        let s = compile_circuit(&flipped).unwrap();
        let SnailGate::Snail { params, .. } = s.gates[0] else { panic!() };
        assert!((params.omega - 3.0 * PI / 2.0).abs() < 1e-12);
        let raw = compile_circuit_with(&flipped, CompileOptions { stabilize: false }).unwrap();
        assert_eq!(raw.unstable_gates(), 1);
    }

    #[test]
    fn cz_compiles_to_cross_kerr() {
        let c = CircuitIR::new(2, vec![GateIR::Cz { targets: [0, 1] }]).unwrap();
        let s = compile_circuit(&c).unwrap();
        assert_eq!(s.gates, vec![SnailGate::CrossKerr { targets: [0, 1], chi_t: PI }]);
    }

    #[test]
    fn invalid_circuits_rejected() {
        assert!(CircuitIR::new(2, vec![GateIR::Cz { targets: [0, 0] }]).is_err());
        assert!(CircuitIR::new(1, vec![GateIR::Cz { targets: [0, 1] }]).is_err());
        assert!(decompose_2q(&identity(4).mapv(|z| z * 1.1)).is_err());
    }

    #[test]
    fn json_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = decompose_2q(&haar_unitary(&mut rng, 4)).unwrap();
        let back = CircuitIR::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        let v: serde_json::Value = serde_json::from_str(&c.to_json().unwrap()).unwrap();
        assert_eq!(v["units"], "dimensionless");
        let kinds: Vec<&str> = v["gates"].as_array().unwrap().iter().map(|g| g["type"].as_str().unwrap()).collect();
        assert!(kinds.contains(&"rot") && kinds.contains(&"cz"));

        let s = compile_circuit(&c).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        let first = &v["gates"][0];
        assert_eq!(first["type"], "snail");
        for key in ["target", "offset", "omega", "drive", "g3", "phase", "g4"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
        assert_eq!(SnailCircuit::from_json(&s.to_json().unwrap()).unwrap(), s);
    }
}
