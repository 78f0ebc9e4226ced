//! State-vector execution of compiled circuits on truncated Fock spaces.
//!
//! Each qubit is one oscillator mode. The mode index is the qubit index, and
//! mode 0 is the most significant digit of the amplitude index.

use std::fmt::Write as _;

use ndarray::{Array1, Array2, Axis};

use crate::error::{Result, SbmError};
use crate::fock::FockCutoff;
use crate::numerics::{expm_hermitian, ComplexMatrix, HermitianMatrix, C64};
use crate::snail::snail_unitary;
use crate::transpile::{compile_circuit, transpile, SnailCircuit, SnailGate};

/// Default per-mode cutoff for running compiled circuits.
pub const DEFAULT_CUTOFF: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: FockCutoff,
    amplitudes: Array1<C64>,
}

impl FockState {
    pub fn new(modes: usize, cutoff: FockCutoff, amplitudes: Array1<C64>) -> Result<Self> {
        let dim = space_dim(modes, cutoff)?;
        if amplitudes.len() != dim {
            return Err(SbmError::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SbmError::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            modes,
            cutoff,
            amplitudes,
        })
    }

    /// Product of number states, `levels[j]` on mode `j`.
    pub fn fock(cutoff: FockCutoff, levels: &[usize]) -> Result<Self> {
        let d = cutoff.levels();
        let mut index = 0;
        for &n in levels {
            if n >= d {
                return Err(SbmError::IndexOutOfRange { index: n, dim: d });
            }
            index = index * d + n;
        }
        let dim = space_dim(levels.len(), cutoff)?;
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Self::new(levels.len(), cutoff, amplitudes)
    }

    /// Embed `2^modes` qubit amplitudes into the Fock space.
    pub fn from_qubits(modes: usize, cutoff: FockCutoff, qubits: &Array1<C64>) -> Result<Self> {
        if qubits.len() != 1 << modes {
            return Err(SbmError::DimensionMismatch {
                expected: 1 << modes,
                got: qubits.len(),
            });
        }
        if cutoff.levels() < 2 {
            return Err(SbmError::CutoffTooSmall {
                required: 2,
                got: cutoff.levels(),
            });
        }
        let mut amplitudes = Array1::zeros(space_dim(modes, cutoff)?);
        for (q, &z) in qubits.iter().enumerate() {
            amplitudes[qubit_to_fock(q, modes, cutoff.levels())] = z;
        }
        Self::new(modes, cutoff, amplitudes)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Amplitudes on the qubit subspace (levels 0 and 1 only).
    pub fn qubit_amplitudes(&self) -> Array1<C64> {
        let d = self.cutoff.levels();
        Array1::from_iter((0..1 << self.modes).map(|q| self.amplitudes[qubit_to_fock(q, self.modes, d)]))
    }
}

fn space_dim(modes: usize, cutoff: FockCutoff) -> Result<usize> {
    cutoff
        .levels()
        .checked_pow(modes as u32)
        .ok_or(SbmError::DimensionCap {
            dim: usize::MAX,
            cap: usize::MAX,
        })
}

fn qubit_to_fock(q: usize, modes: usize, d: usize) -> usize {
    (0..modes).fold(0, |acc, j| acc * d + ((q >> (modes - 1 - j)) & 1))
}

/// `u` on mode `target`, identity elsewhere.
fn apply_local(amps: &mut Array1<C64>, u: &ComplexMatrix, target: usize, modes: usize, d: usize) {
    let right = d.pow((modes - 1 - target) as u32);
    let left = amps.len() / (d * right);
    let mut view = amps
        .view_mut()
        .into_shape_with_order((left, d, right))
        .expect("contiguous state vector");
    for mut slab in view.axis_iter_mut(Axis(0)) {
        let updated = u.dot(&slab);
        slab.assign(&updated);
    }
}

/// Diagonal two-mode phase `exp(−iχt n_a n_b)`.
fn cross_kerr_phases(chi_t: f64, targets: [usize; 2], modes: usize, d: usize) -> Array1<C64> {
    let dim = d.pow(modes as u32);
    let level = |i: usize, j: usize| (i / d.pow((modes - 1 - j) as u32)) % d;
    Array1::from_iter((0..dim).map(|i| {
        let n = (level(i, targets[0]) * level(i, targets[1])) as f64;
        C64::from_polar(1.0, -chi_t * n)
    }))
}

/// Gate matrices of a circuit, computed once for repeated runs.
#[derive(Debug, Clone)]
pub struct PreparedCircuit {
    modes: usize,
    cutoff: FockCutoff,
    ops: Vec<PreparedGate>,
    phase: C64,
}

#[derive(Debug, Clone)]
enum PreparedGate {
    Local { target: usize, unitary: ComplexMatrix },
    Diagonal(Array1<C64>),
}

impl PreparedCircuit {
    pub fn new(c: &SnailCircuit, cutoff: FockCutoff) -> Result<Self> {
        c.validate()?;
        let ops = c
            .gates
            .iter()
            .map(|g| prepare_gate(g, c.width, cutoff))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            modes: c.width,
            cutoff,
            ops,
            phase: C64::from_polar(1.0, c.global_phase),
        })
    }

    pub fn run(&self, initial: &FockState) -> Result<FockState> {
        if initial.modes != self.modes || initial.cutoff != self.cutoff {
            return Err(SbmError::DimensionMismatch {
                expected: space_dim(self.modes, self.cutoff)?,
                got: initial.amplitudes.len(),
            });
        }
        let mut amps = initial.amplitudes.clone();
        for op in &self.ops {
            apply_prepared(&mut amps, op, self.modes, self.cutoff.levels());
        }
        if self.phase != C64::new(1.0, 0.0) {
            amps.mapv_inplace(|z| z * self.phase);
        }
        Ok(FockState {
            modes: self.modes,
            cutoff: self.cutoff,
            amplitudes: amps,
        })
    }
}

fn prepare_gate(g: &SnailGate, modes: usize, cutoff: FockCutoff) -> Result<PreparedGate> {
    Ok(match *g {
        SnailGate::Snail { target, params } => {
            if target >= modes {
                return Err(SbmError::IndexOutOfRange { index: target, dim: modes });
            }
            PreparedGate::Local {
                target,
                unitary: snail_unitary(&params, cutoff)?,
            }
        }
        SnailGate::CrossKerr { targets, chi_t } => {
            if targets.iter().any(|&t| t >= modes) || targets[0] == targets[1] {
                return Err(SbmError::InvalidCircuit(format!("bad cross-Kerr targets {targets:?}")));
            }
            if cutoff.levels() < 2 {
                return Err(SbmError::CutoffTooSmall { required: 2, got: cutoff.levels() });
            }
            PreparedGate::Diagonal(cross_kerr_phases(chi_t, targets, modes, cutoff.levels()))
        }
    })
}

fn apply_prepared(amps: &mut Array1<C64>, op: &PreparedGate, modes: usize, d: usize) {
    match op {
        PreparedGate::Local { target, unitary } => apply_local(amps, unitary, *target, modes, d),
        PreparedGate::Diagonal(phases) => *amps *= phases,
    }
}

/// Apply one compiled gate.
pub fn apply_gate(state: &FockState, gate: &SnailGate) -> Result<FockState> {
    let op = prepare_gate(gate, state.modes, state.cutoff)?;
    let mut amps = state.amplitudes.clone();
    apply_prepared(&mut amps, &op, state.modes, state.cutoff.levels());
    Ok(FockState {
        amplitudes: amps,
        ..state.clone()
    })
}

/// Apply all gates left to right.
pub fn run_circuit(c: &SnailCircuit, initial: &FockState) -> Result<FockState> {
    if c.width != initial.modes {
        return Err(SbmError::DimensionMismatch {
            expected: c.width,
            got: initial.modes,
        });
    }
    PreparedCircuit::new(c, initial.cutoff)?.run(initial)
}

/// Site ↔ qubit bitstring assignment; `sites[i]` is the basis index of site
/// `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteEncoding {
    pub sites: Vec<usize>,
}

impl SiteEncoding {
    /// Site `i` ↔ `binary(i − 1)`.
    pub fn binary(n_sites: usize) -> Self {
        Self {
            sites: (0..n_sites).collect(),
        }
    }
}

/// Site probabilities on the qubit subspace and the weight outside it.
pub fn qubit_populations(state: &FockState, encoding: &SiteEncoding) -> Result<(Vec<f64>, f64)> {
    let qubits = state.qubit_amplitudes();
    let mut probs = Vec::with_capacity(encoding.sites.len());
    for &s in &encoding.sites {
        let z = qubits
            .get(s)
            .ok_or(SbmError::IndexOutOfRange { index: s, dim: qubits.len() })?;
        probs.push(z.norm_sqr());
    }
    let inside: f64 = qubits.iter().map(|z| z.norm_sqr()).sum();
    let total: f64 = state.amplitudes.iter().map(|z| z.norm_sqr()).sum();
    Ok((probs, (total - inside).max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMode {
    Direct,
    Snail,
}

#[derive(Debug, Clone)]
pub enum InitialState {
    Basis(usize),
    Vector(Array1<C64>),
}

impl InitialState {
    fn vector(&self, dim: usize) -> Result<Array1<C64>> {
        match self {
            InitialState::Basis(i) => {
                if *i >= dim {
                    return Err(SbmError::IndexOutOfRange { index: *i, dim });
                }
                let mut v = Array1::zeros(dim);
                v[*i] = C64::new(1.0, 0.0);
                Ok(v)
            }
            InitialState::Vector(v) => {
                if v.len() != dim {
                    return Err(SbmError::DimensionMismatch {
                        expected: dim,
                        got: v.len(),
                    });
                }
                Ok(v.clone())
            }
        }
    }
}

/// Time stepping parameters. The step propagator is `exp(−i τ·scale·H)`.
#[derive(Debug, Clone, Copy)]
pub struct Stepping {
    pub tau: f64,
    pub steps: usize,
    /// Phase per unit energy per unit time (`2πc` for cm⁻¹ and fs, 1 when
    /// dimensionless).
    pub scale: f64,
    /// Per-mode Fock cutoff for the SNAIL route.
    pub cutoff: FockCutoff,
}

/// Populations over time, one row per step including `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSeries {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub leakage: Vec<f64>,
}

impl PopulationSeries {
    /// Largest absolute difference of any population or leakage entry.
    pub fn max_deviation(&self, other: &PopulationSeries) -> f64 {
        let rows = self.values.iter().zip(&other.values);
        let pops = rows
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        let leak = self
            .leakage
            .iter()
            .zip(&other.leakage)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        pops.max(leak)
    }

    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }

    /// Values of column `label`.
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let j = self.labels.iter().position(|l| l == label)?;
        Some(self.values.iter().map(|row| row[j]).collect())
    }

    /// `t,<labels>,leakage`, twelve significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push_str(",leakage\n");
        for ((t, row), leak) in self.times.iter().zip(&self.values).zip(&self.leakage) {
            let _ = write!(out, "{t:.11e}");
            for p in row {
                let _ = write!(out, ",{p:.11e}");
            }
            let _ = writeln!(out, ",{leak:.11e}");
        }
        out
    }
}

/// Repeated application of the step propagator.
///
/// `Direct` multiplies the logical state by `exp(−iτ·scale·H)`; `Snail`
/// transpiles and compiles that propagator once and runs the resulting
/// circuit on the Fock space each step.
pub fn propagate_dynamics(
    h: &HermitianMatrix,
    stepping: Stepping,
    initial: &InitialState,
    mode: PropagationMode,
    labels: &[String],
) -> Result<PopulationSeries> {
    if stepping.tau.is_nan() || stepping.tau <= 0.0 || stepping.steps == 0 {
        return Err(SbmError::InvalidParameter("need tau > 0 and steps >= 1".into()));
    }
    let n = h.dim();
    if labels.len() != n {
        return Err(SbmError::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    let psi0 = initial.vector(n)?;
    let step = expm_hermitian(h.matrix(), stepping.tau * stepping.scale)?;
    let mut series = PopulationSeries {
        times: Vec::with_capacity(stepping.steps + 1),
        labels: labels.to_vec(),
        values: Vec::with_capacity(stepping.steps + 1),
        leakage: Vec::with_capacity(stepping.steps + 1),
    };
    let mut record = |k: usize, probs: Vec<f64>, leak: f64| {
        series.times.push(k as f64 * stepping.tau);
        series.values.push(probs);
        series.leakage.push(leak);
    };

    match mode {
        PropagationMode::Direct => {
            let mut psi = psi0;
            for k in 0..=stepping.steps {
                if k > 0 {
                    psi = step.dot(&psi);
                }
                record(k, psi.iter().map(|z| z.norm_sqr()).collect(), 0.0);
            }
        }
        PropagationMode::Snail => {
            let modes = match n {
                2 => 1,
                4 => 2,
                _ => return Err(SbmError::UnsupportedWidth(n.next_power_of_two().trailing_zeros() as usize)),
            };
            let circuit = compile_circuit(&transpile(&step)?)?;
            let prepared = PreparedCircuit::new(&circuit, stepping.cutoff)?;
            let encoding = SiteEncoding::binary(n);
            let mut state = FockState::from_qubits(modes, stepping.cutoff, &psi0)?;
            for k in 0..=stepping.steps {
                if k > 0 {
                    state = prepared.run(&state)?;
                }
                let (probs, leak) = qubit_populations(&state, &encoding)?;
                record(k, probs, leak);
            }
        }
    }
    Ok(series)
}

/// Dense product of a prepared circuit's gates, for inspection.
pub fn circuit_matrix(c: &SnailCircuit, cutoff: FockCutoff) -> Result<ComplexMatrix> {
    let prepared = PreparedCircuit::new(c, cutoff)?;
    let dim = space_dim(c.width, cutoff)?;
    let mut out = Array2::zeros((dim, dim));
    for j in 0..dim {
        let mut e = Array1::zeros(dim);
        e[j] = C64::new(1.0, 0.0);
        let mut amps = e;
        for op in &prepared.ops {
            apply_prepared(&mut amps, op, c.width, cutoff.levels());
        }
        out.column_mut(j).assign(&amps.mapv(|z| z * prepared.phase));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_diff;
    use crate::random::haar_unitary;
    use crate::snail::{rz_params, CrossKerrGate, SnailParams};
    use crate::transpile::{decompose_2q, reconstruct, Units};
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn d(n: usize) -> FockCutoff {
        FockCutoff::new(n).unwrap()
    }

    #[test]
    fn identity_params_leave_state() {
        let zero = SnailParams {
            offset: 0.0,
            omega: 0.0,
            drive: 0.0,
            g3: 0.0,
            phase: 0.0,
            g4: 0.0,
        };
        let s = FockState::fock(d(4), &[1, 2]).unwrap();
        let out = apply_gate(&s, &SnailGate::Snail { target: 1, params: zero }).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn rz_minus_pi_flips_excited_amplitude() {
        let s = FockState::fock(d(4), &[1]).unwrap();
        let out = apply_gate(&s, &SnailGate::Snail { target: 0, params: rz_params(-PI) }).unwrap();
        let ratio = out.amplitudes()[1] / s.amplitudes()[1];
        assert!((ratio - C64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cross_kerr_on_one_one() {
        let s = FockState::fock(d(3), &[1, 1]).unwrap();
        let out = apply_gate(&s, &CrossKerrGate::cz(0, 1).into()).unwrap();
        assert!((out.amplitudes()[4] + C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(apply_gate(&s, &CrossKerrGate::cz(0, 2).into()).is_err());
    }

    #[test]
    fn compiled_cz_on_superposition() {
        let ir = crate::transpile::CircuitIR::new(2, vec![crate::transpile::GateIR::Cz { targets: [0, 1] }]).unwrap();
        let cz = compile_circuit(&ir).unwrap();
        let r = FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let psi = array![z, C64::new(r, 0.0), z, C64::new(r, 0.0)];
        let out = run_circuit(&cz, &FockState::from_qubits(2, d(4), &psi).unwrap()).unwrap();
        let expected = array![z, C64::new(r, 0.0), z, C64::new(-r, 0.0)];
        assert!(max_abs_diff(
            &out.qubit_amplitudes().insert_axis(Axis(1)),
            &expected.insert_axis(Axis(1))
        ) < 1e-14);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = SnailCircuit {
            width: 1,
            units: Units::Dimensionless,
            gates: vec![],
            global_phase: 0.0,
        };
        let s = FockState::fock(d(3), &[2]).unwrap();
        assert_eq!(run_circuit(&c, &s).unwrap(), s);
    }

    #[test]
    fn populations_and_leakage() {
        let s = FockState::fock(d(4), &[0, 0]).unwrap();
        let (p, leak) = qubit_populations(&s, &SiteEncoding::binary(4)).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(leak, 0.0);
        let s = FockState::fock(d(4), &[2, 0]).unwrap();
        let (p, leak) = qubit_populations(&s, &SiteEncoding::binary(4)).unwrap();
        assert!(p.iter().all(|&x| x == 0.0));
        assert_eq!(leak, 1.0);
    }

    #[test]
    fn compiled_random_circuits_match_on_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let u = haar_unitary(&mut rng, 4);
            let ir = decompose_2q(&u).unwrap();
            let sc = compile_circuit(&ir).unwrap();
            let full = circuit_matrix(&sc, d(4)).unwrap();
            let idx: Vec<usize> = (0..4).map(|q| qubit_to_fock(q, 2, 4)).collect();
            let block = Array2::from_shape_fn((4, 4), |(i, j)| full[[idx[i], idx[j]]]);
            assert!(max_abs_diff(&block, &reconstruct(&ir).unwrap()) < 1e-9);
            assert!(max_abs_diff(&block, &u) < 1e-9);
            // nothing leaves the qubit subspace
            for &j in &idx {
                let outside: f64 = (0..16).filter(|i| !idx.contains(i)).map(|i| full[[i, j]].norm_sqr()).sum();
                assert!(outside < 1e-20);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let series = PopulationSeries {
            times: vec![0.0, 5.0],
            labels: vec!["a".into(), "b".into()],
            values: vec![vec![1.0, 0.0], vec![0.25, 0.75]],
            leakage: vec![0.0, 0.0],
        };
        let csv = series.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,a,b,leakage"));
        assert_eq!(lines.next(), Some("0.00000000000e0,1.00000000000e0,0.00000000000e0,0.00000000000e0"));
    }
}
