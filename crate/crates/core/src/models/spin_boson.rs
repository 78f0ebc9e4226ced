//! Two-state spin-boson model with a discretized Ohmic bath, solved by exact
//! diagonalization of the truncated vibronic Hamiltonian.
//!
//! The vibronic basis index is `e·D^N + bath`, electronic state most
//! significant and bath mode 0 most significant within `bath`.

use std::fmt::Write as _;

use ndarray::{s, Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SbmError};
use crate::fock::{ladder, FockCutoff};
use crate::numerics::{eigh_real, from_real, HermitianMatrix};
use crate::simulate::PopulationSeries;

use super::dilation::spectral_norm;

/// Largest dense vibronic dimension accepted.
pub const DENSE_DIM_CAP: usize = 10_000;

/// Cumulative Boltzmann weight the number-state ensemble must reach.
pub const ENSEMBLE_WEIGHT: f64 = 1.0 - 1e-6;

/// Model and simulation parameters, dimensionless (`ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinBosonSpec {
    pub epsilon_sb: f64,
    pub delta_sb: f64,
    pub beta: f64,
    pub xi: f64,
    pub omega_c: f64,
    pub omega_max: f64,
    pub n_modes: usize,
    pub dt: f64,
}

impl Default for SpinBosonSpec {
    fn default() -> Self {
        Self::table()
    }
}

impl SpinBosonSpec {
    /// Reference parameters with 60 bath modes.
    pub fn table() -> Self {
        Self {
            epsilon_sb: 1.0,
            delta_sb: 1.0,
            beta: 5.0,
            xi: 0.1,
            omega_c: 1.0,
            omega_max: 5.0,
            n_modes: 60,
            dt: 1.50083e-3,
        }
    }

    /// Reference parameters with four bath modes.
    pub fn desk() -> Self {
        Self {
            n_modes: 4,
            ..Self::table()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("beta", self.beta),
            ("xi", self.xi),
            ("omega_c", self.omega_c),
            ("omega_max", self.omega_max),
            ("dt", self.dt),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SbmError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.epsilon_sb.is_finite() || !self.delta_sb.is_finite() {
            return Err(SbmError::InvalidParameter("energies must be finite".into()));
        }
        if self.n_modes == 0 {
            return Err(SbmError::InvalidParameter("n_modes must be at least 1".into()));
        }
        Ok(())
    }

    /// `t_j = j·stride·dt` for `j = 0..count`.
    pub fn sample_times(&self, stride: usize, count: usize) -> Vec<f64> {
        (0..count).map(|j| (j * stride) as f64 * self.dt).collect()
    }
}

/// Bath frequencies and linear couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedBath {
    pub frequencies: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl DiscretizedBath {
    pub fn empty() -> Self {
        Self {
            frequencies: Vec::new(),
            couplings: Vec::new(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    /// `Σ c_k² / (2 ω_k²)`.
    pub fn reorganization_energy(&self) -> f64 {
        self.frequencies
            .iter()
            .zip(&self.couplings)
            .map(|(w, c)| c * c / (2.0 * w * w))
            .sum()
    }
}

/// Uniform grid `ω_k = kΔω`, `Δω = ω_max/N`, with `c_k = ω_k √(ξ Δω e^{−ω_k/ω_c})`
/// so that `(π/2) Σ c_k²/ω_k δ(ω − ω_k)` samples `(π/2) ξ ω e^{−ω/ω_c}`.
pub fn discretize_ohmic(spec: &SpinBosonSpec) -> Result<DiscretizedBath> {
    spec.validate()?;
    let n = spec.n_modes;
    let dw = spec.omega_max / n as f64;
    let frequencies: Vec<f64> = (1..=n).map(|k| k as f64 * dw).collect();
    let couplings = frequencies
        .iter()
        .map(|&w| w * (spec.xi * dw * (-w / spec.omega_c).exp()).sqrt())
        .collect();
    Ok(DiscretizedBath { frequencies, couplings })
}

/// Continuum value of `Σ c_k²/(2ω_k²)`: `(ξ/2) ω_c (1 − e^{−ω_max/ω_c})`.
pub fn continuum_reorganization_energy(spec: &SpinBosonSpec) -> f64 {
    0.5 * spec.xi * spec.omega_c * (1.0 - (-spec.omega_max / spec.omega_c).exp())
}

/// Real symmetric vibronic Hamiltonian on `2·D^N` states.
#[derive(Debug, Clone)]
pub struct VibronicHamiltonian {
    pub n_modes: usize,
    pub cutoff: FockCutoff,
    pub matrix: Array2<f64>,
}

impl VibronicHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn bath_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(from_real(&self.matrix))
    }
}

/// `(a + a†)/√(2ω)` and `P²/2 + ω²R²/2` for one mode, evaluated with one
/// level of headroom so the quadratic part is exactly `ω(N + ½)`.
fn mode_operators(omega: f64, d: usize) -> (Array2<f64>, Array2<f64>) {
    let a = ladder(d + 1).mapv(|z| z.re);
    let ad = a.t().to_owned();
    let r = (&a + &ad) / (2.0 * omega).sqrt();
    let p_raw = &ad - &a; // P = i√(ω/2) p_raw, so P² = −(ω/2) p_raw²
    let p2 = p_raw.dot(&p_raw) * (-omega / 2.0);
    let h = &p2 * 0.5 + &r.dot(&r) * (0.5 * omega * omega);
    let trunc = |m: &Array2<f64>| m.slice(s![..d, ..d]).to_owned();
    (trunc(&r), trunc(&h))
}

/// Add `Σ_k w_k · op_k` (op_k acting on mode `k`) into `out`.
fn accumulate_local(out: &mut Array2<f64>, ops: &[Array2<f64>], weights: &[f64], d: usize) {
    let n = ops.len();
    let dim = out.nrows();
    for (k, (op, &w)) in ops.iter().zip(weights).enumerate() {
        if w == 0.0 {
            continue;
        }
        let stride = d.pow((n - 1 - k) as u32);
        for i in 0..dim {
            let level = (i / stride) % d;
            for m in 0..d {
                let v = op[[m, level]];
                if v != 0.0 {
                    let j = i + m * stride - level * stride;
                    out[[j, i]] += w * v;
                }
            }
        }
    }
}

fn check_dim(n_modes: usize, d: usize) -> Result<usize> {
    let bath = d
        .checked_pow(n_modes as u32)
        .filter(|b| b.checked_mul(2).is_some_and(|x| x <= DENSE_DIM_CAP));
    match bath {
        Some(b) => Ok(b),
        None => Err(SbmError::DimensionCap {
            dim: d.saturating_pow(n_modes as u32).saturating_mul(2),
            cap: DENSE_DIM_CAP,
        }),
    }
}

/// `H = [[ε + H_B − Σc_kR_k, Δ], [Δ, −ε + H_B + Σc_kR_k]]`.
pub fn spin_boson_hamiltonian(
    spec: &SpinBosonSpec,
    bath: &DiscretizedBath,
    cutoff: FockCutoff,
) -> Result<VibronicHamiltonian> {
    let d = cutoff.levels();
    let n = bath.n_modes();
    if bath.couplings.len() != n {
        return Err(SbmError::DimensionMismatch {
            expected: n,
            got: bath.couplings.len(),
        });
    }
    let b = check_dim(n, d)?;
    let (rs, hs): (Vec<_>, Vec<_>) = bath.frequencies.iter().map(|&w| mode_operators(w, d)).unzip();

    let mut h_bath = Array2::<f64>::zeros((b, b));
    accumulate_local(&mut h_bath, &hs, &vec![1.0; n], d);
    let mut coupling = Array2::<f64>::zeros((b, b));
    accumulate_local(&mut coupling, &rs, &bath.couplings, d);

    let mut m = Array2::<f64>::zeros((2 * b, 2 * b));
    m.slice_mut(s![..b, ..b]).assign(&(&h_bath - &coupling));
    m.slice_mut(s![b.., b..]).assign(&(&h_bath + &coupling));
    for i in 0..b {
        m[[i, i]] += spec.epsilon_sb;
        m[[b + i, b + i]] -= spec.epsilon_sb;
        m[[i, b + i]] = spec.delta_sb;
        m[[b + i, i]] = spec.delta_sb;
    }
    Ok(VibronicHamiltonian {
        n_modes: n,
        cutoff,
        matrix: m,
    })
}

/// One bath number state of the thermal ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub levels: Vec<usize>,
    pub index: usize,
    pub weight: f64,
}

/// Boltzmann-weighted bath number states, heaviest first, kept until the
/// cumulative weight reaches [`ENSEMBLE_WEIGHT`] and then renormalized.
pub fn thermal_ensemble(bath: &DiscretizedBath, cutoff: FockCutoff, beta: f64) -> Result<Vec<EnsembleMember>> {
    let d = cutoff.levels();
    let n = bath.n_modes();
    let b = check_dim(n, d)?;
    let boltz: Vec<f64> = bath.frequencies.iter().map(|w| (-beta * w).exp()).collect();
    let mut all: Vec<EnsembleMember> = (0..b)
        .map(|index| {
            let levels: Vec<usize> = (0..n).map(|k| (index / d.pow((n - 1 - k) as u32)) % d).collect();
            let weight = levels
                .iter()
                .zip(&boltz)
                .map(|(&l, &x)| (1.0 - x) * x.powi(l as i32))
                .product();
            EnsembleMember { levels, index, weight }
        })
        .collect();
    all.sort_by(|x, y| y.weight.total_cmp(&x.weight).then(x.index.cmp(&y.index)));

    let mut kept = Vec::new();
    let mut total = 0.0;
    for m in all {
        if total >= ENSEMBLE_WEIGHT {
            break;
        }
        total += m.weight;
        kept.push(m);
    }
    if total < ENSEMBLE_WEIGHT {
        return Err(SbmError::EnsembleTruncation {
            reached: total,
            required: ENSEMBLE_WEIGHT,
        });
    }
    for m in &mut kept {
        m.weight /= total;
    }
    Ok(kept)
}

/// Time series of 2×2 population maps; column `j` is the population vector
/// reached from electronic state `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperoperatorSeries {
    pub times: Vec<f64>,
    pub matrices: Vec<Array2<f64>>,
}

impl SuperoperatorSeries {
    /// Largest `|Σ_i P_ij − 1|` over all times and columns.
    pub fn max_column_sum_error(&self) -> f64 {
        self.matrices
            .iter()
            .flat_map(|p| p.sum_axis(Axis(0)).into_iter().map(|s| (s - 1.0).abs()))
            .fold(0.0, f64::max)
    }

    /// `t,p00,p01,p10,p11,rescale` with twelve significant digits.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("t,p00,p01,p10,p11,rescale\n");
        for (t, p) in self.times.iter().zip(&self.matrices) {
            let rescale = spectral_norm(p)?.max(1.0);
            let _ = writeln!(
                out,
                "{t:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{rescale:.11e}",
                p[[0, 0]],
                p[[0, 1]],
                p[[1, 0]],
                p[[1, 1]]
            );
        }
        Ok(out)
    }
}

/// Eigendecomposition of the vibronic Hamiltonian plus the thermal ensemble,
/// shared by every propagation of one model instance.
#[derive(Debug, Clone)]
pub struct SpinBosonPropagator {
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<f64>,
    ensemble: Vec<EnsembleMember>,
    bath_dim: usize,
}

impl SpinBosonPropagator {
    pub fn new(spec: &SpinBosonSpec, bath: &DiscretizedBath, cutoff: FockCutoff) -> Result<Self> {
        spec.validate()?;
        let h = spin_boson_hamiltonian(spec, bath, cutoff)?;
        let ensemble = thermal_ensemble(bath, cutoff, spec.beta)?;
        let (eigenvalues, eigenvectors) = eigh_real(&h.matrix)?;
        Ok(Self {
            eigenvalues,
            eigenvectors,
            ensemble,
            bath_dim: h.bath_dim(),
        })
    }

    pub fn ensemble(&self) -> &[EnsembleMember] {
        &self.ensemble
    }

    /// Population map at each time.
    pub fn superoperator(&self, times: &[f64]) -> SuperoperatorSeries {
        let b = self.bath_dim;
        let members = self.ensemble.len();
        // Initial states e ⊗ n_m, columns ordered (e = 0 members, e = 1 members).
        let starts: Vec<usize> = (0..2)
            .flat_map(|e| self.ensemble.iter().map(move |m| e * b + m.index))
            .collect();
        let coeffs = self.eigenvectors.select(Axis(0), &starts).reversed_axes();

        let matrices = times
            .iter()
            .map(|&t| {
                let cos = self.eigenvalues.mapv(|l| (l * t).cos()).insert_axis(Axis(1));
                let sin = self.eigenvalues.mapv(|l| (l * t).sin()).insert_axis(Axis(1));
                let re = self.eigenvectors.dot(&(&coeffs * &cos));
                let im = self.eigenvectors.dot(&(&coeffs * &sin));
                let prob = &re * &re + &im * &im;
                let mut p = Array2::<f64>::zeros((2, 2));
                for e in 0..2 {
                    for (m, member) in self.ensemble.iter().enumerate() {
                        let col = prob.column(e * members + m);
                        for f in 0..2 {
                            p[[f, e]] += member.weight * col.slice(s![f * b..(f + 1) * b]).sum();
                        }
                    }
                }
                p
            })
            .collect();
        SuperoperatorSeries {
            times: times.to_vec(),
            matrices,
        }
    }

    /// Electronic populations from a diagonal initial electronic state.
    pub fn propagate(&self, sigma0: [f64; 2], times: &[f64]) -> Result<PopulationSeries> {
        check_distribution(&sigma0)?;
        let ops = self.superoperator(times);
        let values: Vec<Vec<f64>> = ops
            .matrices
            .iter()
            .map(|p| (0..2).map(|f| p[[f, 0]] * sigma0[0] + p[[f, 1]] * sigma0[1]).collect())
            .collect();
        Ok(PopulationSeries {
            times: times.to_vec(),
            labels: vec!["p0".into(), "p1".into()],
            leakage: vec![0.0; values.len()],
            values,
        })
    }
}

pub(crate) fn check_distribution(v: &[f64]) -> Result<()> {
    if v.iter().any(|&x| x.is_nan() || x < 0.0) {
        return Err(SbmError::InvalidDistribution(format!("negative entry in {v:?}")));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(SbmError::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// Thermal-bath populations from `diag(sigma0)`.
pub fn reference_propagate(
    spec: &SpinBosonSpec,
    bath: &DiscretizedBath,
    cutoff: FockCutoff,
    sigma0: [f64; 2],
    times: &[f64],
) -> Result<PopulationSeries> {
    check_distribution(&sigma0)?;
    SpinBosonPropagator::new(spec, bath, cutoff)?.propagate(sigma0, times)
}

/// Population maps from the two pure electronic initial states.
pub fn population_superoperator(
    spec: &SpinBosonSpec,
    bath: &DiscretizedBath,
    cutoff: FockCutoff,
    times: &[f64],
) -> Result<SuperoperatorSeries> {
    Ok(SpinBosonPropagator::new(spec, bath, cutoff)?.superoperator(times))
}
