//! The numbered acceptance checks, shared by `selftest` and the acceptance
//! test target. Thresholds here are fixed; `SBM_TOL` never reaches them.

use std::f64::consts::TAU;
use std::fmt;

use ndarray::{array, s, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sbm::fock::{gamma_k, sbm_map, DysonMaleev, FockCutoff};
use sbm::models::{
    dilate, dilated_circuit_step, dilated_step, discretize_ohmic, fmo_hamiltonian, tls_donor_population,
    tls_hamiltonian, SpinBosonPropagator, SpinBosonSpec,
};
use sbm::numerics::{dagger, max_abs_diff, trace_fidelity};
use sbm::random::{haar_unitary, random_hermitian};
use sbm::simulate::{propagate_dynamics, InitialState, PropagationMode, Stepping, DEFAULT_CUTOFF};
use sbm::snail::{compile_1q, cross_kerr_cz, rx_params, rz_params, snail_operator, snail_unitary};
use sbm::transpile::{decompose_2q, reconstruct};
use sbm::units::{DEFAULT_STEPS, DEFAULT_TAU_FS, WAVENUMBER_FS_TO_RAD};
use sbm::{HermitianMatrix, Result, C64};

/// Sampling of the spin-boson time grid: `t_j = j·STRIDE·dt`.
pub const SAMPLE_STRIDE: usize = 333;
pub const SAMPLE_COUNT: usize = 41;
/// Bath cutoff of the full desk-scale open-system check.
pub const DESK_BATH_CUTOFF: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub passed: bool,
}

impl Metric {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: Bound::AtMost,
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: Bound::AtLeast,
            threshold,
            passed: value >= threshold,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        if self.threshold.fract() == 0.0 && self.value.fract() == 0.0 {
            write!(f, "{} {} {op} {}", self.name, self.value, self.threshold)
        } else {
            write!(f, "{} {:.3e} {op} {:.0e}", self.name, self.value, self.threshold)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub metrics: Vec<Metric>,
}

impl Check {
    pub fn new(id: u32, name: &str, metrics: Vec<Metric>) -> Self {
        Self {
            id,
            name: name.into(),
            passed: metrics.iter().all(|m| m.passed),
            metrics,
        }
    }

    /// Append a metric measured outside the check itself (e.g. runtime).
    pub fn with(mut self, m: Metric) -> Self {
        self.passed &= m.passed;
        self.metrics.push(m);
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}:", self.id, self.name)?;
        for (i, m) in self.metrics.iter().enumerate() {
            write!(f, "{} {m}", if i == 0 { "" } else { ";" })?;
        }
        Ok(())
    }
}

/// Random Hermitian `k×k` (k cycling through 2..=6) mapped at `D = 2k`.
pub fn sbm_exactness(seed: u64, samples: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut top, mut off) = (0.0f64, 0.0f64);
    for i in 0..samples {
        let k = 2 + i % 5;
        let h = HermitianMatrix::new(random_hermitian(&mut rng, k))?;
        let mapped = sbm_map(&h, FockCutoff::default_for(k))?;
        top = top.max(mapped.top_block_residual());
        off = off.max(mapped.off_block_residual());
    }
    Ok(Check::new(
        1,
        "SBM exactness",
        vec![Metric::at_most("top_block", top, 1e-12), Metric::at_most("off_block", off, 1e-12)],
    ))
}

/// `Γ₃²/2^{3/2}` at `(0,2)`, `(3,5)`, `(4,6)`.
pub fn gamma_entries() -> Result<Check> {
    let g = gamma_k(3, FockCutoff::new(8)?)?;
    let sq = g.matrix().dot(g.matrix()).mapv(|z| z / 2f64.powf(1.5));
    let expected = [((0, 2), 1.0), ((3, 5), 10f64.sqrt()), ((4, 6), 3.0 * 15f64.sqrt())];
    let err = expected
        .iter()
        .map(|&((r, c), v)| (sq[[r, c]] - C64::new(v, 0.0)).norm())
        .fold(0.0, f64::max);
    Ok(Check::new(2, "Gamma_3 squared entries", vec![Metric::at_most("max_error", err, 1e-14)]))
}

fn top2(m: &Array2<C64>) -> Array2<C64> {
    m.slice(s![..2, ..2]).to_owned()
}

/// Compile/rebuild round trips plus `R_z`, `R_x` gate fidelities.
pub fn snail_round_trip(seed: u64, samples: usize, angles: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = FockCutoff::new(DEFAULT_CUTOFF)?;
    let (mut top, mut leak) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let h = HermitianMatrix::new(random_hermitian(&mut rng, 2))?;
        let op = snail_operator(&compile_1q(&h)?, d)?;
        top = top.max(max_abs_diff(&op.top_block(2), h.matrix()));
        leak = leak.max(op.off_block_coupling(2));
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let (mut rz_worst, mut rx_worst) = (1.0f64, 1.0f64);
    for _ in 0..angles {
        let a = rng.random_range(-TAU..TAU);
        let rz = top2(&snail_unitary(&rz_params(a), d)?);
        rz_worst = rz_worst.min(trace_fidelity(&rz, &array![[one, zero], [zero, C64::from_polar(1.0, a)]]));
        let rx = top2(&snail_unitary(&rx_params(a), d)?);
        let (c, sn) = ((a / 2.0).cos(), (a / 2.0).sin());
        let want = array![[C64::new(c, 0.0), C64::new(0.0, -sn)], [C64::new(0.0, -sn), C64::new(c, 0.0)]];
        rx_worst = rx_worst.min(trace_fidelity(&rx, &want));
    }
    Ok(Check::new(
        3,
        "SNAIL round trip",
        vec![
            Metric::at_most("top_block", top, 1e-12),
            Metric::at_most("off_block", leak, 1e-12),
            Metric::at_most("rz_infidelity", 1.0 - rz_worst, 1e-10),
            Metric::at_most("rx_infidelity", 1.0 - rx_worst, 1e-10),
        ],
    ))
}

/// Qubit block of `exp(−iπ N⊗N)` at `D = 4`.
pub fn cross_kerr() -> Result<Check> {
    let m = cross_kerr_cz(FockCutoff::new(4)?)?.into_matrix();
    let idx = [0, 1, 4, 5];
    let block = Array2::from_shape_fn((4, 4), |(a, b)| m[[idx[a], idx[b]]]);
    let cz = Array2::from_diag(&array![1.0, 1.0, 1.0, -1.0].mapv(|x| C64::new(x, 0.0)));
    Ok(Check::new(4, "Cross-Kerr CZ", vec![Metric::at_most("max_error", max_abs_diff(&block, &cz), 1e-14)]))
}

/// Haar-random two-qubit unitaries through the KAK transpiler.
pub fn transpiler(seed: u64, samples: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut max_cz) = (1.0f64, 0usize);
    for _ in 0..samples {
        let u = haar_unitary(&mut rng, 4);
        let c = decompose_2q(&u)?;
        max_cz = max_cz.max(c.cz_count());
        worst = worst.min(trace_fidelity(&reconstruct(&c)?, &u));
    }
    Ok(Check::new(
        5,
        "Transpiler soundness",
        vec![
            Metric::at_most("infidelity", 1.0 - worst, 1e-9),
            Metric::at_most("max_cz", max_cz as f64, 3.0),
        ],
    ))
}

fn stepping() -> Result<Stepping> {
    Ok(Stepping {
        tau: DEFAULT_TAU_FS,
        steps: DEFAULT_STEPS,
        scale: WAVENUMBER_FS_TO_RAD,
        cutoff: FockCutoff::new(DEFAULT_CUTOFF)?,
    })
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// TLS (ε = 50, Δ = 20 cm⁻¹) on one SNAIL mode against the Rabi formula.
pub fn tls_dynamics() -> Result<Check> {
    let (eps, delta) = (50.0, 20.0);
    let series = propagate_dynamics(
        &tls_hamiltonian(eps, delta),
        stepping()?,
        &InitialState::Basis(0),
        PropagationMode::Snail,
        &labels(&["donor", "acceptor"]),
    )?;
    let dev = series
        .times
        .iter()
        .zip(&series.values)
        .map(|(t, row)| {
            let p = tls_donor_population(eps, delta, *t, WAVENUMBER_FS_TO_RAD);
            (row[0] - p).abs().max((row[1] - (1.0 - p)).abs())
        })
        .fold(0.0, f64::max);
    Ok(Check::new(
        6,
        "TLS dynamics",
        vec![
            Metric::at_most("rabi_deviation", dev, 1e-8),
            Metric::at_most("leakage", series.max_leakage(), 1e-10),
        ],
    ))
}

/// FMO on two SNAIL modes against direct exponentiation.
pub fn fmo_dynamics() -> Result<Check> {
    let h = fmo_hamiltonian();
    let names = labels(&["site1", "site2", "site3", "site4"]);
    let run = |mode| propagate_dynamics(&h, stepping()?, &InitialState::Basis(0), mode, &names);
    let direct = run(PropagationMode::Direct)?;
    let snail = run(PropagationMode::Snail)?;
    let site1 = |s: &sbm::simulate::PopulationSeries| s.column("site1").unwrap_or_default();
    let dev = site1(&direct)
        .iter()
        .zip(site1(&snail))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Check::new(
        7,
        "FMO dynamics",
        vec![
            Metric::at_most("site1_deviation", dev, 1e-8),
            Metric::at_most("all_sites_deviation", direct.max_deviation(&snail), 1e-8),
            Metric::at_most("leakage", snail.max_leakage(), 1e-10),
        ],
    ))
}

/// Population map, dilation and compiled dilation on the desk spin-boson
/// instance with the given bath cutoff.
pub fn open_system(bath_cutoff: usize) -> Result<Check> {
    let spec = SpinBosonSpec::desk();
    let bath = discretize_ohmic(&spec)?;
    let times = spec.sample_times(SAMPLE_STRIDE, SAMPLE_COUNT);
    let ops = SpinBosonPropagator::new(&spec, &bath, FockCutoff::new(bath_cutoff)?)?.superoperator(&times);
    let identity = max_abs_diff(
        &ops.matrices[0].mapv(|x| C64::new(x, 0.0)),
        &Array2::eye(2).mapv(|x: f64| C64::new(x, 0.0)),
    );
    let circuit_cutoff = FockCutoff::new(DEFAULT_CUTOFF)?;
    let (mut dilation, mut circuit, mut leak, mut unitarity) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in &ops.matrices {
        let d = dilate(p)?;
        unitarity = unitarity.max(d.orthogonality_residual());
        for v in [[1.0, 0.0], [0.0, 1.0], [0.3, 0.7]] {
            let want = p.dot(&array![v[0], v[1]]);
            let got = dilated_step(&d, &v)?;
            dilation = dilation.max((got[0] - want[0]).abs()).max((got[1] - want[1]).abs());
        }
        let exact = dilated_step(&d, &[1.0, 0.0])?;
        let run = dilated_circuit_step(&d, &[1.0, 0.0], circuit_cutoff)?;
        circuit = circuit
            .max((run.populations[0] - exact[0]).abs())
            .max((run.populations[1] - exact[1]).abs());
        leak = leak.max(run.leakage);
    }
    Ok(Check::new(
        8,
        &format!("Open-system pipeline (bath cutoff {bath_cutoff})"),
        vec![
            Metric::at_most("p0_identity", identity, 1e-10),
            Metric::at_most("column_sums", ops.max_column_sum_error(), 1e-8),
            Metric::at_most("dilation_unitarity", unitarity, 1e-10),
            Metric::at_most("dilated_step", dilation, 1e-10),
            Metric::at_most("circuit_step", circuit, 1e-8),
            Metric::at_most("circuit_leakage", leak, 1e-10),
            Metric::at_least("sampled_times", ops.times.len() as f64, 20.0),
        ],
    ))
}

/// `Γ_k = S₊†` exactly and `[S₊, S₋] = 2S_z` below the top level.
pub fn dyson_maleev() -> Result<Check> {
    let (mut adjoint, mut comm) = (0.0f64, 0.0f64);
    for k in 2..=6 {
        let d = FockCutoff::default_for(k);
        let dm = DysonMaleev::for_dimension(k, d);
        adjoint = adjoint.max(max_abs_diff(&dagger(&dm.s_plus), gamma_k(k, d)?.matrix()));
        let inner = d.levels() - 1;
        let lhs = dm.commutator().slice(s![..inner, ..inner]).to_owned();
        let rhs = dm.s_z.slice(s![..inner, ..inner]).mapv(|z| z * 2.0);
        comm = comm.max(max_abs_diff(&lhs, &rhs));
    }
    Ok(Check::new(
        9,
        "Dyson-Maleev identity",
        vec![Metric::at_most("gamma_adjoint", adjoint, 0.0), Metric::at_most("commutator", comm, 1e-12)],
    ))
}

/// Every deterministic check except the runtime-bound spin-boson run, which
/// uses `bath_cutoff` here.
pub fn suite(seed: u64, bath_cutoff: usize) -> Result<Vec<Check>> {
    Ok(vec![
        sbm_exactness(seed, 1000)?,
        gamma_entries()?,
        snail_round_trip(seed.wrapping_add(1), 10_000, 100)?,
        cross_kerr()?,
        transpiler(seed.wrapping_add(2), 1000)?,
        tls_dynamics()?,
        fmo_dynamics()?,
        open_system(bath_cutoff)?,
        dyson_maleev()?,
    ])
}
