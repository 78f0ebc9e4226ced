use std::f64::consts::{PI, TAU};

use ndarray::{array, s, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbm::fock::FockCutoff;
use sbm::numerics::{max_abs_diff, trace_fidelity};
use sbm::random::{haar_unitary, random_hermitian};
use sbm::snail::{compile_1q, cross_kerr_cz, rx_params, rz_params, snail_operator, snail_unitary};
use sbm::transpile::{decompose_2q, reconstruct, transpile, CircuitIR};
use sbm::{HermitianMatrix, C64};

fn top(m: &Array2<C64>, k: usize) -> Array2<C64> {
    m.slice(s![..k, ..k]).to_owned()
}

#[test]
fn snail_round_trip_ten_thousand() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = FockCutoff::new(4).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let h = HermitianMatrix::new(random_hermitian(&mut rng, 2)).unwrap();
        let op = snail_operator(&compile_1q(&h).unwrap(), d).unwrap();
        worst = worst.max(max_abs_diff(&op.top_block(2), h.matrix()));
        assert!(op.off_block_coupling(2) <= 1e-12);
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn rotation_gates_match_their_definitions() {
    let d = FockCutoff::new(5).unwrap();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    for j in 0..100 {
        let angle = -TAU + 2.0 * TAU * (j as f64 + 0.5) / 100.0;
        let rz = top(&snail_unitary(&rz_params(angle), d).unwrap(), 2);
        let want = array![[one, zero], [zero, C64::from_polar(1.0, angle)]];
        assert!(trace_fidelity(&rz, &want) >= 1.0 - 1e-10, "rz {angle}");

        let rx = top(&snail_unitary(&rx_params(angle), d).unwrap(), 2);
        let (c, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        let want = array![[C64::new(c, 0.0), C64::new(0.0, -sn)], [C64::new(0.0, -sn), C64::new(c, 0.0)]];
        assert!(trace_fidelity(&rx, &want) >= 1.0 - 1e-10, "rx {angle}");
    }
}

#[test]
fn cross_kerr_qubit_block_is_cz() {
    let m = cross_kerr_cz(FockCutoff::new(4).unwrap()).unwrap().into_matrix();
    let idx = [0, 1, 4, 5];
    let signs = [1.0, 1.0, 1.0, -1.0];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            let want = if a == b { C64::new(signs[a], 0.0) } else { C64::new(0.0, 0.0) };
            assert!((m[[i, j]] - want).norm() <= 1e-14);
        }
    }
}

#[test]
fn haar_two_qubit_transpilation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..1000 {
        let u = haar_unitary(&mut rng, 4);
        let c = decompose_2q(&u).unwrap();
        assert!(c.cz_count() <= 3);
        let f = trace_fidelity(&reconstruct(&c).unwrap(), &u);
        assert!(f >= 1.0 - 1e-9, "sample {i}: {f}");
    }
}

#[test]
fn json_round_trip_preserves_reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let u = haar_unitary(&mut rng, 4);
        let c = transpile(&u).unwrap();
        let back = CircuitIR::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(max_abs_diff(&reconstruct(&back).unwrap(), &u) < 1e-9);
    }
}

#[test]
fn single_qubit_angles_cover_the_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let theta = rng.random_range(-PI..PI);
        let c = transpile(&sbm::transpile::rx(theta)).unwrap();
        assert!(max_abs_diff(&reconstruct(&c).unwrap(), &sbm::transpile::rx(theta)) < 1e-12);
    }
}
