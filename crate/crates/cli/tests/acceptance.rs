//! Runs the ten acceptance criteria at their fixed thresholds and prints one
//! line per criterion. Exits nonzero if any criterion fails.

use std::fs;
use std::process::{Command, ExitCode, Stdio};
use std::time::Instant;

use sbm_cli::checks::{self, Check, Metric, DESK_BATH_CUTOFF};

const SEED: u64 = 20240607;

fn timed(limit: Option<f64>, f: impl FnOnce() -> sbm::Result<Check>) -> Check {
    let start = Instant::now();
    let check = f().expect("check ran");
    match limit {
        Some(secs) => check.with(Metric::at_most("seconds", start.elapsed().as_secs_f64(), secs)),
        None => check,
    }
}

fn selftest_summary(dir: &std::path::Path) -> (bool, Vec<u8>) {
    let status = Command::new(env!("CARGO_BIN_EXE_sbm"))
        .args(["selftest", "--seed", &SEED.to_string(), "--out"])
        .arg(dir)
        .stdout(Stdio::null())
        .status()
        .expect("selftest runs");
    (status.success(), fs::read(dir.join("summary.json")).expect("summary written"))
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().expect("temp dir");
    let (ok_a, a) = selftest_summary(&tmp.path().join("a"));
    let (ok_b, b) = selftest_summary(&tmp.path().join("b"));
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    Check::new(
        10,
        "Determinism",
        vec![
            Metric::at_most("differing_bytes", differing as f64, 0.0),
            Metric::at_least("runs_passed", (ok_a as u8 + ok_b as u8) as f64, 2.0),
        ],
    )
}

fn main() -> ExitCode {
    let results = [
        timed(Some(10.0), || checks::sbm_exactness(SEED, 1000)),
        timed(None, checks::gamma_entries),
        timed(None, || checks::snail_round_trip(SEED + 1, 10_000, 100)),
        timed(None, checks::cross_kerr),
        timed(Some(30.0), || checks::transpiler(SEED + 2, 1000)),
        timed(None, checks::tls_dynamics),
        timed(Some(60.0), checks::fmo_dynamics),
        timed(Some(300.0), || checks::open_system(DESK_BATH_CUTOFF)),
        timed(None, checks::dyson_maleev),
        determinism(),
    ];
    for c in &results {
        println!("{c}");
    }
    let failed = results.iter().filter(|c| !c.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
