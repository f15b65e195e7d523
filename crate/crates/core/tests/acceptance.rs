//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.
//! Run with `cargo test --test acceptance -- --nocapture --test-threads 1`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dicke_pulse::dicke::{build_collective_matrices, DickeState, SystemParams};
use dicke_pulse::fullspace::{
    build_fullspace_collective, crosscheck_dicke_restriction, SymmetricIsometry,
};
use dicke_pulse::hamiltonian::{build_effective_hamiltonian, PulseSpec};
use dicke_pulse::linalg::{commutator, expm_hermitian, max_abs_diff, CMatrix};
use dicke_pulse::propagation::{
    evolve_effective, evolve_full, infidelity_slope, run_sequence, rwa_sweep, Mode,
};
use dicke_pulse::synthesis::{synthesize, target_ghz_profile, target_w};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, pass: bool, detail: String) {
    println!(
        "criterion {id}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} failed: {detail}");
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DickeState {
    loop {
        let amps: Vec<Complex64> = (0..=n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if let Ok(s) = DickeState::normalized(amps) {
            return s;
        }
    }
}

fn random_pulse(rng: &mut ChaCha8Rng, n: usize) -> PulseSpec {
    PulseSpec {
        step_index: rng.gen_range(0..n),
        duration: rng.gen_range(0.0..4.0),
        phase: rng.gen_range(0.0..TAU),
        amplitude: rng.gen_range(0.1..2.0),
    }
}

#[test]
fn criterion_1_round_trip_synthesis() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 1.0f64;
    let mut max_pulses_ok = true;
    for n in 1..=12 {
        let params = SystemParams::in_units_of_g(n, 1e3).unwrap();
        let ground = DickeState::ground(n).unwrap();
        for _ in 0..100 {
            let target = random_state(&mut rng, n);
            let s = synthesize(&target, &params).unwrap();
            max_pulses_ok &= s.sequence.len() <= n;
            let rec = run_sequence(&ground, &s.sequence, Mode::Effective, Some(&target)).unwrap();
            worst = worst.min(rec.target_fidelity.unwrap());
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        worst >= 1.0 - 1e-10 && max_pulses_ok && elapsed < Duration::from_secs(5),
        format!("min fidelity {worst:.17}, 1200 targets in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_pulse_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = true;
    let mut worst_angle = 0.0f64;
    for n in 2..=12 {
        let params = SystemParams::in_units_of_g(n, 1e3).unwrap();
        let s = synthesize(&target_w(n).unwrap(), &params).unwrap();
        ok &= s.sequence.len() == 1 && s.sequence.pulses()[0].step_index == 0;
        let angle = s.sequence.pulses()[0].rotation_angle(n).unwrap();
        worst_angle = worst_angle.max((angle - FRAC_PI_2).abs());
        for _ in 0..50 {
            let target = random_state(&mut rng, n);
            ok &= synthesize(&target, &params).unwrap().sequence.len() <= n;
        }
    }
    report(
        2,
        ok && worst_angle <= 1e-12,
        format!("W state: one pulse for N = 2..12, max |Omega_0 tau_0 - pi/2| = {worst_angle:e}"),
    );
}

#[test]
fn criterion_3_operator_algebra() {
    let start = Instant::now();
    let mut worst_dicke = 0.0f64;
    for n in 1..=20 {
        let ops = build_collective_matrices(n).unwrap();
        let j = n as f64 / 2.0;
        let id = CMatrix::identity(n + 1, n + 1);
        let two = Complex64::from(2.0);
        let devs = [
            max_abs_diff(&commutator(&ops.jz, &ops.jplus), &ops.jplus),
            max_abs_diff(&commutator(&ops.jz, &ops.jminus), &(-&ops.jminus)),
            max_abs_diff(&commutator(&ops.jplus, &ops.jminus), &(&ops.jz * two)),
            max_abs_diff(&ops.casimir(), &(id * Complex64::from(j * (j + 1.0)))),
        ];
        worst_dicke = devs.into_iter().fold(worst_dicke, f64::max);
    }
    let mut worst_restriction = 0.0f64;
    for n in 1..=8 {
        let r = crosscheck_dicke_restriction(n).unwrap();
        worst_restriction = worst_restriction
            .max(r.jz_deviation)
            .max(r.jplus_deviation)
            .max(r.jminus_deviation)
            .max(r.isometry_error);
    }
    let elapsed = start.elapsed();
    report(
        3,
        worst_dicke <= 1e-12 && worst_restriction <= 1e-12 && elapsed < Duration::from_secs(10),
        format!(
            "Dicke algebra N<=20 max dev {worst_dicke:e}, restriction N<=8 max dev {worst_restriction:e}, {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_4_effective_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=12);
        let state = random_state(&mut rng, n);
        let pulse = random_pulse(&mut rng, n);
        let params = SystemParams::new(n, rng.gen_range(1.0..100.0), pulse.amplitude).unwrap();
        let h = build_effective_hamiltonian(&params, &pulse)
            .unwrap()
            .into_matrix();
        let via_matrix = expm_hermitian(&h, pulse.duration) * state.amplitudes();
        let closed = evolve_effective(&state, &pulse, &params).unwrap();
        let dev = closed
            .amplitudes()
            .iter()
            .zip(via_matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    report(
        4,
        worst <= 1e-12,
        format!("1000 random pulses, max amplitude dev {worst:e}"),
    );
}

#[test]
fn criterion_5_rwa_validity() {
    let start = Instant::now();
    let target = target_ghz_profile(4).unwrap();
    let base = SystemParams::in_units_of_g(4, 1.0).unwrap();
    let points = rwa_sweep(&target, &base, &[1e2, 1e3, 1e4]).unwrap();
    let fids: Vec<f64> = points.iter().map(|p| p.fidelity).collect();
    let increasing = fids.windows(2).all(|w| w[1] > w[0]);
    let slope = infidelity_slope(&points).unwrap_or(f64::NAN);
    let elapsed = start.elapsed();
    let infid: Vec<String> = fids.iter().map(|f| format!("{:.3e}", 1.0 - f)).collect();
    report(
        5,
        increasing && (1.5..=2.5).contains(&slope) && elapsed < Duration::from_secs(5),
        format!(
            "infidelity at W/g=1e2,1e3,1e4: [{}], log-log slope {slope:.3}",
            infid.join(", ")
        ),
    );
}

#[test]
fn criterion_6_unitarity_and_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_drift = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(1..=12);
        let state = random_state(&mut rng, n);
        let pulse = random_pulse(&mut rng, n);
        let params = SystemParams::new(n, rng.gen_range(1.0..1e3), pulse.amplitude).unwrap();
        let before = state.norm_sqr();
        let after = evolve_full(&state, &pulse, &params).unwrap().norm_sqr();
        worst_drift = worst_drift.max((after - before).abs());
    }
    let mut worst_comm = 0.0f64;
    for n in 1..=8 {
        let full = build_fullspace_collective(n).unwrap();
        let iso = SymmetricIsometry::new(n).unwrap();
        for _ in 0..3 {
            let h = full.hamiltonian(
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..2.0),
                rng.gen_range(0.0..TAU),
                rng.gen_range(-10.0..10.0),
            );
            worst_comm = worst_comm.max(iso.projector_commutator(&h));
        }
    }
    report(
        6,
        worst_drift <= 1e-10 && worst_comm <= 1e-12,
        format!("max norm drift per pulse {worst_drift:e}, max |[H,P]| for N<=8 {worst_comm:e}"),
    );
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_dicke-pulse"))
        .args(args)
        .output()
        .expect("spawn dicke-pulse");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn pipeline(dir: &Path, kind: &str) -> (Vec<u8>, Vec<u8>) {
    let target = dir.join(format!("{kind}.json"));
    let schedule = dir.join(format!("{kind}.schedule.json"));
    let t = target.to_str().unwrap();
    let sch = schedule.to_str().unwrap();
    cli(&["targets", "--kind", kind, "--n", "4", "--output", t]);
    let synth = cli(&["synth", "--target", t, "--w-over-g", "1000"]);
    std::fs::write(&schedule, &synth).unwrap();
    let run = cli(&[
        "run",
        "--schedule",
        sch,
        "--mode",
        "effective",
        "--target",
        t,
    ]);
    (synth, run)
}

#[test]
fn criterion_7_cli_end_to_end() {
    let dir = tempfile::TempDir::new().unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for kind in ["w", "ghz", "uniform"] {
        let (synth_a, run_a) = pipeline(dir.path(), kind);
        let (synth_b, run_b) = pipeline(dir.path(), kind);
        let deterministic = synth_a == synth_b && run_a == run_b;
        let schedule: serde_json::Value = serde_json::from_slice(&synth_a).unwrap();
        let record: serde_json::Value = serde_json::from_slice(&run_a).unwrap();
        let pulses = schedule["pulses"].as_array().unwrap();
        let fid = record["target_fidelity"].as_f64().unwrap();
        let mut this_ok = deterministic && pulses.len() <= 4 && fid >= 1.0 - 1e-10;
        if kind == "w" {
            let angle = pulses
                .first()
                .and_then(|p| p["omega_tau"].as_f64())
                .unwrap_or(0.0);
            this_ok &= pulses.len() == 1 && (angle - FRAC_PI_2).abs() <= 1e-12;
        }
        ok &= this_ok;
        details.push(format!(
            "{kind}: {} pulses, fidelity {fid:.17}",
            pulses.len()
        ));
    }
    report(7, ok, details.join("; "));
}
