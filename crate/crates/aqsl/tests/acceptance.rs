//! Acceptance gate: one test per criterion, each printing a pass/fail line.
//! All criteria run on one core in seconds to low minutes.

use std::process::Command;
use std::time::Instant;

use aqsl::channels::{evolve_bell_diagonal, ou_f, OuParams};
use aqsl::config::{ExperimentConfig, ModeChoice, SweepKind};
use aqsl::correlations::{affinity_discord_closed, affinity_discord_oracle};
use aqsl::qsl::{lambda_averages, sqrt_rate};
use aqsl::runner::{dynamics_csv, dynamics_rows, qsl_rows};
use aqsl::states::{bell_diagonal, bell_phi_plus, BellDiagonalParams, StateSampler};
use aqsl::verify;

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn report(criterion: u32, ok: bool, what: &str) {
    println!("criterion {criterion} {}: {what}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {what}");
}

#[test]
fn criterion_1_bell_state_discord() {
    let rho = bell_phi_plus();
    // warm-up, then time the call itself
    let _ = affinity_discord_closed(&rho).unwrap();
    let start = Instant::now();
    let d = affinity_discord_closed(&rho).unwrap().value;
    let elapsed = start.elapsed();
    let ok = (d - (1.0 - INV_SQRT2)).abs() < 1e-9 && elapsed.as_micros() < 1000;
    report(1, ok, &format!("Bell-state discord {d:.12} in {elapsed:?}"));
}

#[test]
fn criterion_2_oracle_equivalence() {
    let start = Instant::now();
    let mut s = StateSampler::new(7);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let rho = s.random_mixed((2, 2), 4);
        let closed = affinity_discord_closed(&rho).unwrap().value;
        let (oracle, _) = affinity_discord_oracle(&rho, 2000, 40).unwrap();
        worst = worst.max((closed - oracle).abs());
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-4 && elapsed.as_secs() < 60;
    report(2, ok, &format!("closed vs oracle worst {worst:.3e} over 200 states in {elapsed:?}"));
}

#[test]
fn criterion_3_property_suite() {
    let (ancilla_affinity, ancilla_hs) = verify::suite_local_ancilla(7);
    let results = [
        verify::suite_zero_discord(7),
        verify::suite_local_unitary_invariance(7),
        ancilla_affinity,
        ancilla_hs,
        verify::suite_pure_state_formula(7),
    ];
    let ok = results.iter().all(|r| r.passed());
    let detail: Vec<String> =
        results.iter().map(|r| format!("{} worst {:.3e}", r.name, r.worst_residual)).collect();
    report(3, ok, &detail.join("; "));
}

#[test]
fn criterion_4_channel_correctness() {
    let r = verify::suite_channel(7);
    let f0 = ou_f(0.0, OuParams::new(1.0, 1.0).unwrap()).unwrap();
    let ok = r.passed() && f0 == 0.0;
    report(4, ok, &format!("{} worst {:.3e}, f(0) = {f0}", r.name, r.worst_residual));
}

#[test]
fn criterion_5_fig1_reproduction() {
    let cases: [((f64, f64, f64), &str); 3] = [
        ((1.0, 1.0, -1.0), "fig1_1_1_-1.csv"),
        ((1.0, -1.0, 1.0), "fig1_1_-1_1.csv"),
        ((1.0, 0.5, -0.5), "fig1_1_0.5_-0.5.csv"),
    ];
    let mut sudden_death = false;
    for (initial_c, fixture) in cases {
        let cfg = ExperimentConfig { initial_c, ..Default::default() };
        let rows = dynamics_rows(&cfg).unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].concurrence <= w[0].concurrence + 1e-9
                    && w[1].affinity_discord <= w[0].affinity_discord + 1e-9
                    && w[1].hs_discord <= w[0].hs_discord + 1e-9,
                "non-monotone measure for {initial_c:?} at t = {}",
                w[1].t
            );
        }
        sudden_death |= rows.iter().any(|r| r.concurrence == 0.0 && r.affinity_discord > 1e-3);
        let path = format!("{}/tests/fixtures/{fixture}", env!("CARGO_MANIFEST_DIR"));
        let committed = std::fs::read_to_string(&path).unwrap();
        assert_eq!(dynamics_csv(&rows), committed, "fixture drift: {fixture}");
    }
    report(5, sudden_death, "monotone decay + fixtures match + sudden death with live discord");
}

#[test]
fn criterion_6_fig2_reproduction() {
    // bound validity over a time sweep
    let time_cfg = ExperimentConfig { steps: 25, ..Default::default() };
    let time_rows = qsl_rows(&time_cfg).unwrap();
    let bound_ok =
        time_rows.iter().all(|r| r.profile.tau_qc <= r.x * 1.02 && r.profile.tau_qc > 0.0);
    // tau_qc decreasing in the coupling strength at fixed driving time
    let coupling_cfg = ExperimentConfig {
        sweep: SweepKind::Coupling,
        mode: ModeChoice::Decay,
        ..Default::default()
    };
    let coupling_rows = qsl_rows(&coupling_cfg).unwrap();
    let mono_ok = coupling_rows.windows(2).all(|w| {
        w[1].profile.tau_qc <= w[0].profile.tau_qc * 1.02
            && w[1].profile.tau_qc <= w[0].profile.tau_qc + 1e-9
    });
    let ok = bound_ok && mono_ok && coupling_rows.len() == 20;
    report(
        6,
        ok,
        &format!(
            "tau_qc <= tau on {} time points; decreasing over {} couplings",
            time_rows.len(),
            coupling_rows.len()
        ),
    );
}

#[test]
fn criterion_7_numerical_analysis() {
    let p = OuParams::new(1.0, 1.0).unwrap();
    let c0 = BellDiagonalParams::new(0.5, 0.5, -0.5).unwrap();
    let traj = move |t: f64| bell_diagonal(evolve_bell_diagonal(c0, t, p).unwrap()).unwrap();
    // second-order stencil: error ratio ~4 under h halving
    let reference = sqrt_rate(&traj, 1.0, 1e-6, (0.0, 5.0)).unwrap().0;
    let err =
        |h: f64| sqrt_rate(&traj, 1.0, h, (0.0, 5.0)).unwrap().0.sub(&reference).hs_norm();
    let ratio = err(1e-2) / err(5e-3);
    let stencil_ok = ratio > 3.5 && ratio < 4.5;
    // quadrature stability under step doubling
    let coarse = lambda_averages(&traj, 2.0, 200, 1e-5).unwrap();
    let fine = lambda_averages(&traj, 2.0, 400, 1e-5).unwrap();
    let quad_drift = (coarse.0 - fine.0)
        .abs()
        .max((coarse.1 - fine.1).abs())
        .max((coarse.2 - fine.2).abs());
    let norms = verify::suite_norm_ordering(7);
    let ok = stencil_ok && quad_drift <= 1e-4 && norms.passed();
    report(
        7,
        ok,
        &format!(
            "stencil ratio {ratio:.2}, quadrature drift {quad_drift:.3e}, norm ordering worst {:.3e}",
            norms.worst_residual
        ),
    );
}

fn run_cli(args: &[&str]) -> (Vec<u8>, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_aqsl")).args(args).output().unwrap();
    (out.stdout, out.status.success())
}

#[test]
fn criterion_8_determinism() {
    let dir = std::env::temp_dir();
    let mut ok = true;
    for (cmd, extra) in [
        ("dynamics", vec!["--steps", "20"]),
        ("qsl", vec!["--steps", "5", "--t-max", "2"]),
        ("qsl", vec!["--sweep", "coupling", "--coupling-n", "4", "--t-max", "2"]),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.join(format!("aqsl_det_{cmd}_{}_{run}.csv", extra.join("")));
            let mut args = vec![cmd];
            args.extend(extra.iter().copied());
            let p = path.to_str().unwrap().to_string();
            args.extend(["--seed", "7", "--out", &p]);
            let (_, success) = run_cli(&args);
            ok &= success;
            outputs.push(std::fs::read(&path).unwrap());
            std::fs::remove_file(&path).ok();
        }
        ok &= outputs[0] == outputs[1] && !outputs[0].is_empty();
    }
    let (v1, s1) = run_cli(&["verify", "--seed", "7"]);
    let (v2, s2) = run_cli(&["verify", "--seed", "7"]);
    ok &= s1 && s2 && v1 == v2 && !v1.is_empty();
    report(8, ok, "byte-identical verify, dynamics and qsl output across repeated runs");
}
