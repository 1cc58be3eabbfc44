//! Acceptance suite. Each test prints one `PASS`/`FAIL` line.
//!
//! `cargo test -p quatlink-cli --test acceptance -- --nocapture`

use std::fs;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use quatlink::adjoint::solve_via_adjoint;
use quatlink::channel::{add_noise, gen_random_channel, mean_power, noise_variance_for_snr};
use quatlink::harness::{run_experiment, summarize, ExperimentConfig, ExperimentResult, Mode, Summary};
use quatlink::linalg::{solve, QMatrix};
use quatlink::modem::{constellation, demodulate, modulate};
use quatlink::wiener::{estimate_statistics, orthogonality_residual, solve_wiener};
use quatlink::{Quaternion, SeededRng};
use quatlink_cli::write_outputs;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} {name}: {detail}");
}

fn rq(rng: &mut SeededRng) -> Quaternion {
    Quaternion::new(rng.standard_normal(), rng.standard_normal(), rng.standard_normal(), rng.standard_normal())
}

fn rel(a: Quaternion, b: Quaternion) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

#[test]
fn c1_algebra() {
    let start = Instant::now();
    let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    // (sign, index) of e_a * e_b for the basis 1, i, j, k.
    let table = [
        [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
        [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
        [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
        [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
    ];
    let mut table_ok = true;
    for a in 0..4 {
        for b in 0..4 {
            let (s, k) = table[a][b];
            table_ok &= basis[a] * basis[b] == basis[k] * s;
        }
    }

    let mut rng = SeededRng::new(0xA1);
    let draws = 10_000;
    let mut worst = 0.0_f64;
    for _ in 0..draws {
        let (p, q, r) = (rq(&mut rng), rq(&mut rng), rq(&mut rng));
        worst = worst
            .max(rel((p * q) * r, p * (q * r)))
            .max(rel(p * (q + r), p * q + p * r))
            .max(rel((q + r) * p, q * p + r * p))
            .max(rel((p * q).conj(), q.conj() * p.conj()))
            .max(((p * q).norm() - p.norm() * q.norm()).abs() / (p.norm() * q.norm()));
    }
    let elapsed = start.elapsed();
    report(
        1,
        "algebra",
        table_ok && worst <= 1e-12 && elapsed < Duration::from_secs(5),
        format!("table {}, worst rel err {worst:.2e} over {draws} draws, {}", if table_ok { "exact" } else { "wrong" }, secs(elapsed)),
    );
}

#[test]
fn c2_solver_vs_adjoint() {
    let start = Instant::now();
    let mut rng = SeededRng::new(0xA2);
    let mut worst = 0.0_f64;
    let mut systems = 0;
    for round in 0..8 {
        for n in 1..=16 {
            let a = QMatrix::from_fn(n, n, |r, c| {
                let q = rq(&mut rng);
                if r == c && round % 2 == 0 { q + Quaternion::from_real(n as f64) } else { q }
            });
            let b: Vec<_> = (0..n).map(|_| rq(&mut rng)).collect();
            let x = solve(&a, &b).expect("nonsingular");
            let y = solve_via_adjoint(&a, &b).expect("nonsingular");
            let diff = x.sub(&y).unwrap().norm() / y.norm();
            worst = worst.max(diff);
            systems += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        2,
        "solver oracle",
        systems >= 100 && worst <= 1e-10 && elapsed < Duration::from_secs(10),
        format!("{systems} systems n=1..16, worst rel diff {worst:.2e}, {}", secs(elapsed)),
    );
}

#[test]
fn c3_wiener() {
    let mut rng = SeededRng::new(0xA3);
    let symbols: Vec<Quaternion> = rng.symbols(4000).into_iter().map(Quaternion::from).collect();
    let (len, delay) = (15, 7);
    let problem = estimate_statistics(&symbols, &symbols, len, delay).unwrap();
    let w = solve_wiener(&problem, 0.0).unwrap();
    let impulse_err = w
        .iter()
        .enumerate()
        .map(|(l, q)| (*q - if l == delay { Quaternion::ONE } else { Quaternion::ZERO }).norm())
        .fold(0.0, f64::max);

    let mut worst_ratio = 0.0_f64;
    for inst in 0..10 {
        let mut crng = SeededRng::derive(0xA3, inst, 0);
        let channel = gen_random_channel(&mut crng, 4, true).unwrap();
        let mut x = quatlink::channel::convolve(&symbols, &channel.taps).unwrap();
        add_noise(&mut x, 0.01, &mut crng).unwrap();
        let problem = estimate_statistics(&x, &symbols, len, delay).unwrap();
        let w = solve_wiener(&problem, 0.0).unwrap();
        let res = orthogonality_residual(&w, &[&x], &symbols, len, delay).unwrap();
        let norm = res.iter().map(|q| q.norm_sq()).sum::<f64>().sqrt();
        worst_ratio = worst_ratio.max(norm / mean_power(&x));
    }
    report(
        3,
        "wiener",
        impulse_err <= 1e-9 && worst_ratio < 1e-8,
        format!("impulse max err {impulse_err:.2e}, worst orthogonality residual / power {worst_ratio:.2e}"),
    );
}

struct Paper {
    result: ExperimentResult,
    summary: Summary,
    elapsed: Duration,
}

fn paper_siso() -> &'static Paper {
    static CELL: OnceLock<Paper> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let result = run_experiment(&ExperimentConfig::default()).expect("paper configuration runs");
        let summary = summarize(&result.streams).unwrap();
        Paper { result, summary, elapsed: start.elapsed() }
    })
}

#[test]
fn c4_paper_steady_state() {
    let p = paper_siso();
    let s = &p.summary.streams[0];
    let in_band = (-14.0..=-10.0).contains(&s.steady_state_db);
    report(
        4,
        "paper steady state",
        in_band && p.elapsed < Duration::from_secs(120),
        format!(
            "steady state {:.2} dB (band [-14, -10]), Wiener {:.2} dB, {} diverged, {}",
            s.steady_state_db,
            s.wiener_mse_db,
            s.runs_diverged,
            secs(p.elapsed)
        ),
    );
}

#[test]
fn c5_qlms_tracks_wiener() {
    let p = paper_siso();
    let mut worst = 0.0_f64;
    let mut checked = 0;
    for run in &p.result.runs {
        let s = &run.streams[0];
        if let Some(q) = s.qlms_final_quarter_db {
            worst = worst.max((q - s.wiener_mse_db).abs());
            checked += 1;
        }
    }
    report(
        5,
        "qlms vs wiener",
        checked > 0 && worst <= 3.0,
        format!("{checked} runs, worst |QLMS - Wiener| {worst:.2} dB"),
    );
}

#[test]
fn c6_mimo() {
    let cfg = ExperimentConfig { mode: Mode::Mimo, ..Default::default() };
    let start = Instant::now();
    let result = run_experiment(&cfg).expect("mimo configuration runs");
    let summary = summarize(&result.streams).unwrap();
    let elapsed = start.elapsed();
    let pass = summary.streams.iter().all(|s| s.steady_state_db <= -8.0 && s.ser < 0.01) && elapsed < Duration::from_secs(240);
    let detail: Vec<String> = summary
        .streams
        .iter()
        .enumerate()
        .map(|(k, s)| format!("stream{k} {:.2} dB SER {:.2}%", s.steady_state_db, 100.0 * s.ser))
        .collect();
    report(6, "mimo", pass, format!("{}, {}", detail.join(", "), secs(elapsed)));
}

#[test]
fn c7_determinism() {
    let mut identical = true;
    for mode in [Mode::Siso, Mode::Mimo] {
        let cfg = ExperimentConfig { mode, num_runs: 40, master_seed: 2024, ..Default::default() };
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        let mut files = Vec::new();
        for (i, dir) in dirs.iter().enumerate() {
            let result = run_experiment(&cfg).unwrap();
            let summary = summarize(&result.streams).unwrap();
            files.push(write_outputs(&result, &summary, dir.path(), i as u64).unwrap());
        }
        for (a, b) in files[0].iter().zip(&files[1]) {
            if a.file_name().unwrap() == "manifest.txt" {
                continue;
            }
            identical &= fs::read(a).unwrap() == fs::read(b).unwrap();
        }
    }
    report(7, "determinism", identical, "siso and mimo csv + summary compared byte for byte".into());
}

#[test]
fn c8_modem() {
    let mut round_trip = true;
    for s in constellation() {
        round_trip &= demodulate(s.value()) == s && modulate(s.bits()) == s;
    }
    let mut rng = SeededRng::new(0xA8);
    let points = 100_000;
    let mut mismatches = 0;
    for _ in 0..points {
        let q = rng.symbol().value() + rq(&mut rng).scale(0.8);
        let nearest = constellation()
            .into_iter()
            .min_by(|a, b| (a.value() - q).norm_sq().total_cmp(&(b.value() - q).norm_sq()))
            .unwrap();
        mismatches += usize::from(demodulate(q) != nearest);
    }
    report(
        8,
        "modem",
        round_trip && mismatches == 0,
        format!("round trip {}, {mismatches} oracle mismatches over {points} points", if round_trip { "ok" } else { "broken" }),
    );
}

#[test]
fn c9_snr_calibration() {
    let n = 100_000;
    let mut worst = 0.0_f64;
    let mut measured = Vec::new();
    for (i, snr) in [0.0, 10.0, 20.0, 30.0].into_iter().enumerate() {
        let mut rng = SeededRng::derive(0xA9, i as u64, 0);
        let channel = gen_random_channel(&mut rng, 4, true).unwrap();
        let tx: Vec<Quaternion> = rng.symbols(n).into_iter().map(Quaternion::from).collect();
        let clean = quatlink::channel::convolve(&tx, &channel.taps).unwrap();
        let var = noise_variance_for_snr(mean_power(&clean), snr).unwrap();
        let mut noisy = clean.clone();
        add_noise(&mut noisy, var, &mut rng).unwrap();
        let noise: Vec<Quaternion> = noisy.iter().zip(&clean).map(|(a, b)| *a - *b).collect();
        let got = 10.0 * (mean_power(&clean) / mean_power(&noise)).log10();
        worst = worst.max((got - snr).abs());
        measured.push(format!("{snr:.0}->{got:.2}"));
    }
    report(9, "snr calibration", worst <= 0.3, format!("{} dB, worst deviation {worst:.3} dB", measured.join(", ")));
}
