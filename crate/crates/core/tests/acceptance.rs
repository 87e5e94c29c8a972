//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maxlab::datum::Datum;
use maxlab::ergodic::{
    candidate_directions, certificate, density_deficiency, dirichlet_l1, eta_hat, search_theta, MollifierSpec,
};
use maxlab::experiment::packing::{packing_check, PackingConclusion};
use maxlab::experiment::{r_sweep_with, run_cli, SweepOptions};
use maxlab::params::{freq_centers, space_lattice_sampler, ExperimentParams};
use maxlab::propagator::{
    galilean_check, lambda_samples, phase_decompose_space, phase_decompose_time, verify_interference,
};

type Outcome = (bool, String);

fn params(sigma: f64, r: f64) -> ExperimentParams<f64> {
    ExperimentParams::new(3, sigma, r).unwrap()
}

fn wide(eps: f64, sigma: f64, r: f64) -> ExperimentParams<f64> {
    let mut p = params(sigma, r);
    p.allow_wide_tolerance = true;
    p.eps = eps;
    p.validate().unwrap();
    p
}

fn in_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
        if v.iter().map(|c| c * c).sum::<f64>() < radius * radius {
            return v;
        }
    }
}

fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v = in_ball(rng, n, 1.0);
    let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter().map(|c| c / len).collect()
}

fn within(t: Duration, limit_s: u64) -> bool {
    t <= Duration::from_secs(limit_s)
}

// 1. phase windows on 10^4 random lattice-form inputs per R
fn phase_windows() -> Outcome {
    let start = Instant::now();
    let mut violations = 0usize;
    let mut worst = [0.0f64; 5];
    for (i, &r) in [256.0, 1024.0, 4096.0].iter().enumerate() {
        let p = params(0.15, r);
        let (rho, eps) = (0.01, 0.01);
        let centers = freq_centers(&p).unwrap();
        let lattice = space_lattice_sampler(&p, 10_000, 100 + i as u64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7 + i as u64);
        let h = r.powf(2.0 * 0.15 - 1.0);
        let jmax = p.time_count() as u64;
        for s in &lattice {
            let l = &centers[rng.random_range(0..centers.len())];
            let v = in_ball(&mut rng, 3, rho);
            let u = in_ball(&mut rng, 3, eps / r);
            let k = rng.random_range(1..=jmax);
            let sp = phase_decompose_space(&s.m, &u, l, &v, &p).unwrap();
            let tp = phase_decompose_time(h * k as f64, l, &v, &p).unwrap();
            let ratios = [
                sp.i2.abs() / (2.0 * rho),
                sp.i3.abs() / eps,
                sp.i4.abs() / (rho * eps / r),
                tp.ii2.abs() / (rho * rho / r),
                tp.ii3.abs() / (2.0 * rho),
            ];
            for (w, q) in worst.iter_mut().zip(ratios) {
                *w = w.max(q);
            }
            let ok = ratios[0] < 1.0 && ratios[1] < 1.0 && ratios[2] < 1.0 && ratios[3] < 1.0 && ratios[4] <= 1.0;
            if !ok {
                violations += 1;
            }
        }
    }
    let t = start.elapsed();
    (
        violations == 0 && within(t, 60),
        format!(
            "30000 inputs, {violations} violations, worst |term|/bound = {:.3?}, {:.1?}",
            worst, t
        ),
    )
}

// 2. interference floor at R = 256
fn interference_floor() -> Outcome {
    let start = Instant::now();
    let p = params(0.15, 256.0);
    let d = Datum::build(&p, None).unwrap();
    let xs = lambda_samples(&p, 1000, 11, true).unwrap();
    let rep = verify_interference(&d, &xs, 0.01).unwrap();
    let t = start.elapsed();
    (
        rep.min_ratio >= 0.809 - 0.01 && rep.evaluations >= 1000 * p.time_count() && within(t, 300),
        format!(
            "min |u|/sqrt|Omega| = {:.6} over {} evaluations, {:.1?}",
            rep.min_ratio, rep.evaluations, t
        ),
    )
}

// 3. Galilean identity over 10^3 random (x, t, theta)
fn galilean() -> Outcome {
    let p = params(0.15, 256.0);
    let plain = Datum::build(&p, None).unwrap();
    let scale = plain.omega_measure().sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let th = unit(&mut rng, 3);
        let x = in_ball(&mut rng, 3, 1.0);
        let t = rng.random_range(0.0..1.0);
        let dt = Datum::build(&p, Some(&th)).unwrap();
        worst = worst.max(galilean_check(&dt, &plain, &x, t).unwrap());
    }
    (
        worst <= 1e-9 * scale,
        format!("max discrepancy {:.3e} = {:.3e} sqrt|Omega|", worst, worst / scale),
    )
}

// 4. Dirichlet L1 norms
fn dirichlet() -> Outcome {
    let start = Instant::now();
    let one = dirichlet_l1::<f64>(1);
    let two = dirichlet_l1::<f64>(2);
    let pts: Vec<(f64, f64)> = (4..=14)
        .map(|j| ((1u64 << j) as f64).ln())
        .zip((4..=14).map(|j| dirichlet_l1::<f64>(1 << j)))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let reference = 4.0 / (PI * PI);
    let t = start.elapsed();
    (
        one == 1.0 && (two - 4.0 / PI).abs() < 1e-5 && (slope - reference).abs() < 0.1 * reference && within(t, 60),
        format!(
            "L(1) = {one}, |L(2) - 4/pi| = {:.2e}, slope {:.6} vs 4/pi^2 = {:.6}, {:.1?}",
            (two - 4.0 / PI).abs(),
            slope,
            reference,
            t
        ),
    )
}

// 5. closed-form eta_R^ against the defining sum
fn eta_oracle() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for &(sigma, r) in &[(0.15, 256.0), (0.15, 128.0), (0.1, 160.0), (0.12, 100.0)] {
        let p = params(sigma, r);
        assert!(r.powf(1.0 - 2.0 * sigma) <= 64.0);
        let spec = MollifierSpec::new(&p, None).unwrap();
        let rs = r.powf(sigma);
        let jj = p.time_count();
        let m = spec.order as i32;
        let knot = p.eps / m as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..250 {
            let tau = if i % 10 == 0 {
                // on or next to a removable point R^sigma tau in Z
                (rng.random_range(-200..200) as f64) / rs + [0.0, 1e-10, -1e-7][i % 3]
            } else {
                rng.random_range(-100.0..100.0)
            };
            let arg = PI * knot * tau / rs;
            let psi_hat = if arg == 0.0 { 1.0 } else { (arg.sin() / arg).powi(m) };
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 1..=jj {
                sum += Complex64::from_polar(1.0, -2.0 * PI * j as f64 * rs * tau);
            }
            let direct = sum * r.powf(2.0 * sigma - 1.0) * psi_hat;
            worst = worst.max((eta_hat(tau, &p, &spec) - direct).norm());
            count += 1;
        }
    }
    (worst < 1e-10, format!("{count} values of tau, max |closed - direct| = {worst:.3e}"))
}

// 6. density trend along R and failure of the axis direction
fn density_trend() -> Outcome {
    let start = Instant::now();
    let mut best = Vec::new();
    let mut axis_fails = true;
    for &r in &[1024.0, 4096.0, 16384.0] {
        let mut p = params(0.15, r);
        p.sample_count = 10_000;
        let w = search_theta(&p, 256, 1).unwrap();
        best.push(w.worst_deficiency);
        let axis = density_deficiency(&[1.0, 0.0, 0.0], &p, 10_000, 1).unwrap();
        axis_fails &= !axis.passed;
    }
    let decreasing = best.windows(2).all(|w| w[1] < w[0]);
    let t = start.elapsed();
    (
        decreasing && axis_fails && within(t, 600),
        format!(
            "best worst_deficiency {:.4?} at R = 2^10, 2^12, 2^14; e1 fails everywhere: {axis_fails}; {:.1?}",
            best, t
        ),
    )
}

// 7. positive certificate margin implies an empty violation set
fn certificate_soundness() -> Outcome {
    let start = Instant::now();
    let mut cases: Vec<(ExperimentParams<f64>, Vec<f64>)> = Vec::new();
    let dirs = candidate_directions::<f64>(3, 8, 1);
    for p in [wide(0.9, 0.02, 4096.0), wide(0.3, 0.02, 65536.0), wide(0.5, 0.01, 65536.0)] {
        cases.push((p, dirs[0].clone()));
    }
    cases.push((wide(0.9, 0.02, 4096.0), dirs[1].clone()));
    cases.push((wide(0.9, 0.02, 4096.0), vec![1.0, 0.0, 0.0]));
    cases.push((params(0.15, 4096.0), dirs[0].clone()));
    let mut positive = 0;
    let mut bad = 0;
    let mut notes = Vec::new();
    for (p, th) in &cases {
        let spec = MollifierSpec::new(p, None).unwrap();
        let rep = certificate(th, p, None, &spec).unwrap();
        if rep.margin > 0.0 {
            positive += 1;
            let w = density_deficiency(th, p, 100_000, 9).unwrap();
            if w.violations > 0 {
                bad += 1;
            }
            notes.push(format!(
                "eps={} R={}: margin {:.3e}, {} violations",
                p.eps, p.r, rep.margin, w.violations
            ));
        } else {
            notes.push(format!("eps={} R={}: margin {:.3e} (no claim)", p.eps, p.r, rep.margin));
        }
    }
    let t = start.elapsed();
    (
        bad == 0,
        format!("{positive} certified cases, {bad} with violations; {}; {:.1?}", notes.join("; "), t),
    )
}

// 8. fitted exponent of the sweep and leave-one-out stability
fn scaling_fit() -> Outcome {
    let start = Instant::now();
    let mut p = params(0.15, 256.0);
    p.sample_count = 8000;
    let opts = SweepOptions {
        search_budget: 256,
        space_samples: 8000,
    };
    let rep = r_sweep_with(&p, &[256.0, 1024.0, 4096.0], &opts).unwrap();
    let t = start.elapsed();
    let ok_rows = rep.rows.iter().all(|r| r.error.is_none());
    (
        ok_rows && rep.fitted_exponent >= 0.175 && rep.leave_one_out_max_change < 0.05 && within(t, 1800),
        format!(
            "fitted {:.4} +- {:.4} (need >= 0.175, predicted {:.3}), leave-one-out change {:.4}, {:.1?}",
            rep.fitted_exponent, rep.fitted_std_error, rep.predicted, rep.leave_one_out_max_change, t
        ),
    )
}

// 9. packing conclusion against the sign of 1 - (n+2) sigma
fn packing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut sigmas: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..0.5)).filter(|&s| s > 0.0).collect();
    sigmas.push(1.0 / 5.0);
    let rs = [256.0, 1024.0, 4096.0];
    let mut mismatches = 0;
    for &s in &sigmas {
        let rep = packing_check(3, s, &rs).unwrap();
        let e = 1.0 - 5.0 * s;
        let expected = if e.abs() < 1e-12 {
            PackingConclusion::Borderline
        } else if e < 0.0 {
            PackingConclusion::Vanishes
        } else {
            PackingConclusion::Survives
        };
        let v: Vec<f64> = rep.rows.iter().map(|r| r.neighborhood_volume_bound).collect();
        let trend_ok = match expected {
            PackingConclusion::Vanishes => v.windows(2).all(|w| w[1] < w[0]),
            PackingConclusion::Survives => v.windows(2).all(|w| w[1] > w[0]),
            PackingConclusion::Borderline => v.windows(2).all(|w| ((w[1] - w[0]) / w[0]).abs() < 1e-9),
        };
        if rep.conclusion != expected || !trend_ok {
            mismatches += 1;
        }
    }
    let border = packing_check(3, 1.0 / 5.0, &rs).unwrap().conclusion;
    (
        mismatches == 0 && border == PackingConclusion::Borderline,
        format!("{} values of sigma, {mismatches} mismatches, sigma = 1/5 -> {border:?}", sigmas.len()),
    )
}

// 10. byte-identical CSV at 1 and 8 threads, two runs each
fn reproducibility() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let configs: [(&str, &str, &str); 6] = [
        ("interfere", r#"{"sample_count": 100, "seed": 4}"#, "interfere.csv"),
        ("density", r#"{"R": 4096, "sample_count": 2000, "candidate_count": 16}"#, "density.csv"),
        (
            "certify",
            r#"{"sigma": 0.02, "R": 4096, "eps": 0.9, "allow_wide_tolerance": true, "truncation": 60, "sample_count": 5000}"#,
            "certify.csv",
        ),
        ("dirichlet", "{}", "dirichlet.csv"),
        (
            "sweep",
            r#"{"R_list": [64, 256, 1024], "sample_count": 300, "search_budget": 8}"#,
            "sweep.csv",
        ),
        ("packing", r#"{"sigma": 0.25}"#, "packing.csv"),
    ];
    let mut differing = Vec::new();
    for (cmd, cfg, csv) in configs {
        let cfg_path = root.path().join(format!("{cmd}.json"));
        std::fs::write(&cfg_path, cfg).unwrap();
        let mut outputs = Vec::new();
        for (run, threads) in ["1", "8", "1", "8"].iter().enumerate() {
            let out = root.path().join(format!("{cmd}-{run}"));
            let mut argv = vec![
                "maxlab".to_string(),
                cmd.to_string(),
                "--out".into(),
                out.display().to_string(),
                "--threads".into(),
                threads.to_string(),
            ];
            if cmd == "dirichlet" {
                argv.extend(["--nmax".to_string(), "4096".to_string()]);
            } else {
                argv.extend(["--config".to_string(), cfg_path.display().to_string()]);
            }
            let code = run_cli(argv);
            if code != 0 {
                differing.push(format!("{cmd} exited {code}"));
            }
            outputs.push(std::fs::read(out.join(csv)).unwrap_or_default());
        }
        if outputs.iter().any(|o| o != &outputs[0] || o.is_empty()) {
            differing.push(cmd.to_string());
        }
    }
    (
        differing.is_empty(),
        format!("6 subcommands x 4 runs (1/8/1/8 threads); differing: {differing:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("phase windows", phase_windows),
        ("interference floor", interference_floor),
        ("galilean identity", galilean),
        ("dirichlet L1", dirichlet),
        ("eta closed form", eta_oracle),
        ("density trend", density_trend),
        ("certificate soundness", certificate_soundness),
        ("scaling fit", scaling_fit),
        ("packing remark", packing),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<22} {}  {}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
