//! Acceptance suite: one test per release criterion, each printing a
//! PASS/SKIP line (visible with `--nocapture`).
//!
//! Criteria 3 and 4 have an optional branch that exercises the Online News
//! Popularity dataset; point `BLRS_UCI_CSV` at the raw CSV to enable it.
//! Non-numeric columns and the `timedelta` column are stripped before
//! fitting, the target column is `shares` (override with `BLRS_UCI_TARGET`).

mod common;

use std::time::Instant;

use blrs_core::*;
use common::*;
use nalgebra::{DMatrix, DVector};

const SEEDS: std::ops::Range<u64> = 0..10;

fn sweep_all_datasets() -> Vec<(String, Precompute, DesignMatrix, Vec<FitResult>)> {
    let mut out = Vec::new();
    for seed in SEEDS {
        let (pre, phi) = synthetic_problem(seed);
        let fits = fit_sweep(&pre, &phi);
        out.push((format!("synthetic seed {seed}"), pre, phi, fits));
    }
    let (pre, phi) = hand_problem();
    let fits = fit_sweep(&pre, &phi);
    out.push(("2x2 hand case".into(), pre, phi, fits));
    out
}

#[test]
fn criterion_1_nu_invariant_fixed_point() {
    let start = Instant::now();
    for (label, pre, _, fits) in sweep_all_datasets() {
        for fit in &fits {
            assert!(
                fit.converged,
                "{label}: fit at nu={} did not converge",
                fit.hyperparams.nu
            );
        }
        for a in &fits {
            for b in &fits {
                assert!(
                    rel_diff(a.hyperparams.alpha, b.hyperparams.alpha) < 1e-5,
                    "{label}: alpha differs between nu={} and nu={}",
                    a.hyperparams.nu,
                    b.hyperparams.nu
                );
                assert!(
                    rel_diff(a.hyperparams.beta, b.hyperparams.beta) < 1e-5,
                    "{label}: beta differs between nu={} and nu={}",
                    a.hyperparams.nu,
                    b.hyperparams.nu
                );
            }
        }
        let sp = project_spectrum(&pre);
        if label == "2x2 hand case" {
            // the reduced likelihood is exactly flat here: every (alpha, beta)
            // with 1/alpha + 1/beta = 1 is optimal, and the solver must say so
            assert!(matches!(
                ml_solve(&sp, pre.n_obs),
                Err(Error::Degenerate(_))
            ));
            // the EM fixed point still sits on the optimal ridge: beta matches
            // the stationary value at its own gamma
            let fit = &fits[0];
            let gamma = fit.hyperparams.beta / fit.hyperparams.alpha;
            let beta_star = beta_from_gamma(&sp, pre.n_obs, gamma).unwrap();
            assert!(rel_diff(fit.hyperparams.beta, beta_star) < 1e-5);
        } else {
            let sol = ml_solve(&sp, pre.n_obs).expect("solvable instance");
            for fit in &fits {
                assert!(
                    rel_diff(fit.hyperparams.alpha, sol.alpha) < 1e-4,
                    "{label}: alpha {} vs oracle {}",
                    fit.hyperparams.alpha,
                    sol.alpha
                );
                assert!(
                    rel_diff(fit.hyperparams.beta, sol.beta) < 1e-4,
                    "{label}: beta {} vs oracle {}",
                    fit.hyperparams.beta,
                    sol.beta
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "took {elapsed:?}, budget is 10 s"
    );
    println!("criterion 1 (nu-invariant fixed point, desk scale): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_evidence_ascent() {
    for (label, _, _, fits) in sweep_all_datasets() {
        for fit in &fits {
            assert_evidence_ascent(fit, &label);
        }
    }
    println!("criterion 2 (evidence ascent): PASS");
}

#[test]
fn criterion_3_convergence_speedup() {
    let mut strict = 0;
    for seed in SEEDS {
        let (pre, phi) = synthetic_problem(seed);
        let fits = fit_sweep(&pre, &phi);
        let cnt_small = fits[0].iterations; // nu = 1e-8
        let cnt_inf = fits[5].iterations; // nu = inf
        assert!(
            cnt_small <= cnt_inf,
            "seed {seed}: cnt({}) = {cnt_small} > cnt(inf) = {cnt_inf}",
            SWEEP_NUS[0].value()
        );
        if cnt_small < cnt_inf {
            strict += 1;
        }
    }
    assert!(strict >= 8, "strict speedup on only {strict}/10 datasets");
    match uci_problem() {
        Some(uci) => {
            for (trial, pre, phi) in uci_folds(&uci, 5, 42) {
                let small = fit_qem(&pre, &phi, Nu::Finite(1e-8), &FitConfig::default()).unwrap();
                let inf = fit_qem(&pre, &phi, Nu::Infinite, &FitConfig::default()).unwrap();
                assert!(small.converged && inf.converged, "trial {trial} did not converge");
                assert!(
                    small.iterations < inf.iterations,
                    "trial {trial}: {} vs {}",
                    small.iterations,
                    inf.iterations
                );
                let speedup =
                    100.0 * (inf.iterations - small.iterations) as f64 / inf.iterations as f64;
                assert!(speedup >= 10.0, "trial {trial}: speedup {speedup:.1}% below 10%");
            }
            println!("criterion 3 (convergence speedup): PASS, strict on {strict}/10 + news dataset");
        }
        None => println!(
            "criterion 3 (convergence speedup): PASS, strict on {strict}/10 (news dataset check skipped; set BLRS_UCI_CSV to enable)"
        ),
    }
}

#[test]
fn criterion_4_news_popularity_magnitudes() {
    let Some(uci) = uci_problem() else {
        println!(
            "criterion 4 (news-popularity magnitudes): SKIPPED — set BLRS_UCI_CSV to the raw dataset CSV"
        );
        return;
    };
    for (trial, pre, phi) in uci_folds(&uci, 5, 42) {
        let start = Instant::now();
        let fit = fit_qem(&pre, &phi, Nu::Infinite, &FitConfig::default()).unwrap();
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs_f64() < 60.0,
            "trial {trial} took {elapsed:?}"
        );
        assert!(fit.converged, "trial {trial} did not converge");
        let (alpha, beta) = (fit.hyperparams.alpha, fit.hyperparams.beta);
        assert!(
            (1e11..=1e13).contains(&alpha),
            "trial {trial}: alpha = {alpha:.6e}"
        );
        assert!(
            (1e7..=1e9).contains(&beta),
            "trial {trial}: beta = {beta:.6e}"
        );
        println!(
            "  trial {trial}: alpha={alpha:.6e} beta={beta:.6e} cnt={}",
            fit.iterations
        );
    }
    println!("criterion 4 (news-popularity magnitudes): PASS");
}

#[test]
fn criterion_5_dense_vs_spectral_equivalence() {
    let mut r = rng(5050);
    for case in 0..100 {
        let rows = 2 + (case * 7) % 49;
        let cols = 1 + (case * 3) % 8;
        let phi = DesignMatrix {
            phi: random_matrix(&mut r, rows, cols),
            basis: Basis::Identity,
        };
        let y = random_vector(&mut r, rows);
        let pre = precompute(&phi, &y).unwrap();
        let alpha = 10f64.powf(-2.0 + 4.0 * (case as f64 / 99.0));
        let beta = 10f64.powf(2.0 - 4.0 * (case as f64 / 99.0));
        let nu = match case % 4 {
            0 => Nu::Finite(0.5 + case as f64),
            1 => Nu::Finite(1e-4),
            2 => Nu::Finite(1e3),
            _ => Nu::Infinite,
        };

        let mu = posterior_mean(&pre, alpha, beta);
        let yby = quad_form_yby(&pre, &mu, beta).unwrap();
        let (_, tr_c, tr_ppc) = posterior_cov_traces(&pre, nu, alpha, beta, yby);
        let le = log_evidence(&pre, nu, alpha, beta);

        let (mu_d, _, c_d) = posterior_dense(&pre, &phi, nu, alpha, beta).unwrap();
        let gram = phi.phi.tr_mul(&phi.phi);
        assert!(
            (&mu - &mu_d).norm() <= 1e-8 * mu_d.norm().max(1e-12),
            "case {case}: posterior mean"
        );
        assert!(
            rel_diff(yby, dense_yby(&phi.phi, &y, alpha, beta)) <= 1e-8,
            "case {case}: quadratic form"
        );
        assert!(rel_diff(tr_c, c_d.trace()) <= 1e-8, "case {case}: tr C");
        assert!(
            rel_diff(tr_ppc, (&gram * &c_d).trace()) <= 1e-8,
            "case {case}: tr gram C"
        );
        let le_d = brute_evidence(&phi, &y, nu, alpha, beta).unwrap();
        assert!(
            (le - le_d).abs() <= 1e-8 * le_d.abs().max(1.0),
            "case {case}: log-evidence"
        );
    }
    println!("criterion 5 (dense vs spectral equivalence, 100 instances): PASS");
}

#[test]
fn criterion_6_q_calculus_suite() {
    let q_grid = [0.3, 0.7, 1.0, 1.5, 3.0];

    // inverse pair
    for &q in &q_grid {
        for i in 0..=80 {
            let x = -10.0 + 20.0 * i as f64 / 80.0;
            if 1.0 + (1.0 - q) * x > 1e-6 {
                let rt = q_log(q, q_exp(q, x).unwrap()).unwrap();
                assert!((rt - x).abs() <= 1e-10, "inverse pair at q={q}, x={x}");
            }
        }
        for i in 0..=60 {
            // cap the grid where the roundtrip stays well-conditioned: the
            // outward derivative is y^q, so y^q * eps must stay under the
            // stated 1e-10 absolute tolerance
            let y = 10f64.powf(-3.0 + (20f64.log10() + 3.0) * i as f64 / 60.0);
            let rt = q_exp(q, q_log(q, y).unwrap()).unwrap();
            assert!((rt - y).abs() <= 1e-10, "inverse pair at q={q}, y={y}");
        }
    }

    // product identity of the deformed logarithm
    for &q in &q_grid {
        for i in 0..=20 {
            for j in 0..=20 {
                let x = 10f64.powf(-1.0 + 2.0 * i as f64 / 20.0);
                let y = 10f64.powf(-1.0 + 2.0 * j as f64 / 20.0);
                let lx = q_log(q, x).unwrap();
                let ly = q_log(q, y).unwrap();
                let lhs = q_log(q, x * y).unwrap();
                let rhs = lx + ly + (1.0 - q) * lx * ly;
                assert!(
                    (lhs - rhs).abs() <= 1e-10,
                    "log product at q={q}, x={x}, y={y}"
                );
            }
        }
    }

    // addition identity of the deformed exponential
    for &q in &q_grid {
        for i in 0..=20 {
            for j in 0..=20 {
                let x = -4.0 + 8.0 * i as f64 / 20.0;
                let y = -4.0 + 8.0 * j as f64 / 20.0;
                if 1.0 + (1.0 - q) * y > 1e-3 && 1.0 + (1.0 - q) * (x + y) > 1e-3 {
                    let lhs = q_exp(q, x + y).unwrap();
                    let rhs = q_exp(q, x / (1.0 + (1.0 - q) * y)).unwrap() * q_exp(q, y).unwrap();
                    assert!(
                        (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0),
                        "exp addition at q={q}, x={x}, y={y}"
                    );
                }
            }
        }
    }

    // limits toward q = 1
    for i in 0..=50 {
        let x = -5.0 + 10.0 * i as f64 / 50.0;
        for q in [1.0 - 1e-8, 1.0 + 1e-8] {
            assert!((q_exp(q, x).unwrap() - x.exp()).abs() <= 1e-6 * x.exp());
        }
    }

    // divergence positivity and the q = 1 special case
    let std_normal = || Density1D::new(qmath::gaussian_pdf(0.0, 1.0), -9.0, 10.0).unwrap();
    let shifted = |mean: f64| Density1D::new(qmath::gaussian_pdf(mean, 1.0), -9.0, 10.0).unwrap();
    let p = std_normal();
    let same = std_normal();
    let d_self = tsallis_divergence_1d(&p, &same, EntropicIndex::new(1.5).unwrap(), 4096).unwrap();
    assert!(d_self.abs() <= 1e-6);
    let kl =
        tsallis_divergence_1d(&p, &shifted(1.0), EntropicIndex::new(1.0).unwrap(), 4096).unwrap();
    assert!((kl - 0.5).abs() <= 1e-4);
    for &q in &[0.5, 1.0, 1.5, 3.0] {
        let d =
            tsallis_divergence_1d(&p, &shifted(0.5), EntropicIndex::new(q).unwrap(), 4096).unwrap();
        assert!(d > 1e-4, "positivity at q={q}");
    }
    let near_one = tsallis_divergence_1d(
        &p,
        &shifted(1.0),
        EntropicIndex::new(1.0 + 1e-6).unwrap(),
        4096,
    )
    .unwrap();
    assert!((near_one - kl).abs() <= 1e-3);

    println!("criterion 6 (q-calculus property suite): PASS");
}

#[test]
fn criterion_7_fixed_point_residual() {
    for (label, pre, phi, fits) in sweep_all_datasets() {
        for fit in &fits {
            assert!(fit.converged);
            let (alpha, beta) = (fit.hyperparams.alpha, fit.hyperparams.beta);
            let (_, stats) = e_step(&pre, &phi, fit.hyperparams.nu, alpha, beta).unwrap();
            let m_basis = pre.n_basis as f64;
            let m_obs = pre.n_obs as f64;
            assert!(
                (alpha * stats.b - m_basis).abs() / m_basis < 1e-5,
                "{label}, nu={}: alpha residual",
                fit.hyperparams.nu
            );
            assert!(
                (beta * stats.c - m_obs).abs() / m_obs < 1e-5,
                "{label}, nu={}: beta residual",
                fit.hyperparams.nu
            );
        }
    }
    println!("criterion 7 (fixed-point residual): PASS");
}

#[test]
fn criterion_8_ridge_equivalence() {
    let mut r = rng(808);
    for case in 0..50 {
        let rows = 3 + (case * 5) % 40;
        let cols = 1 + case % 8;
        let phi = DesignMatrix {
            phi: random_matrix(&mut r, rows, cols),
            basis: Basis::Identity,
        };
        let y = random_vector(&mut r, rows);
        let pre = precompute(&phi, &y).unwrap();
        let alpha = 10f64.powf(-2.0 + (case as f64 / 49.0) * 4.0);
        let beta = 10f64.powf(1.5 - (case as f64 / 49.0) * 3.0);
        let spectral = posterior_mean(&pre, alpha, beta);
        let dense = dense_ridge_solve(&phi.phi, &y, alpha, beta);
        assert!(
            (&spectral - &dense).norm() <= 1e-10 * dense.norm().max(1e-12),
            "case {case} (m={rows}, M={cols})"
        );
    }
    println!("criterion 8 (ridge equivalence): PASS");
}

// ---------------------------------------------------------------------------
// optional news-popularity support

struct UciProblem {
    features: DMatrix<f64>,
    targets: DVector<f64>,
}

/// Loads the raw news-popularity CSV if `BLRS_UCI_CSV` points at it.
fn uci_problem() -> Option<UciProblem> {
    let path = std::env::var("BLRS_UCI_CSV").ok()?;
    let target_name = std::env::var("BLRS_UCI_TARGET").unwrap_or_else(|_| "shares".into());
    Some(load_news_csv(std::path::Path::new(&path), &target_name))
}

/// Parses a news-style CSV: keeps every numeric column except `timedelta`,
/// splits off `target_name` as the target. Cells may carry padding spaces.
fn load_news_csv(path: &std::path::Path, target_name: &str) -> UciProblem {
    let text = std::fs::read_to_string(path).expect("readable news CSV");
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows: Vec<Vec<&str>> = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::trim).collect())
        .collect();
    let numeric: Vec<usize> = (0..header.len())
        .filter(|&j| header[j] != "timedelta")
        .filter(|&j| {
            rows.iter()
                .all(|r| r.get(j).is_some_and(|c| c.parse::<f64>().is_ok()))
        })
        .collect();
    let target_j = *numeric
        .iter()
        .find(|&&j| header[j].trim() == target_name)
        .expect("target column present and numeric");
    let feature_js: Vec<usize> = numeric.iter().copied().filter(|&j| j != target_j).collect();
    let m = rows.len();
    let mut features = DMatrix::zeros(m, feature_js.len());
    let mut targets = DVector::zeros(m);
    for (i, row) in rows.iter().enumerate() {
        for (dst, &j) in feature_js.iter().enumerate() {
            features[(i, dst)] = row[j].parse().unwrap();
        }
        targets[i] = row[target_j].parse().unwrap();
    }
    UciProblem { features, targets }
}

#[test]
fn news_loader_strips_url_and_timedelta() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("news.csv");
    std::fs::write(
        &path,
        "url, timedelta, n_tokens_title, shares\n\
         http://a.example/1, 731.0, 12.0, 593\n\
         http://a.example/2, 730.0, 10.0, 711\n",
    )
    .unwrap();
    let uci = load_news_csv(&path, "shares");
    assert_eq!(
        uci.features.ncols(),
        1,
        "only the numeric non-timedelta feature survives"
    );
    assert_eq!(uci.features.as_slice(), &[12.0, 10.0]);
    assert_eq!(uci.targets.as_slice(), &[593.0, 711.0]);
}

/// Seeded shuffle, contiguous folds, one training problem per held-out part.
fn uci_folds(uci: &UciProblem, folds: usize, seed: u64) -> Vec<(usize, Precompute, DesignMatrix)> {
    use rand::RngCore;
    let m = uci.features.nrows();
    let mut order: Vec<usize> = (0..m).collect();
    let mut r = rng(seed);
    for i in (1..m).rev() {
        let j = (r.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    let base = m / folds;
    let extra = m % folds;
    let mut out = Vec::new();
    let mut start = 0;
    for trial in 1..=folds {
        let len = base + usize::from(trial <= extra);
        let test: std::collections::HashSet<usize> =
            order[start..start + len].iter().copied().collect();
        start += len;
        let train: Vec<usize> = (0..m).filter(|i| !test.contains(i)).collect();
        let mut features = DMatrix::zeros(train.len(), uci.features.ncols());
        let mut targets = DVector::zeros(train.len());
        for (dst, &src) in train.iter().enumerate() {
            features.set_row(dst, &uci.features.row(src));
            targets[dst] = uci.targets[src];
        }
        let data = Dataset::new(features, targets, None).unwrap();
        let (phi, _) = normalize_columns(&data).unwrap();
        let pre = precompute(&phi, data.targets()).unwrap();
        out.push((trial, pre, phi));
    }
    out
}
