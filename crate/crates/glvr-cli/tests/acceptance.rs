//! Acceptance suite: one test per release gate. Each prints a PASS line
//! with its measured numbers (run with `--nocapture` to see them).
//!
//! The paired-trial benchmark (gate 4) runs a frozen configuration that
//! was calibrated once against a brute-force multi-restart oracle and then
//! pinned: a 16->64->64 tanh generator with weight std `3.5/sqrt(fan_in)`,
//! bias std 0.3, net seed 1234, master seed 2024, 50 trials of 5,000
//! iterations at lr 0.01.

use std::process::Command;
use std::time::Instant;

use glvr::diffcore::{Activation, DenseLayer, Network};
use glvr::gantrain::{train, GenLossMode, LabelScheme, SyntheticDataset, TrainConfig};
use glvr::harness::{run_paired_trials, summarize, Jobs, TrialRecord};
use glvr::latentops::{great_circle_with_dir, slerp};
use glvr::nets::{
    checkpoint_from_bytes, checkpoint_to_bytes, init_net, Checkpoint, NetKind, NetSpec,
};
use glvr::recovery::{
    per_step_prob, reconstruction_error, recover_with_rng, RecoveryConfig, ResampleCriterion,
};
use glvr::rng::{trial_seed, Rng};
use glvr::storage::{tensor_from_bytes, tensor_to_bytes};
use glvr::tensor::{l2_sq, Tensor};

// ---------------------------------------------------------------------------
// shared helpers

/// Random all-tanh network with weight std `gain/sqrt(fan_in)` per layer.
fn tanh_net(dims: &[usize], gain: f64, bias_std: f64, seed: u64) -> Network {
    let mut rng = Rng::from_seed(seed);
    let layers = dims
        .windows(2)
        .map(|w| {
            let (i, o) = (w[0], w[1]);
            let std = gain / (i as f64).sqrt();
            let weight = (0..i * o).map(|_| rng.normal() * std).collect();
            let bias = (0..o).map(|_| rng.normal() * bias_std).collect();
            DenseLayer::new(i, o, weight, bias, Activation::Tanh).unwrap()
        })
        .collect();
    Network::new(layers).unwrap()
}

fn l2_loss(net: &Network, z: &Tensor, target: &Tensor) -> f64 {
    l2_sq(target, &net.forward(z).unwrap()).unwrap()
}

/// |a - b| relative to b with an absolute floor of 1, the usual gradcheck
/// normalization.
fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// 1. closed-form criterion suite

#[test]
fn acceptance_01_criterion_closed_forms() {
    let start = Instant::now();
    let tol = 1e-12;

    let hard = ResampleCriterion::Hard { cutoff: 2.5 };
    assert_eq!(hard.resample_prob(3.0), 1.0);
    assert_eq!(hard.resample_prob(-3.0), 1.0);
    assert_eq!(hard.resample_prob(0.0), 0.0);
    assert_eq!(hard.resample_prob(2.5), 0.0);
    assert_eq!(hard.resample_prob(2.5 + 1e-9), 1.0);

    // logistic midpoint: sigma(b) = 1/2 across the benchmark grid
    for a in [2.0, 3.0, 4.0] {
        for b in [2.0, 2.5, 3.0] {
            let c = ResampleCriterion::Logistic {
                steepness: a,
                midpoint: b,
            };
            assert!((c.resample_prob(b) - 0.5).abs() < tol);
            assert!((c.resample_prob(-b) - 0.5).abs() < tol);
        }
    }
    let logistic = ResampleCriterion::Logistic {
        steepness: 2.0,
        midpoint: 2.0,
    };
    let want = 1.0 / (1.0 + (-2.0f64).exp()); // 0.880797...
    assert!((logistic.resample_prob(3.0) - want).abs() < tol);

    let tn = ResampleCriterion::TruncNormal { cutoff: 2.5 };
    assert!((tn.resample_prob(0.0) - (-3.125f64).exp()).abs() < tol);
    assert_eq!(tn.resample_prob(2.5), 1.0);
    assert_eq!(tn.resample_prob(-2.5), 1.0);
    assert_eq!(tn.resample_prob(10.0), 1.0);

    // per-step probability round-trips 1-(1-q)^E = p; the reference side is
    // evaluated through log1p/expm1 so its own rounding stays below tol.
    let mut max_err: f64 = 0.0;
    for &e in &[1u64, 2, 20_000] {
        let mut ps: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        ps.extend([1e-12, 1e-6, 0.999_999, 1.0 - 1e-9]);
        for p in ps {
            let p = p.min(1.0 - 1e-9);
            let q = per_step_prob(p, e).unwrap();
            let back = -((e as f64) * (-q).ln_1p()).exp_m1();
            max_err = max_err.max((back - p).abs());
        }
    }
    assert!(max_err < tol, "round-trip error {max_err}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "took {elapsed}s, budget 1s");
    println!(
        "acceptance 01 criterion-closed-forms: PASS (round-trip max err {max_err:.2e}, {elapsed:.3}s)"
    );
}

// ---------------------------------------------------------------------------
// 2. gradient correctness against central finite differences

#[test]
fn acceptance_02_gradient_finite_differences() {
    let start = Instant::now();
    let net = tanh_net(&[8, 16, 32], 1.0, 0.1, 42);
    let mut rng = Rng::from_seed(43);
    let h = 1e-5;
    let mut max_rel: f64 = 0.0;

    for _ in 0..100 {
        let z = Tensor::from_vec(rng.normal_vec(8));
        let target = Tensor::from_vec(rng.normal_vec(32));

        // input gradient
        let grad = glvr::diffcore::grad_z_loss(&net, &z, &target).unwrap();
        let mut probe = z.data().to_vec();
        for i in 0..8 {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = l2_loss(&net, &Tensor::from_vec(probe.clone()), &target);
            probe[i] = orig - h;
            let down = l2_loss(&net, &Tensor::from_vec(probe.clone()), &target);
            probe[i] = orig;
            max_rel = max_rel.max(rel_err(grad.data()[i], (up - down) / (2.0 * h)));
        }

        // parameter gradients, perturbing a working copy in place
        let (_, grads) = glvr::diffcore::grad_params_l2(&net, &z, &target).unwrap();
        let mut work = net.clone();
        for (li, layer_grads) in grads.iter().enumerate() {
            for wi in 0..layer_grads.weight.len() {
                work.layers_mut()[li].weight_mut()[wi] += h;
                let up = l2_loss(&work, &z, &target);
                work.layers_mut()[li].weight_mut()[wi] -= 2.0 * h;
                let down = l2_loss(&work, &z, &target);
                work.layers_mut()[li].weight_mut()[wi] += h;
                max_rel = max_rel.max(rel_err(layer_grads.weight[wi], (up - down) / (2.0 * h)));
            }
            for bi in 0..layer_grads.bias.len() {
                work.layers_mut()[li].bias_mut()[bi] += h;
                let up = l2_loss(&work, &z, &target);
                work.layers_mut()[li].bias_mut()[bi] -= 2.0 * h;
                let down = l2_loss(&work, &z, &target);
                work.layers_mut()[li].bias_mut()[bi] += h;
                max_rel = max_rel.max(rel_err(layer_grads.bias[bi], (up - down) / (2.0 * h)));
            }
        }
    }

    assert!(max_rel < 1e-6, "max relative error {max_rel}");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "took {elapsed}s, budget 5s");
    println!(
        "acceptance 02 gradient-finite-differences: PASS (max rel err {max_rel:.2e}, {elapsed:.2}s)"
    );
}

// ---------------------------------------------------------------------------
// 3. convex recovery on a well-conditioned linear generator

/// Orthogonal matrix from Gram-Schmidt over seeded Gaussian rows.
fn orthogonal(n: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v = rng.normal_vec(n);
        for prev in &rows {
            let proj: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
            for (vi, pi) in v.iter_mut().zip(prev) {
                *vi -= proj * pi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            rows.push(v.iter().map(|x| x / norm).collect());
        }
    }
    rows
}

#[test]
fn acceptance_03_convex_recovery_oracle() {
    let start = Instant::now();
    let n = 8;
    // A = Q1 diag(sigma) Q2 with singular values 1..1.5: condition 1.5.
    let mut rng = Rng::from_seed(314);
    let q1 = orthogonal(n, &mut rng);
    let q2 = orthogonal(n, &mut rng);
    let sigma: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * i as f64 / (n - 1) as f64).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (0..n).map(|k| q1[k][i] * sigma[k] * q2[k][j]).sum();
        }
    }
    let g = Network::new(vec![
        DenseLayer::new(n, n, a, vec![0.0; n], Activation::Identity).unwrap(),
    ])
    .unwrap();

    let cfg = RecoveryConfig {
        iters: 2_000,
        lr: 0.05,
        ..RecoveryConfig::default()
    };
    let mut worst: f64 = 0.0;
    for s in 0..20u64 {
        let seed = trial_seed(271, s);
        let mut stream = Rng::from_seed(seed);
        let z_true = Tensor::from_vec(stream.normal_vec(n));
        let x = g.forward(&z_true).unwrap();
        let res =
            recover_with_rng(&x, &g, &ResampleCriterion::Disabled, &cfg, stream, seed).unwrap();
        let err = reconstruction_error(&z_true, &res.z).unwrap();
        worst = worst.max(err);
        assert!(err < 1e-8, "seed {s}: error {err}");
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "took {elapsed}s, budget 10s");
    println!(
        "acceptance 03 convex-recovery: PASS (20/20 seeds, worst err {worst:.2e}, {elapsed:.2}s)"
    );
}

// ---------------------------------------------------------------------------
// 4. paired-trial benchmark (frozen calibration)

const BENCH_DIMS: [usize; 3] = [16, 64, 64];
const BENCH_GAIN: f64 = 3.5;
const BENCH_BIAS_STD: f64 = 0.3;
const BENCH_NET_SEED: u64 = 1234;
const BENCH_MASTER_SEED: u64 = 2024;
const BENCH_TRIALS: u64 = 50;

fn bench_generator() -> Network {
    tanh_net(&BENCH_DIMS, BENCH_GAIN, BENCH_BIAS_STD, BENCH_NET_SEED)
}

fn bench_recovery_cfg() -> RecoveryConfig {
    RecoveryConfig {
        iters: 5_000,
        lr: 0.01,
        ..RecoveryConfig::default()
    }
}

#[test]
fn acceptance_04_paired_trial_benchmark() {
    let start = Instant::now();
    let g = bench_generator();
    let cfg = bench_recovery_cfg();

    // Multi-restart oracle on the first 5 trials: the benchmark instances
    // are genuinely invertible (best of 10 restarts reaches small error)
    // even where the single-shot baseline gets stuck.
    for k in 0..5u64 {
        let seed = trial_seed(BENCH_MASTER_SEED, k);
        let mut stream = Rng::from_seed(seed);
        let z_true = Tensor::from_vec(stream.normal_vec(16));
        let x = g.forward(&z_true).unwrap();
        let mut best = f64::INFINITY;
        for r in 0..10u64 {
            let rng = if r == 0 {
                stream.clone()
            } else {
                Rng::from_seed(trial_seed(seed, 1000 + r))
            };
            let res =
                recover_with_rng(&x, &g, &ResampleCriterion::Disabled, &cfg, rng, seed).unwrap();
            best = best.min(reconstruction_error(&z_true, &res.z).unwrap());
        }
        assert!(best < 1e-2, "oracle trial {k}: best-of-10 error {best}");
    }

    let criteria = [
        ResampleCriterion::Disabled,
        ResampleCriterion::Hard { cutoff: 2.5 },
        ResampleCriterion::Logistic {
            steepness: 2.0,
            midpoint: 2.0,
        },
        ResampleCriterion::TruncNormal { cutoff: 2.75 },
    ];
    let records = run_paired_trials(
        &g,
        &criteria,
        BENCH_TRIALS,
        BENCH_MASTER_SEED,
        &cfg,
        Jobs::Auto,
        None,
    )
    .unwrap();
    let table = summarize(&records).unwrap();

    let disabled_avg = table.rows[0].avg_err;
    let mut lines = String::new();
    for row in &table.rows {
        lines.push_str(&format!(
            "  {} avg_err={:.4} wins={:.0}%\n",
            row.criterion, row.avg_err, row.wins
        ));
        if !row.baseline {
            assert!(
                row.avg_err <= disabled_avg,
                "{}: avg err {} exceeds disabled {}",
                row.criterion,
                row.avg_err,
                disabled_avg
            );
        }
    }
    let logistic = table
        .rows
        .iter()
        .find(|r| r.criterion == "logistic:2,2")
        .unwrap();
    assert!(
        logistic.wins >= 60.0,
        "logistic:2,2 wins {}% < 60%",
        logistic.wins
    );

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 900.0, "took {elapsed}s, budget 900s");
    println!(
        "acceptance 04 paired-trial-benchmark: PASS ({:.0}s)\n{}",
        elapsed, lines
    );
}

// ---------------------------------------------------------------------------
// 5. metric definitions

fn record(trial: u64, criterion: ResampleCriterion, error: f64) -> TrialRecord {
    TrialRecord {
        trial,
        criterion,
        seed: trial,
        error,
        final_loss: error,
        resamples: 0,
        wall_ms: 0.0,
    }
}

#[test]
fn acceptance_05_metric_definitions() {
    let hard = ResampleCriterion::Hard { cutoff: 2.5 };

    // hand-computed example: criterion (0.1, 0.5) vs disabled (0.2, 0.4)
    let records = vec![
        record(0, ResampleCriterion::Disabled, 0.2),
        record(0, hard, 0.1),
        record(1, ResampleCriterion::Disabled, 0.4),
        record(1, hard, 0.5),
    ];
    let table = summarize(&records).unwrap();
    assert_eq!(table.rows[1].wins, 50.0);
    assert_eq!(table.rows[1].sig_wins, Some(100.0));

    // monotone thresholds over 1,000 randomized record sets
    let mut rng = Rng::from_seed(1001);
    for set in 0..1000 {
        let trials = 1 + rng.index(12) as u64;
        let mut records = Vec::new();
        for t in 0..trials {
            for crit in [ResampleCriterion::Disabled, hard] {
                let err = 10f64.powf(rng.uniform(-7.0, 1.0));
                records.push(record(t, crit, err));
            }
        }
        let table = summarize(&records).unwrap();
        for row in &table.rows {
            assert!(
                row.thresholds.windows(2).all(|w| w[0] <= w[1]),
                "set {set}: thresholds not monotone: {:?}",
                row.thresholds
            );
        }
    }
    println!("acceptance 05 metric-definitions: PASS (hand example + 1000 randomized sets)");
}

// ---------------------------------------------------------------------------
// 6. slerp and great circle

#[test]
fn acceptance_06_slerp_great_circle() {
    let mut rng = Rng::from_seed(606);

    // endpoint identities to 1e-12
    let z1 = Tensor::from_vec(rng.normal_vec(24));
    let z2 = Tensor::from_vec(rng.normal_vec(24));
    for (s, want) in [(slerp(&z1, &z2, 0.0).unwrap(), &z1), (slerp(&z1, &z2, 1.0).unwrap(), &z2)] {
        for (a, b) in s.data().iter().zip(want.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    // unit-sphere norm preservation to 1e-9 over the mu grid
    let normalize = |v: Vec<f64>| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        Tensor::from_vec(v.iter().map(|x| x / n).collect())
    };
    let u1 = normalize(rng.normal_vec(24));
    let u2 = normalize(rng.normal_vec(24));
    for k in 0..=10 {
        let mu = k as f64 / 10.0;
        let s = slerp(&u1, &u2, mu).unwrap();
        let n = s.data().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-9, "mu {mu}: norm {n}");
    }

    // 4-step great circle on (1,0) with w = (0,1)
    let z = Tensor::from_vec(vec![1.0, 0.0]);
    let w = Tensor::from_vec(vec![0.0, 1.0]);
    let path = great_circle_with_dir(&z, &w, 4).unwrap();
    let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    for (p, want) in path.points.iter().zip(expected) {
        assert!((p.data()[0] - want[0]).abs() < 1e-12);
        assert!((p.data()[1] - want[1]).abs() < 1e-12);
    }
    println!("acceptance 06 slerp-great-circle: PASS");
}

// ---------------------------------------------------------------------------
// 7. determinism end to end

/// Drops the final (wall_ms) column from CSV text. wall_ms is the only
/// nondeterministic field and is always last and unquoted.
fn strip_wall_column(text: &str) -> String {
    text.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn acceptance_07_determinism() {
    // checkpoint and tensor round trips are bitwise identities
    let mut rng = Rng::from_seed(77);
    let cp = Checkpoint {
        kind: NetKind::Generator,
        net: init_net(&NetSpec::generator(vec![6, 12, 8]), &mut rng).unwrap(),
        seed: 77,
        step: 5,
    };
    let bytes = checkpoint_to_bytes(&cp).unwrap();
    assert_eq!(checkpoint_from_bytes(&bytes).unwrap(), cp);
    assert_eq!(checkpoint_to_bytes(&checkpoint_from_bytes(&bytes).unwrap()).unwrap(), bytes);

    let t = Tensor::new(vec![3, 5], rng.normal_vec(15)).unwrap();
    let tb = tensor_to_bytes(&t).unwrap();
    assert_eq!(tensor_from_bytes(&tb).unwrap(), t);
    assert_eq!(tensor_to_bytes(&tensor_from_bytes(&tb).unwrap()).unwrap(), tb);

    // `evaluate` run twice with the same master seed produces byte-identical
    // records (excluding wall_ms)
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("gen.glvr");
    glvr::nets::save_checkpoint(&cp, &model).unwrap();
    let config = dir.path().join("eval.json");
    std::fs::write(
        &config,
        format!(
            r#"{{
  "model": "{}",
  "criteria": ["disabled", "hard:2.5", "logistic:2,2"],
  "trials": 2,
  "master_seed": 9,
  "recovery": {{ "iters": 60, "lr": 0.01 }}
}}"#,
            model.display()
        ),
    )
    .unwrap();

    let run = |tag: &str| -> (String, String) {
        let records = dir.path().join(format!("records_{tag}.csv"));
        let summary = dir.path().join(format!("summary_{tag}.csv"));
        let out = Command::new(env!("CARGO_BIN_EXE_glvr"))
            .args([
                "evaluate",
                "--config",
                config.to_str().unwrap(),
                "--records",
                records.to_str().unwrap(),
                "--summary",
                summary.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "evaluate failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        (
            std::fs::read_to_string(&records).unwrap(),
            std::fs::read_to_string(&summary).unwrap(),
        )
    };
    let (rec_a, sum_a) = run("a");
    let (rec_b, sum_b) = run("b");
    assert_eq!(strip_wall_column(&rec_a), strip_wall_column(&rec_b));
    assert_eq!(sum_a, sum_b);
    assert_ne!(strip_wall_column(&rec_a), "");
    println!("acceptance 07 determinism: PASS (round trips bitwise, evaluate byte-stable)");
}

// ---------------------------------------------------------------------------
// 8. GAN training smoke

fn mean_mode_distance(net: &Network, modes: &[(f64, f64)], seed: u64) -> f64 {
    let mut rng = Rng::from_seed(seed);
    let n = 1000;
    let z = Tensor::new(vec![n, net.input_dim()], rng.normal_vec(n * net.input_dim())).unwrap();
    let out = net.forward(&z).unwrap();
    let mut total = 0.0;
    for r in 0..n {
        let (x, y) = (out.data()[r * 2], out.data()[r * 2 + 1]);
        let d = modes
            .iter()
            .map(|(mx, my)| ((x - mx).powi(2) + (y - my).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        total += d;
    }
    total / n as f64
}

#[test]
fn acceptance_08_gan_training_smoke() {
    let start = Instant::now();
    let cfg = TrainConfig {
        seed: 7,
        latent_dim: 16,
        generator_dims: vec![16, 32, 32, 2],
        discriminator_dims: vec![2, 32, 32, 1],
        lr: 2e-4,
        batch_size: 64,
        steps: 2_000,
        d_steps_per_g: 1,
        label_scheme: LabelScheme::Hard,
        generator_loss: GenLossMode::Saturating,
        dataset: SyntheticDataset::default_ring(),
    };
    let modes = cfg.dataset.mode_centers().unwrap();

    let mut rng = Rng::from_seed(cfg.seed);
    let g0 = init_net(&NetSpec::generator(cfg.generator_dims.clone()), &mut rng).unwrap();
    let before = mean_mode_distance(&g0, &modes, 555);

    let out = train(&cfg).unwrap();
    assert!(out
        .history
        .iter()
        .all(|(_, d, g)| d.is_finite() && g.is_finite()));
    let after = mean_mode_distance(&out.generator.net, &modes, 555);
    assert!(
        after < before,
        "mode distance did not improve: {after} vs {before}"
    );

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed}s, budget 60s");
    println!(
        "acceptance 08 gan-training-smoke: PASS (mode distance {before:.3} -> {after:.3}, {elapsed:.1}s)"
    );
}

// ---------------------------------------------------------------------------
// CLI exit-code contract (exercised alongside the determinism gate)

#[test]
fn cli_usage_and_runtime_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_glvr");
    let dir = tempfile::tempdir().unwrap();

    // no subcommand: usage text, exit 2
    let out = Command::new(bin).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // invalid criterion parameter: exit 2
    let model = dir.path().join("gen.glvr");
    let cp = Checkpoint {
        kind: NetKind::Generator,
        net: init_net(&NetSpec::generator(vec![4, 8, 6]), &mut Rng::from_seed(1)).unwrap(),
        seed: 1,
        step: 0,
    };
    glvr::nets::save_checkpoint(&cp, &model).unwrap();
    let image = dir.path().join("x.glvt");
    glvr::storage::write_tensor(&image, &Tensor::from_vec(vec![0.0; 6])).unwrap();
    let out = Command::new(bin)
        .args([
            "recover",
            "--model",
            model.to_str().unwrap(),
            "--image",
            image.to_str().unwrap(),
            "--criterion",
            "hard:0",
            "--iters",
            "5",
            "--out",
            dir.path().join("z.glvt").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    // dimension mismatch between image and model: runtime error, exit 1
    let bad_image = dir.path().join("bad.glvt");
    glvr::storage::write_tensor(&bad_image, &Tensor::from_vec(vec![0.0; 5])).unwrap();
    let out = Command::new(bin)
        .args([
            "recover",
            "--model",
            model.to_str().unwrap(),
            "--image",
            bad_image.to_str().unwrap(),
            "--iters",
            "5",
            "--out",
            dir.path().join("z.glvt").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("6") && stderr.contains("5"), "stderr: {stderr}");
    println!("cli exit codes: PASS");
}
