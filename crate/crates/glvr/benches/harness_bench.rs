//! Benchmarks for the recovery hot loop and the paired-trial harness,
//! comparing the sequential path against the rayon pool.
//!
//! Run with `cargo bench -p glvr`; build with `--no-default-features` to
//! measure the purely sequential build.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use glvr::diffcore::{Activation, DenseLayer, Network};
use glvr::harness::{run_paired_trials, Jobs};
use glvr::recovery::{recover, RecoveryConfig, ResampleCriterion};
use glvr::rng::Rng;
use glvr::Tensor;

fn tanh_generator(dims: &[usize], seed: u64) -> Network {
    let mut rng = Rng::from_seed(seed);
    let layers = dims
        .windows(2)
        .map(|w| {
            let std = 2.0 / (w[0] as f64).sqrt();
            let weight = (0..w[0] * w[1]).map(|_| rng.normal() * std).collect();
            let bias = (0..w[1]).map(|_| rng.normal() * 0.3).collect();
            DenseLayer::new(w[0], w[1], weight, bias, Activation::Tanh).unwrap()
        })
        .collect();
    Network::new(layers).unwrap()
}

fn bench_recover(c: &mut Criterion) {
    let g = tanh_generator(&[16, 64, 64], 1234);
    let mut rng = Rng::from_seed(5);
    let z_true = Tensor::from_vec(rng.normal_vec(16));
    let x = g.forward(&z_true).unwrap();
    let cfg = RecoveryConfig {
        iters: 500,
        lr: 0.01,
        seed: 6,
        ..RecoveryConfig::default()
    };

    let mut group = c.benchmark_group("recover_500_iters");
    for criterion in [
        ResampleCriterion::Disabled,
        ResampleCriterion::Logistic {
            steepness: 2.0,
            midpoint: 2.0,
        },
    ] {
        group.bench_function(criterion.to_string(), |b| {
            b.iter(|| recover(black_box(&x), &g, &criterion, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_paired_trials(c: &mut Criterion) {
    let g = tanh_generator(&[16, 32, 32], 1234);
    let criteria = [
        ResampleCriterion::Disabled,
        ResampleCriterion::Hard { cutoff: 2.5 },
        ResampleCriterion::Logistic {
            steepness: 2.0,
            midpoint: 2.0,
        },
        ResampleCriterion::TruncNormal { cutoff: 2.75 },
    ];
    let cfg = RecoveryConfig {
        iters: 250,
        lr: 0.01,
        ..RecoveryConfig::default()
    };

    let mut group = c.benchmark_group("paired_trials_8x4");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            run_paired_trials(&g, &criteria, 8, 3, &cfg, Jobs::Count(1), None).unwrap()
        })
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel_auto", |b| {
        b.iter(|| run_paired_trials(&g, &criteria, 8, 3, &cfg, Jobs::Auto, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_recover, bench_paired_trials);
criterion_main!(benches);
