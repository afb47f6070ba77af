use bcp_bench::{bcp_hyperplane, linear_data, scored_labels};
use bcp_core::trainers::{
    mlp_train, perceptron_train, svm_train, MlpConfig, PerceptronConfig, SvmConfig,
};
use bcp_core::{bcp_train, extract_subset, roc_auc, BcpConfig, ReductionPolicy};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

const SIZES: [usize; 3] = [1_000, 10_000, 50_000];

fn bcp(c: &mut Criterion) {
    let mut group = c.benchmark_group("bcp_train");
    let cfg = BcpConfig {
        max_iters: 10,
        ..Default::default()
    };
    for n in SIZES {
        let d = linear_data(n, 10, 1);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &d, |b, d| {
            b.iter(|| bcp_train(black_box(d), &cfg).unwrap())
        });
    }
    group.finish();
}

fn reduce(c: &mut Criterion) {
    let mut group = c.benchmark_group("extract_subset");
    let policy = ReductionPolicy::keep_fraction(0.2);
    for n in SIZES {
        let d = linear_data(n, 10, 2);
        let h = bcp_hyperplane(&d);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &d, |b, d| {
            b.iter(|| extract_subset(black_box(d), &h, &policy).unwrap())
        });
    }
    group.finish();
}

fn trainers(c: &mut Criterion) {
    let mut group = c.benchmark_group("trainers");
    group.sample_size(10);
    let d = linear_data(10_000, 10, 3);
    let svm = SvmConfig::default();
    let mlp = MlpConfig {
        epochs: 20,
        ..Default::default()
    };
    let perceptron = PerceptronConfig::default();
    group.bench_function("svm", |b| {
        b.iter(|| svm_train(black_box(&d), &svm).unwrap())
    });
    group.bench_function("mlp", |b| {
        b.iter(|| mlp_train(black_box(&d), &mlp).unwrap())
    });
    group.bench_function("perceptron", |b| {
        b.iter(|| perceptron_train(black_box(&d), &perceptron).unwrap())
    });
    group.finish();
}

fn auc(c: &mut Criterion) {
    let mut group = c.benchmark_group("roc_auc");
    for n in SIZES {
        let (labels, scores) = scored_labels(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| roc_auc(black_box(&labels), black_box(&scores)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bcp, reduce, trainers, auc);
criterion_main!(benches);
