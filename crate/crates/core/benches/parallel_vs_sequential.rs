use std::hint::black_box;

use costcut::data::seeded_rng;
use costcut::encoding::{DesignColumn, DesignMatrix, Provenance};
use costcut::evaluation::sweep;
use costcut::selection::{exhaustive_best_aic, stepwise, SelectionConfig};
use costcut::{fit, probability, Execution, FitOptions};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn instance(n: usize, k: usize, seed: u64) -> (DesignMatrix, Vec<u8>) {
    let mut rng = seeded_rng(seed);
    let mut design = DesignMatrix::intercept_only(n);
    let mut eta = vec![-2.0; n];
    for j in 0..k {
        let col: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let beta = if j % 2 == 0 { 1.0 } else { 0.0 };
        for (e, x) in eta.iter_mut().zip(&col) {
            *e += beta * x;
        }
        let name = format!("x{j}");
        design = design
            .append_column(DesignColumn { name: name.clone(), provenance: Provenance::Linear { variable: name } }, col)
            .unwrap();
    }
    let y = eta.iter().map(|&e| u8::from(rng.random::<f64>() < probability(e))).collect();
    (design, y)
}

fn bench_stepwise(c: &mut Criterion) {
    let (design, y) = instance(5000, 12, 1);
    let mut group = c.benchmark_group("stepwise_aic");
    group.sample_size(10);
    for (label, execution) in MODES {
        let config = SelectionConfig { execution, ..SelectionConfig::default() };
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| stepwise(black_box(&design), &y, &config, &FitOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_exhaustive(c: &mut Criterion) {
    let (design, y) = instance(2000, 9, 2);
    let mut group = c.benchmark_group("exhaustive_512_subsets");
    group.sample_size(10);
    for (label, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| exhaustive_best_aic(black_box(&design), &y, 12, &FitOptions::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_predict(c: &mut Criterion) {
    let (design, y) = instance(400_000, 8, 3);
    let model = fit(&design, &y, &FitOptions::default()).unwrap();
    let mut group = c.benchmark_group("predict_400k_rows");
    group.sample_size(20);
    for (label, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| model.probabilities_design(black_box(&design), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut rng = seeded_rng(4);
    let n = 200_000;
    let probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3)).collect();
    let labels: Vec<u8> = probs.iter().map(|&p| u8::from(rng.random::<f64>() < p)).collect();
    let ratios: Vec<f64> = (1..=64).map(|i| f64::from(i) * 2.5).collect();
    let mut group = c.benchmark_group("sweep_64_ratios");
    group.sample_size(20);
    for (label, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| sweep(black_box(&probs), &labels, &ratios, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_stepwise, bench_exhaustive, bench_predict, bench_sweep);
criterion_main!(benches);
