use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use svm_admm::admm::AdmmConfig;
use svm_admm::data;
use svm_admm::exec::Exec;
use svm_admm::kernel::{self, KernelParams};
use svm_admm::nystrom::{self, NystromConfig};
use svm_admm::svm::{self, TrainOptions};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn kernel_columns(c: &mut Criterion) {
    let ds = data::gaussian_blobs(512, 64, 1.0, 0).unwrap();
    let params = KernelParams::new(-0.05).unwrap();
    let m = nystrom::sample_subset(ds.n(), 64, 0).unwrap();
    let mut group = c.benchmark_group("kernel_columns");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::new(name, ds.n()), |b| {
            b.iter(|| kernel::kernel_columns_with(ds.x().view(), ds.y().view(), &params, &m, exec).unwrap())
        });
    }
    group.finish();
}

fn full_kernel(c: &mut Criterion) {
    let ds = data::gaussian_blobs(256, 32, 1.0, 1).unwrap();
    let params = KernelParams::new(-0.1).unwrap();
    let mut group = c.benchmark_group("kernel_matrix");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::new(name, ds.n()), |b| {
            b.iter(|| kernel::build_kernel_matrix_with(ds.x().view(), ds.y().view(), &params, exec).unwrap())
        });
    }
    group.finish();
}

fn nonlinear_training(c: &mut Criterion) {
    let ds = data::gaussian_blobs(512, 32, 1.5, 2).unwrap();
    let params = KernelParams::new(-0.05).unwrap();
    let nys = NystromConfig::square(32, 2);
    let cfg = AdmmConfig { max_iters: 100, ..Default::default() };
    let mut group = c.benchmark_group("train_nonlinear");
    group.sample_size(20);
    for (name, exec) in POLICIES {
        let opts = TrainOptions { exec, compute_mse: false };
        group.bench_function(BenchmarkId::new(name, ds.n()), |b| {
            b.iter(|| svm::train_nonlinear_with(ds.x().view(), ds.y().view(), &params, &nys, &cfg, opts).unwrap())
        });
    }
    group.finish();
}

fn inference(c: &mut Criterion) {
    let ds = data::gaussian_blobs(512, 32, 1.5, 3).unwrap();
    let params = KernelParams::new(-0.05).unwrap();
    let rep = svm::train_nonlinear(ds.x().view(), ds.y().view(), &params, &NystromConfig::square(64, 3), &AdmmConfig::default()).unwrap();
    let mut group = c.benchmark_group("decision_values");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::new(name, ds.n()), |b| {
            b.iter(|| svm::decision_values(&rep.model, ds.x().view(), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, kernel_columns, full_kernel, nonlinear_training, inference);
criterion_main!(benches);
