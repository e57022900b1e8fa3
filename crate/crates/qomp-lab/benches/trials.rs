use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qomp_lab::exec::{map_indexed, Execution};
use qomp_lab::instances::{gaussian_dictionary, planted_signal, rng};
use qomp_lab::model::mutual_incoherence;
use qomp_lab::primitives::NoiseModel;
use qomp_lab::qomp::{qomp_run, QompConfig};

const POLICIES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn incoherence(c: &mut Criterion) {
    let mut group = c.benchmark_group("mutual_incoherence");
    group.sample_size(20);
    for m in [128, 512] {
        let d = gaussian_dictionary(64, m, &mut rng(1)).unwrap();
        for exec in POLICIES {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), m), &d, |b, d| {
                b.iter(|| mutual_incoherence(black_box(d), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn exact_qomp(c: &mut Criterion) {
    let mut group = c.benchmark_group("qomp_exact_scoring");
    group.sample_size(10);
    let d = gaussian_dictionary(128, 1024, &mut rng(2)).unwrap();
    let s = planted_signal(&d, 4, &mut rng(3)).unwrap().signal;
    for exec in POLICIES {
        let mut cfg = QompConfig::new(4, 1e-6, 0.05, 0.05, NoiseModel::exact());
        cfg.execution = exec;
        group.bench_function(format!("{exec:?}"), |b| b.iter(|| qomp_run(black_box(&d), &s, &cfg).unwrap()));
    }
    group.finish();
}

fn trial_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial_batch");
    group.sample_size(10);
    for exec in POLICIES {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| {
                map_indexed(exec, 32, |t| {
                    let mut r = rng(100 + t as u64);
                    let d = gaussian_dictionary(32, 128, &mut r).unwrap();
                    let s = planted_signal(&d, 3, &mut r).unwrap().signal;
                    let mut cfg = QompConfig::new(3, 0.05, 0.05, 0.05, NoiseModel::stochastic(t as u64));
                    cfg.execution = Execution::Sequential;
                    qomp_run(&d, &s, &cfg).unwrap().support.len()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, incoherence, exact_qomp, trial_batch);
criterion_main!(benches);
