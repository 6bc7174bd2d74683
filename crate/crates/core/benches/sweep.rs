use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qbattery::dynamics::MasterEquation;
use qbattery::linalg::eigvalsh;
use qbattery::model::{initial_state, ModelOperators};
use qbattery::sweep::{preset, run_sweep_with};
use qbattery::{par, EvolveOptions, Execution, SystemSpec};

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(2)
}

fn sweep_execution(c: &mut Criterion) {
    let mut plan = preset("fig2a").unwrap();
    plan.base.t_max = 2.0;
    let dir = tempfile::tempdir().unwrap();
    let opts = EvolveOptions::default();
    let mut group = c.benchmark_group("sweep_fig2a_t2");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel { jobs: workers() })] {
        group.bench_function(name, |b| b.iter(|| run_sweep_with(black_box(&plan), dir.path(), exec, &opts).unwrap()));
    }
    group.finish();
}

fn spectra(c: &mut Criterion) {
    // Stand-in for trajectory post-processing: one Hermitian spectrum per sample.
    let spec = SystemSpec { spins: 3, photon_cutoff: 4, ..Default::default() };
    let rho = initial_state(&spec).unwrap();
    let ops = ModelOperators::build(&spec).unwrap();
    let eq = MasterEquation::new(&ops, &spec).unwrap();
    let samples: Vec<_> = (0..64)
        .map(|k| {
            let mut m = &rho + &eq.rhs(&rho, 0.01 * k as f64).scale(num_complex::Complex64::new(1e-3, 0.0));
            m.symmetrize();
            m
        })
        .collect();
    let mut group = c.benchmark_group("spectra_dim40_x64");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel { jobs: workers() })] {
        group
            .bench_function(name, |b| b.iter(|| par::map_with(black_box(&samples), exec, |m| eigvalsh(m).unwrap()[0])));
    }
    group.finish();
}

fn generator(c: &mut Criterion) {
    let mut group = c.benchmark_group("master_equation_rhs");
    for (spins, cutoff) in [(2, 2), (3, 4)] {
        let spec = SystemSpec { spins, photon_cutoff: cutoff, ..Default::default() };
        let ops = ModelOperators::build(&spec).unwrap();
        let eq = MasterEquation::new(&ops, &spec).unwrap();
        let rho = initial_state(&spec).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(eq.dim()), &rho, |b, rho| {
            b.iter(|| eq.rhs(black_box(rho), 0.3))
        });
    }
    group.finish();
}

criterion_group!(benches, sweep_execution, spectra, generator);
criterion_main!(benches);
