use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracwave_core::free::{free_resolvent, FreeKernelTable, SpectralParams, Sign};
use fracwave_core::perturbed::{lap_norm, Potential, PotentialSetup};
use fracwave_core::radial::RadialGrid;
use std::hint::black_box;

/// One worker reproduces the sequential backend; the default pool uses every core.
fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", one), ("parallel", all)]
}

fn resolvent(c: &mut Criterion) {
    let p = SpectralParams::new(3, 1.25).unwrap();
    let grid = RadialGrid::gauss_panels(3, 1e-3, 1.0, 8.0, 0.5, 8).unwrap();
    let mut g = c.benchmark_group("free_resolvent");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new(name, grid.nodes.len()), &grid, |b, grid| {
            b.iter(|| pool.install(|| free_resolvent(&p, black_box(2.0), Sign::Plus, grid).unwrap()))
        });
    }
    g.finish();
}

fn weighted_resolvent(c: &mut Criterion) {
    let p = SpectralParams::new(3, 1.25).unwrap();
    let table = FreeKernelTable::new(&p).unwrap();
    let grid = RadialGrid::gauss_panels(3, 1e-3, 1.0, 8.0, 0.5, 8).unwrap();
    let setup = PotentialSetup::new(&table, &Potential::gaussian(1.0), &grid).unwrap();
    let mut g = c.benchmark_group("lap_norm");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(name, |b| b.iter(|| pool.install(|| lap_norm(&setup, black_box(3.0), 0.1, Sign::Plus).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, resolvent, weighted_resolvent);
criterion_main!(benches);
