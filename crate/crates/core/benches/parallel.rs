//! Hot kernels on the full worker pool against a single worker.
//!
//! Built without the `parallel` feature, both arms run the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use juliadim::conditions::{check_osc, example, OscParams};
use juliadim::julia::{approximate_julia, rasterize, CloudMethod, JuliaParams, Viewport};
use juliadim::words::{PreimageTree, PruningPolicy};
use juliadim::{Complex64, Metric};

fn with_workers<R>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    #[cfg(feature = "parallel")]
    {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = workers {
            b = b.num_threads(n);
        }
        b.build().unwrap().install(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}

fn kernels(c: &mut Criterion) {
    let pm2 = example("pm2").unwrap();
    let f = pm2.multimap.clone();
    let chaos = JuliaParams { method: CloudMethod::ChaosGame, length: 200_000, ..JuliaParams::default() };
    let cloud = approximate_julia(&f, &chaos).unwrap();
    let vp = Viewport::square(Complex64::new(0.0, 0.0), 2.5, 800);
    let osc = OscParams { grid: 300, bounds: None, mc_samples: 10_000, seed: 0 };
    let region = pm2.region.clone().unwrap();

    let mut g = c.benchmark_group("kernels");
    g.sample_size(10);
    for (label, workers) in [("pool", None), ("single", Some(1))] {
        g.bench_function(BenchmarkId::new("preimage_tree_d9", label), |b| {
            b.iter(|| {
                with_workers(workers, || {
                    PreimageTree::build(&f, Complex64::new(0.5, 2.5), 9, PruningPolicy::default(), Metric::Euclidean)
                        .unwrap()
                })
            })
        });
        g.bench_function(BenchmarkId::new("chaos_game_200k", label), |b| {
            b.iter(|| with_workers(workers, || approximate_julia(&f, &chaos).unwrap()))
        });
        g.bench_function(BenchmarkId::new("rasterize_800", label), |b| {
            b.iter(|| with_workers(workers, || rasterize(&cloud, &vp).unwrap()))
        });
        g.bench_function(BenchmarkId::new("osc_grid_300", label), |b| {
            b.iter(|| with_workers(workers, || check_osc(&f, &region, &osc).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
