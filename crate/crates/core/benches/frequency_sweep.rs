use std::hint::black_box;

use ampqed::exec::Execution;
use ampqed::scenarios;
use ampqed::scene::Scene;
use ampqed::units::Constants;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn sweep(c: &mut Criterion) {
    let scene = Scene::new(
        scenarios::gain_slab_subthreshold(),
        scenarios::grid(),
        Constants::NATURAL,
    )
    .unwrap();
    let k = Constants::NATURAL;
    let mut group = c.benchmark_group("frequency_sweep");
    group.sample_size(10);
    for n in [8usize, 32] {
        let omegas: Vec<f64> = (0..n)
            .map(|i| 2.0 + 6.0 * i as f64 / (n - 1) as f64)
            .collect();
        for (name, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, n), &omegas, |b, w| {
                b.iter(|| {
                    let out = exec
                        .try_map(w, |&omega| {
                            let x = scene.sample(omega, None)?;
                            Ok(x.ee(&k).norm() + x.correction(&k).norm())
                        })
                        .unwrap();
                    black_box(out)
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
