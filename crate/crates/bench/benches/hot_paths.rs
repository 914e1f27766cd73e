use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use unanimity_core::capprob::{self, disk_segment_cap};
use unanimity_core::dynamics::run_trial;
use unanimity_core::election::voronoi_winner;
use unanimity_core::geometry::ConvexHull;
use unanimity_core::{seed, Domain};

fn hull(c: &mut Criterion) {
    let mut rng = seed::rng(1);
    let pts: Vec<_> = (0..64).map(|_| Domain::UnitDisk.sample(&mut rng)).collect();
    let base = ConvexHull::from_points(pts.iter().copied());
    let probes: Vec<_> = (0..1024)
        .map(|_| Domain::UnitDisk.sample(&mut rng))
        .collect();
    c.bench_function("hull_insert_disk_64", |b| {
        b.iter_batched(
            || base.clone(),
            |mut h| {
                for &p in &probes {
                    h.insert(p);
                }
                h
            },
            BatchSize::SmallInput,
        )
    });
    c.bench_function("voronoi_winner_disk_64", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 2) % probes.len();
            voronoi_winner(black_box(&base), probes[i], probes[i + 1])
        })
    });
}

fn trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_trial_10k");
    for domain in Domain::ALL {
        g.bench_function(domain.name(), |b| {
            b.iter(|| run_trial(domain, 10_000, 1, black_box(7)))
        });
    }
    g.finish();
}

fn estimators(c: &mut Criterion) {
    c.bench_function("phi_disk_100k", |b| {
        b.iter(|| capprob::phi(Domain::UnitDisk, 1e-4, 100_000, black_box(3)))
    });
    let cap = disk_segment_cap(0.125).unwrap();
    c.bench_function("event_in_cap_disk_100k", |b| {
        b.iter(|| capprob::acceptance_prob_event_in_cap(&cap, 100_000, black_box(5)))
    });
}

criterion_group!(benches, hull, trials, estimators);
criterion_main!(benches);
