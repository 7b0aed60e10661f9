use std::hint::black_box;

use coopgame::abm::{estimate_roles, estimate_single_locus, evolve_population};
use coopgame::analytics::{equilibrium_roles, threshold_curve_single};
use coopgame::dynamics::{fixed_points, integrate, vector_field, TwoLocus};
use coopgame::strategy::play_match;
use coopgame::{Genome, Mode, PairingModel, PayoffMatrix, PopulationConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn closed_forms(c: &mut Criterion) {
    let m = PayoffMatrix::canonical();
    c.bench_function("threshold_curve_single/1001", |b| {
        b.iter(|| threshold_curve_single(black_box(&m), 1001).unwrap())
    });
    c.bench_function("equilibrium_roles", |b| {
        b.iter(|| equilibrium_roles(black_box(&m), black_box(5.0 / 12.0)).unwrap())
    });
}

fn matches(c: &mut Criterion) {
    let m = PayoffMatrix::canonical();
    c.bench_function("play_match/all_pairs", |b| {
        b.iter(|| {
            let mut total = 0.0;
            for g1 in Genome::all() {
                for g2 in Genome::all() {
                    total += play_match(&g1, &g2, &m).mean_payoffs.0;
                }
            }
            total
        })
    });
}

fn dynamics(c: &mut Criterion) {
    let sys = TwoLocus::new(PayoffMatrix::canonical(), 5.0 / 12.0).unwrap();
    c.bench_function("integrate/two_locus/t200", |b| {
        b.iter(|| integrate(&sys, black_box([0.9, 0.1]), 0.01, 200.0).unwrap())
    });
    c.bench_function("vector_field/21", |b| b.iter(|| vector_field(&sys, 21).unwrap()));
    c.bench_function("fixed_points", |b| {
        b.iter(|| fixed_points(&PayoffMatrix::canonical(), black_box(5.0 / 12.0)).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let m = PayoffMatrix::canonical();
    let pairing = PairingModel::new(5.0 / 12.0, 3.0 / 7.0).unwrap();
    c.bench_function("estimate_single_locus/1e4", |b| {
        b.iter(|| estimate_single_locus(&m, &pairing, 10_000, black_box(1)).unwrap())
    });
    c.bench_function("estimate_roles/1e4", |b| {
        b.iter(|| estimate_roles(&m, 5.0 / 12.0, 8.0 / 17.0, 10_000, black_box(1)).unwrap())
    });
    let cfg = PopulationConfig {
        size: 10_000,
        initial: vec![0.9, 0.1],
        r: 5.0 / 12.0,
        generations: 1000,
        seed: 1,
        fitness_shift: None,
    };
    c.bench_function("evolve_population/roles/1000", |b| {
        b.iter(|| evolve_population(&cfg, &m, Mode::Roles).unwrap())
    });
}

criterion_group!(benches, closed_forms, matches, dynamics, monte_carlo);
criterion_main!(benches);
