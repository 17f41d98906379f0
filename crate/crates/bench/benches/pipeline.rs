use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use radpol::bench_sim::{full_bench, noisy_readout, reconstruct, NoiseSpec, Sample};
use radpol::fields::{render, render_decomposition, Decomposition, Grid};
use radpol::polarimetry::{conventional_probe_set, conventional_reconstruct, mueller_from_jones, single_shot_mueller};
use radpol::states::radial_beam;
use radpol_bench::passive_samples;

fn reconstruction(c: &mut Criterion) {
    let samples = passive_samples(256, 1);
    let probes = conventional_probe_set();
    let mut g = c.benchmark_group("reconstruct_256");
    g.bench_function("oracle", |b| {
        b.iter(|| {
            samples.iter().for_each(|t| {
                black_box(mueller_from_jones(black_box(t)));
            })
        })
    });
    g.bench_function("conventional", |b| {
        b.iter(|| {
            samples.iter().for_each(|t| {
                black_box(conventional_reconstruct(black_box(t), &probes).unwrap());
            })
        })
    });
    g.bench_function("single_shot_algebra", |b| {
        b.iter(|| {
            samples.iter().for_each(|t| {
                black_box(single_shot_mueller(black_box(t)));
            })
        })
    });
    g.bench_function("full_bench", |b| {
        b.iter(|| {
            samples.iter().for_each(|t| {
                black_box(reconstruct(&full_bench(&Sample::Jones(*black_box(t)))).unwrap());
            })
        })
    });
    g.finish();
}

fn noise(c: &mut Criterion) {
    let d = full_bench(&Sample::Jones(passive_samples(1, 2)[0]));
    let spec = NoiseSpec {
        sigma_rel: 1e-3,
        dark: 0.0,
        photons: Some(1e6),
    };
    let mut seed = 0u64;
    c.bench_function("noisy_readout", |b| {
        b.iter(|| {
            seed += 1;
            noisy_readout(black_box(&d), &spec, seed).unwrap()
        })
    });
}

fn fields(c: &mut Criterion) {
    let grid = Grid::square(256, 3.0).unwrap();
    let mut g = c.benchmark_group("render_256");
    g.sample_size(20);
    g.bench_function("radial", |b| b.iter(|| render(black_box(&radial_beam()), &grid)));
    g.bench_function("circular_decomposition", |b| {
        b.iter(|| render_decomposition(black_box(Decomposition::Circular), &grid))
    });
    g.finish();
}

criterion_group!(benches, reconstruction, noise, fields);
criterion_main!(benches);
