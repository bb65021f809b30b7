use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use toposim_bench::{lattice, molecule, ry_all_target, sector, spread_state, waveform};
use toposim_core::adiabatic::{run_exact_sweep, trotter_step, Schedule, DEFAULT_STEPS, DEFAULT_TOTAL_TIME};
use toposim_core::nmr::{compile_trotter_step, fidelity_and_gradient, sequence_unitary, GradientMode};
use toposim_core::tomography::{default_plan, reconstruct, simulate_plan};
use toposim_core::wen::{ground_state_superposition, plaquette_operator};
use toposim_core::{apply_pauli, StateVector};

fn pauli(c: &mut Criterion) {
    let mut g = c.benchmark_group("apply_pauli");
    for side in [2, 4] {
        let lat = lattice(side);
        let p = plaquette_operator(&lat, 0).unwrap();
        let psi = spread_state(lat.n_sites());
        g.bench_with_input(BenchmarkId::from_parameter(lat.n_sites()), &psi, |b, psi| {
            b.iter(|| apply_pauli(black_box(&p), psi).unwrap())
        });
    }
    g.finish();
}

fn states(c: &mut Criterion) {
    let lat = lattice(4);
    c.bench_function("ground_state_superposition/16", |b| {
        b.iter(|| ground_state_superposition(black_box(&lat)).unwrap())
    });
    let psi = spread_state(16);
    c.bench_function("trotter_step/16", |b| b.iter(|| trotter_step(&lat, 0.5, black_box(0.1), &psi).unwrap()));
}

fn sweep(c: &mut Criterion) {
    let lat = lattice(2);
    let schedule = Schedule::linear(DEFAULT_STEPS, DEFAULT_TOTAL_TIME).unwrap();
    let psi0 = StateVector::zero(4).unwrap();
    c.bench_function("exact_sweep/M7", |b| b.iter(|| run_exact_sweep(&lat, &schedule, black_box(&psi0)).unwrap()));
}

fn pulses(c: &mut Criterion) {
    let mol = molecule();
    c.bench_function("compile_trotter_step+unitary", |b| {
        b.iter(|| {
            let seq = compile_trotter_step(&mol, black_box(0.5), 0.4).unwrap();
            sequence_unitary(&mol, &seq).unwrap()
        })
    });
    let target = ry_all_target();
    let wf = waveform();
    let mut g = c.benchmark_group("grape_gradient");
    g.sample_size(20);
    for mode in [GradientMode::Exact, GradientMode::FirstOrder] {
        g.bench_function(format!("{mode:?}"), |b| {
            b.iter(|| fidelity_and_gradient(&mol, &target, black_box(&wf), mode).unwrap())
        });
    }
    g.finish();
}

fn tomography(c: &mut Criterion) {
    let plan = default_plan();
    let psi = sector(2, 1, 1);
    c.bench_function("simulate_plan/noisy", |b| {
        b.iter(|| simulate_plan(&psi, &plan, 0.015, black_box(7)).unwrap())
    });
    let recs = simulate_plan(&psi, &plan, 0.015, 7).unwrap();
    c.bench_function("reconstruct/psd", |b| b.iter(|| reconstruct(black_box(&recs), &plan, true).unwrap()));
}

criterion_group!(benches, pauli, states, sweep, pulses, tomography);
criterion_main!(benches);
