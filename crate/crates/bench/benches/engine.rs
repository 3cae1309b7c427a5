use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use steane_sm::code::perfect_final_sm_ensemble;
use steane_sm::exec::Executor;
use steane_sm::experiment::{run_trajectory, Plan, Targets};
use steane_sm::logical::{apply_logical_t, DEFAULT_SEQUENCE};
use steane_sm::noise::ErrorEnvironment;
use steane_sm::sm::{run_sm, SmProtocol};
use steane_sm::{Basis, Gate, Role};
use steane_sm_bench::data_block;

fn gates(c: &mut Criterion) {
    let mut g = c.benchmark_group("gate");
    for n in [7usize, 14, 21] {
        let roles: Vec<Role> = (0..n as u32).map(Role::Ancilla).collect();
        let mut state = steane_sm::QuantumState::product(&roles, &vec![Basis::Plus; n]).unwrap();
        g.bench_with_input(BenchmarkId::new("cnot", n), &n, |b, &n| {
            b.iter(|| state.apply_gate(black_box(Gate::Cnot { control: 0, target: n - 1 })).unwrap())
        });
    }
    g.finish();
}

fn sm_rounds(c: &mut Criterion) {
    let mut g = c.benchmark_group("sm_round");
    for protocol in SmProtocol::ALL {
        g.bench_function(protocol.name(), |b| {
            b.iter(|| {
                let mut state = data_block();
                let mut exec = Executor::noiseless(1);
                run_sm(protocol, &mut state, &mut exec).unwrap()
            })
        });
    }
    g.finish();
}

fn gadgets(c: &mut Criterion) {
    c.bench_function("logical_t", |b| {
        b.iter(|| {
            let mut state = data_block();
            let mut exec = Executor::noiseless(1);
            apply_logical_t(&mut state, &mut exec, false).unwrap()
        })
    });
    let block = data_block();
    c.bench_function("perfect_final_sm", |b| b.iter(|| perfect_final_sm_ensemble(black_box(&block)).unwrap()));
}

fn trajectories(c: &mut Criterion) {
    let mut g = c.benchmark_group("trajectory");
    g.sample_size(10);
    let targets = Targets::new(DEFAULT_SEQUENCE, 0.0, 0.0).unwrap();
    let env = ErrorEnvironment::depolarizing(1e-3).unwrap();
    for (protocol, q) in [(SmProtocol::SINGLE, 1), (SmProtocol::STEANE, 50), (SmProtocol::SHOR, 50)] {
        let plan = Plan::build(DEFAULT_SEQUENCE, q, protocol, false).unwrap();
        let mut t = 0u64;
        g.bench_function(format!("{protocol}_q{q}"), |b| {
            b.iter(|| {
                t += 1;
                run_trajectory(&plan, &targets, env, 1, t).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, gates, sm_rounds, gadgets, trajectories);
criterion_main!(benches);
