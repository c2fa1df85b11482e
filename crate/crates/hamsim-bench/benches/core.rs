use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hamsim_core::dynamics::{fidelity_from_eigs, StateVector};
use hamsim_core::models::{heisenberg_xxx, zzz_field_target, CouplingConvention};
use hamsim_core::optimize::{diameter_objective, SimulatorAnsatz};
use hamsim_core::pauli::{commutator, z_chain_target, Geometry, Letter, PauliOperator, PauliString};
use hamsim_core::spectral::eigensystem;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_operator(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> PauliOperator {
    let mut op = PauliOperator::zero(n);
    for _ in 0..terms {
        let letters: Vec<Letter> = (0..n)
            .map(|_| *[Letter::I, Letter::X, Letter::Y, Letter::Z].choose(rng).unwrap())
            .collect();
        let s = PauliString::from_letters(letters);
        if !s.is_identity() {
            op.add_term(s, rng.gen_range(-1.0..1.0)).unwrap();
        }
    }
    op
}

fn bench_commutator(c: &mut Criterion) {
    let ht = zzz_field_target(6, 1.0, 1.0, CouplingConvention::Pauli).unwrap();
    let hqs = heisenberg_xxx(6, 0.7, CouplingConvention::Pauli).unwrap();
    c.bench_function("commutator_6_site_toy_pair", |b| {
        b.iter(|| commutator(black_box(&ht), black_box(&hqs)).unwrap())
    });
}

fn bench_eigensystem(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let op = random_operator(5, 12, &mut rng);
    c.bench_function("eigensystem_32_dim", |b| {
        b.iter(|| eigensystem(black_box(&op)).unwrap())
    });
}

fn bench_fidelity(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_operator(4, 8, &mut rng);
    let b_op = random_operator(4, 8, &mut rng);
    let es_a = eigensystem(&a).unwrap();
    let es_b = eigensystem(&b_op).unwrap();
    let psi = StateVector::haar(16, &mut rng);
    c.bench_function("fidelity_16_dim", |b| {
        b.iter(|| fidelity_from_eigs(&es_a, &es_b, black_box(&psi), black_box(1.3)).unwrap())
    });
}

fn bench_diameter_objective(c: &mut Criterion) {
    let target = z_chain_target(5, 3, true).unwrap();
    let ansatz = SimulatorAnsatz::without_floor(5, 2, Geometry::ChainPeriodic).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let coeffs: Vec<f64> = (0..ansatz.generators().len())
        .map(|_| rng.gen_range(-0.2..0.2))
        .collect();
    c.bench_function("diameter_objective_5_site", |b| {
        b.iter(|| diameter_objective(black_box(&target), &ansatz, black_box(&coeffs)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_commutator,
    bench_eigensystem,
    bench_fidelity,
    bench_diameter_objective
);
criterion_main!(benches);
