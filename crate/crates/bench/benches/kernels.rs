use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use numrad_core::ando::{ando_factorize, WitnessOptions};
use numrad_core::blockforms::build_delta;
use numrad_core::certify::{fejer_riesz_scalar, TrigPolynomial};
use numrad_core::dilation::build_unitary_dilation;
use numrad_core::harness::{generate_corpus, CorpusSpec, Ensemble, Target};
use numrad_core::{c64, hermitian_eig, is_psd, numerical_radius, ComplexMatrix, DEFAULT_TOL};

fn sample(dim: usize, target: Target, value: f64) -> ComplexMatrix {
    let spec = CorpusSpec {
        seed: 0x5eed,
        count: 1,
        dim,
        target,
        target_value: value,
        ensemble: Ensemble::Ginibre,
    };
    generate_corpus(&spec).unwrap().remove(0)
}

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eig");
    for dim in [4, 8, 16, 32] {
        let h = sample(dim, Target::Norm, 1.0).hermitian_part();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &h, |b, h| {
            b.iter(|| hermitian_eig(black_box(h)).unwrap())
        });
    }
    group.finish();
}

fn radius(c: &mut Criterion) {
    let mut group = c.benchmark_group("numerical_radius");
    for dim in [2, 4, 8] {
        let a = sample(dim, Target::Radius, 1.0);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &a, |b, a| {
            b.iter(|| numerical_radius(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn delta_certificate(c: &mut Criterion) {
    let a = sample(4, Target::Radius, 0.9);
    let mut group = c.benchmark_group("delta_psd_d4");
    for n in [2, 8, 16] {
        let delta = build_delta(&a, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &delta, |b, m| {
            b.iter(|| is_psd(black_box(m), DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn ando(c: &mut Criterion) {
    let a = sample(4, Target::Radius, 0.95);
    let opts = WitnessOptions::default();
    c.bench_function("ando_factorize_d4", |b| {
        b.iter(|| ando_factorize(black_box(&a), &opts).unwrap())
    });
}

fn dilation(c: &mut Criterion) {
    let a = sample(4, Target::Norm, 0.9);
    c.bench_function("unitary_dilation_d4_h8", |b| {
        b.iter(|| build_unitary_dilation(black_box(&a), 8).unwrap())
    });
}

fn fejer_riesz(c: &mut Criterion) {
    let p: Vec<c64> = (0..8)
        .map(|k| c64::new(1.0 / (k as f64 + 1.0), 0.3 * k as f64))
        .collect();
    let q = TrigPolynomial::modulus_squared(&p).unwrap();
    c.bench_function("fejer_riesz_degree7", |b| {
        b.iter(|| fejer_riesz_scalar(black_box(&q)).unwrap())
    });
}

criterion_group!(
    benches,
    eigensolver,
    radius,
    delta_certificate,
    ando,
    dilation,
    fejer_riesz
);
criterion_main!(benches);
