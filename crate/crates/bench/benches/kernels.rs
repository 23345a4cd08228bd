use std::hint::black_box;
use std::sync::Arc;

use bernstein_core::normcalc::{build_slab_grid, lp_norm};
use bernstein_core::projector::{multiplier_apply_abelian, test_family};
use bernstein_core::spectral::kernel_eval;
use bernstein_core::{
    build_quadrature, BandlimitedFunction, ComplexPoint, ConvexBody, GroupElement, GroupPreset, SpectralDensity,
};
use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

fn heisenberg_function(order: usize) -> BandlimitedFunction {
    let spec = GroupPreset::Heisenberg.spec();
    let body = ConvexBody::interval(1.0, 2.0).unwrap();
    let quad = Arc::new(build_quadrature(&body, order).unwrap());
    let d = SpectralDensity::constant(quad, Complex64::new(1.0, 0.0)).unwrap();
    BandlimitedFunction::synthesize(&spec, &d).unwrap()
}

fn group_law(c: &mut Criterion) {
    let spec = GroupPreset::Example110b.spec();
    let g = GroupElement::new(vec![Complex64::new(0.3, -1.2), Complex64::new(0.7, 0.1)], vec![0.4, -2.0]);
    let h = GroupElement::new(vec![Complex64::new(-0.5, 0.9), Complex64::new(1.1, 0.2)], vec![1.5, 0.3]);
    c.bench_function("multiply_example110b", |b| b.iter(|| spec.multiply(black_box(&g), black_box(&h)).unwrap()));
}

fn evaluate(c: &mut Criterion) {
    let f = heisenberg_function(48);
    let g = GroupElement::new(vec![Complex64::new(0.3, -0.4)], vec![2.5]);
    c.bench_function("evaluate_slice_heisenberg_48", |b| b.iter(|| f.evaluate_slice(black_box(&g), &[0.2])));
}

fn grid_norm(c: &mut Criterion) {
    let f = heisenberg_function(48);
    let spec = GroupPreset::Heisenberg.spec();
    let grid = build_slab_grid(&spec, 4.0, 40.0, 16, 128, None).unwrap();
    let mut group = c.benchmark_group("lp_norm_heisenberg");
    group.sample_size(10);
    group.bench_function("p2_16x16x128", |b| b.iter(|| lp_norm(&f, &[0.0], 2.0, &grid).unwrap()));
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let spec = GroupPreset::Heisenberg.spec();
    let body = ConvexBody::interval(1.0, 2.0).unwrap();
    let quad = build_quadrature(&body, 48).unwrap();
    let p = ComplexPoint::new(vec![Complex64::new(0.2, 0.1)], vec![Complex64::new(0.5, 0.3)]);
    let q = ComplexPoint::new(vec![Complex64::new(-0.1, 0.4)], vec![Complex64::new(-1.0, 0.2)]);
    c.bench_function("kernel_eval_heisenberg", |b| {
        b.iter(|| kernel_eval(&spec, &body, black_box(&p), black_box(&q), &quad).unwrap())
    });
}

fn multiplier(c: &mut Criterion) {
    let body = ConvexBody::boxed(&[-1.0, -0.5], &[1.0, 1.5]).unwrap();
    let f = test_family(&[128, 128], &[20.0, 20.0], 1, 1).unwrap().remove(0);
    c.bench_function("multiplier_box_128x128", |b| b.iter(|| multiplier_apply_abelian(black_box(&f), &body).unwrap()));
}

criterion_group!(benches, group_law, evaluate, grid_norm, kernel, multiplier);
criterion_main!(benches);
