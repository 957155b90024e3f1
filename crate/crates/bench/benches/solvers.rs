use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use thermolind::dissipators::{resolve_grouping, system_components, system_spectrum, BuildOptions};
use thermolind::models::{Method, ModelKind, ModelSpec, SolveOptions};
use thermolind::solvers::{assemble_liouvillian, steady_state};
use thermolind::spectral::TOL_BOHR;

fn two_mode() -> ModelSpec {
    ModelSpec::default_for(ModelKind::TwoModeBoson).with("g", 0.1).unwrap().with("delta", 0.05).unwrap()
}

fn steady(c: &mut Criterion) {
    let mut group = c.benchmark_group("steady_state");
    for cutoff in [8, 16] {
        let l = assemble_liouvillian(&two_mode().build(&Method::Global, cutoff, &BuildOptions::default()).unwrap())
            .unwrap();
        group.bench_function(format!("two_mode_global_n{cutoff}"), |b| {
            b.iter(|| steady_state(black_box(&l), 1e-10).unwrap())
        });
    }
    group.finish();
}

fn build(c: &mut Criterion) {
    let m = two_mode();
    c.bench_function("build/two_mode_local_n16", |b| {
        b.iter(|| m.build(black_box(&Method::Local), 16, &BuildOptions::default()).unwrap())
    });
    let sys = m.system(16).unwrap();
    c.bench_function("bohr_and_grouping/two_mode_n16", |b| {
        b.iter(|| {
            let s = system_spectrum(black_box(&sys), TOL_BOHR).unwrap();
            let comps = system_components(&s, &sys, false).unwrap();
            resolve_grouping(&m.grouping_preset(&Method::Local).unwrap(), &comps).unwrap()
        })
    });
}

fn moments_and_landauer(c: &mut Criterion) {
    let opts = SolveOptions::default();
    let m = two_mode();
    c.bench_function("moments/two_mode_global", |b| b.iter(|| m.solve(black_box(&Method::Global), &opts).unwrap()));
    let dot = ModelSpec::default_for(ModelKind::DoubleDot).with("g", 0.3).unwrap();
    c.bench_function("landauer/double_dot", |b| b.iter(|| dot.solve(black_box(&Method::Transmission), &opts).unwrap()));
    c.bench_function("landauer/two_mode", |b| b.iter(|| m.solve(black_box(&Method::Transmission), &opts).unwrap()));
}

criterion_group!(benches, steady, build, moments_and_landauer);
criterion_main!(benches);
