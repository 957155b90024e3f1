use proptest::prelude::*;
use thermolind::dissipators::{BasisChoice, BuildOptions, GeneratorBundle};
use thermolind::ladder;
use thermolind::models::{Method, ModelKind, ModelSpec};
use thermolind::solvers::assemble_liouvillian;
use thermolind::thermo::gibbs_state;

fn full() -> BuildOptions {
    BuildOptions { basis: BasisChoice::Full, ..Default::default() }
}

fn two_mode(delta: f64, g: f64) -> ModelSpec {
    ModelSpec::default_for(ModelKind::TwoModeBoson).with("delta", delta).unwrap().with("g", g).unwrap()
}

/// Largest `‖L_α ρ_G^α‖` with `ρ_G^α` built from `h` at bath α's temperature.
fn gibbs_violation(bundle: &GeneratorBundle, use_system_h: bool) -> f64 {
    bundle
        .baths
        .iter()
        .map(|ch| {
            let h = if use_system_h { &bundle.hamiltonian } else { &ch.thermo_hamiltonian };
            let rho = gibbs_state(h, &ch.bath, &bundle.number).unwrap();
            ch.dissipator.apply(rho.op()).unwrap().norm_fro()
        })
        .fold(0.0, f64::max)
}

fn generator_gap(a: &ModelSpec, ma: &Method, b: &ModelSpec, mb: &Method, cutoff: usize) -> f64 {
    let la = assemble_liouvillian(&a.build(ma, cutoff, &full()).unwrap()).unwrap();
    let lb = assemble_liouvillian(&b.build(mb, cutoff, &full()).unwrap()).unwrap();
    la.max_abs_diff(&lb).unwrap()
}

#[test]
fn perlind_misses_the_gibbs_fixed_point() {
    let m = two_mode(0.0, 0.02);
    let perlind = m.build(&Method::PerLind, 4, &full()).unwrap();
    assert!(gibbs_violation(&perlind, true) > 1e-8);
    let global = m.build(&Method::Global, 4, &full()).unwrap();
    assert!(gibbs_violation(&global, false) < 1e-12);
}

#[test]
fn conventional_local_is_local_at_resonance() {
    let m = two_mode(0.0, 0.05);
    assert!(generator_gap(&m, &Method::ConventionalLocal, &m, &Method::Local, 4) < 1e-12);
    let m = ModelSpec::default_for(ModelKind::DoubleDot).with("g", 0.2).unwrap();
    assert!(generator_gap(&m, &Method::ConventionalLocal, &m, &Method::Local, 1) < 1e-12);
}

#[test]
fn all_approaches_agree_for_uncoupled_degenerate_modes() {
    let m = two_mode(0.0, 0.0);
    for method in [Method::Local, Method::SemiLocal, Method::ConventionalLocal, Method::PerLind] {
        assert!(generator_gap(&m, &Method::Global, &m, &method, 4) < 1e-12, "{method}");
    }
}

#[test]
fn local_jumps_are_bare_modes() {
    let m = two_mode(0.06, 0.04);
    let b = m.build(&Method::Local, 4, &full()).unwrap();
    let layout = b.hamiltonian.layout();
    for (k, id) in ["c", "h"].into_iter().enumerate() {
        let ch = b.bath(id).unwrap();
        assert_eq!(ch.jumps.len(), 2);
        let em = &ch.jumps[0];
        assert!(em.operator.max_abs_diff(&ladder(layout, k).unwrap()).unwrap() < 1e-12);
        // set frequency is the mean of Ω̄ ± √(Δ² + g²)
        assert!((em.frequency - 1.0).abs() < 1e-12);
    }
}

#[test]
fn dissipators_are_trace_preserving() {
    for kind in [ModelKind::TwoModeBoson, ModelKind::DoubleDot, ModelKind::DrivenBoson, ModelKind::InteractingDot] {
        let m = ModelSpec::default_for(kind);
        for method in [Method::Global, Method::Local, Method::SemiLocal, Method::PerLind] {
            let b = m.build(&method, 4, &full()).unwrap();
            for ch in &b.baths {
                assert!(ch.dissipator.trace_preservation_residual() < 1e-12, "{kind:?} {method}");
            }
            assert!(b.hamiltonian_part.trace_preservation_residual() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unified_generators_fix_each_bath_gibbs_state(
        kind in prop::sample::select(vec![ModelKind::TwoModeBoson, ModelKind::DoubleDot, ModelKind::InteractingDot]),
        method in prop::sample::select(vec![Method::Global, Method::Local, Method::SemiLocal]),
        g in 0.005f64..0.3,
        x in -0.15f64..0.15,
    ) {
        let m = ModelSpec::default_for(kind).with("g", g).unwrap();
        let m = if kind == ModelKind::InteractingDot { m.with("u", 2.0 * x.abs()).unwrap() } else { m.with("delta", x).unwrap() };
        let b = m.build(&method, 4, &full()).unwrap();
        prop_assert!(gibbs_violation(&b, false) <= 1e-10);
    }

    #[test]
    fn conventional_local_matches_local_without_detuning(g in 0.001f64..0.3, kc in 0.005f64..0.05, tc in 0.2f64..1.0) {
        let m = two_mode(0.0, g).with("kappa_c", kc).unwrap().with("t_c", tc).unwrap();
        prop_assert!(generator_gap(&m, &Method::ConventionalLocal, &m, &Method::Local, 3) < 1e-12);
    }
}
