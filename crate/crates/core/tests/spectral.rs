use std::sync::Arc;

use faer::Mat;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermolind::dissipators::{
    resolve_grouping, system_components, system_spectrum, BasisChoice, BuildOptions, GroupingPreset,
};
use thermolind::models::{Method, ModelKind, ModelSpec};
use thermolind::spectral::{
    build_thermo_hamiltonian_with, group_frequencies, thermo_residual, CouplingSpec, SetFrequencyPolicy, Spectrum,
    TOL_BOHR,
};
use thermolind::thermo::heat_current;
use thermolind::{ladder, number_operator, total_number, DensityMatrix, ModeLayout, Operator, C64};

fn model(kind: ModelKind, params: &[(&str, f64)]) -> ModelSpec {
    params.iter().fold(ModelSpec::default_for(kind), |m, &(k, v)| m.with(k, v).unwrap())
}

/// `H_TD` for a preset together with its residual and `‖[H_TD, H_S]‖`.
fn thermo_for(m: &ModelSpec, method: &Method) -> (Operator, f64, f64) {
    let sys = m.system(3).unwrap();
    let preset = m.grouping_preset(method).unwrap();
    let spectrum = system_spectrum(&sys, TOL_BOHR).unwrap();
    let comps = system_components(&spectrum, &sys, preset == GroupingPreset::SemiLocal).unwrap();
    let grouping = resolve_grouping(&preset, &comps).unwrap();
    let h_td = build_thermo_hamiltonian_with(&spectrum, &comps, &grouping, 1e-10).unwrap();
    let res = thermo_residual(&h_td, &comps, &grouping).unwrap();
    let comm = h_td.commutator(&sys.hamiltonian).unwrap().max_abs();
    (h_td, res, comm)
}

#[test]
fn normal_mode_weights_of_hot_coupling() {
    let (d, g) = (0.1, 0.2);
    let m = model(ModelKind::TwoModeBoson, &[("delta", d), ("g", g)]);
    let sys = m.system(3).unwrap();
    let spectrum = Spectrum::new(&sys.hamiltonian, TOL_BOHR).unwrap();
    let comps = spectrum.decompose(&sys.couplings[2], false).unwrap();
    assert_eq!(comps.len(), 2);
    let layout = sys.hamiltonian.layout();
    let (ac, ah) = (ladder(layout, 0).unwrap(), ladder(layout, 1).unwrap());
    let s = (d * d + g * g).sqrt();
    let norm2 = g * g + (s + d) * (s + d);
    for c in &comps {
        let (w, cross, own) = if c.frequency > 1.0 {
            (1.0 + s, g * (s + d) / norm2, (s + d) * (s + d) / norm2)
        } else {
            (1.0 - s, -g * (s + d) / norm2, g * g / norm2)
        };
        assert!((c.frequency - w).abs() < 1e-12);
        let want = Operator::linear_combination(&[(C64::new(cross, 0.0), &ac), (C64::new(own, 0.0), &ah)]).unwrap();
        assert!(c.operator.max_abs_diff(&want).unwrap() < 1e-12);
    }
}

#[test]
fn secular_grouping_keeps_system_hamiltonian() {
    let m = model(ModelKind::TwoModeBoson, &[("delta", 0.07), ("g", 0.05)]);
    let (h_td, res, _) = thermo_for(&m, &Method::Global);
    assert!(h_td.max_abs_diff(&m.system(3).unwrap().hamiltonian).unwrap() < 1e-12);
    assert!(res < 1e-12);
}

#[test]
fn local_grouping_gives_mean_frequency_times_number() {
    let m = model(ModelKind::TwoModeBoson, &[("delta", 0.07), ("g", 0.05)]);
    let (h_td, _, _) = thermo_for(&m, &Method::Local);
    let n = total_number(h_td.layout());
    assert!(h_td.max_abs_diff(&n).unwrap() < 1e-12);
}

#[test]
fn semilocal_interacting_dot_keeps_interaction() {
    let (w, u) = (2.5, 0.5);
    let m = model(ModelKind::InteractingDot, &[("g", 0.1)]);
    let (h_td, res, _) = thermo_for(&m, &Method::SemiLocal);
    let l = h_td.layout();
    let (nl, nr) = (number_operator(l, 0).unwrap(), number_operator(l, 1).unwrap());
    let want = Operator::linear_combination(&[
        (C64::new(w, 0.0), &total_number(l)),
        (C64::new(u, 0.0), &nl.try_mul(&nr).unwrap()),
    ])
    .unwrap();
    assert!(h_td.max_abs_diff(&want).unwrap() < 1e-12);
    assert!(res < 1e-12);
}

#[test]
fn constant_shift_of_thermo_hamiltonian_leaves_heat_unchanged() {
    let m = model(ModelKind::TwoModeBoson, &[("delta", 0.05), ("g", 0.04)]);
    let opts = BuildOptions { basis: BasisChoice::Full, ..Default::default() };
    let bundle = m.build(&Method::Local, 4, &opts).unwrap();
    let mut shifted = bundle.clone();
    for ch in &mut shifted.baths {
        let id = Operator::identity(ch.thermo_hamiltonian.layout());
        ch.thermo_hamiltonian = ch.thermo_hamiltonian.try_add(&id.scale_real(3.7)).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = DensityMatrix::random(bundle.hamiltonian.layout(), &mut rng);
    for id in ["c", "h"] {
        let a = heat_current(&bundle, id, &rho).unwrap();
        let b = heat_current(&shifted, id, &rho).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1e-3), "{id}: {a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bohr_components_are_complete(seed in any::<u64>(), nmodes in 1usize..4) {
        let layout = Arc::new(ModeLayout::fermions(nmodes).unwrap());
        let d = layout.total_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let h = Operator::from_matrix(layout.clone(), Mat::from_fn(d, d, |_, _| c())).unwrap().hermitian_part();
        let s = Operator::from_matrix(layout.clone(), Mat::from_fn(d, d, |_, _| c())).unwrap();
        let spectrum = Spectrum::new(&h, TOL_BOHR).unwrap();
        let comps = spectrum.decompose(&CouplingSpec::new("b", -1, s.clone(), 1), false).unwrap();
        let mut sum = Operator::zeros(&layout);
        for comp in &comps {
            let r = comp.operator.commutator(&h).unwrap().max_abs_diff(&comp.operator.scale_real(comp.frequency)).unwrap();
            prop_assert!(r <= 1e-10, "Bohr relation off by {r}");
            sum = sum.try_add(&comp.operator).unwrap();
        }
        prop_assert!(sum.max_abs_diff(&s).unwrap() <= 1e-10 * s.max_abs());
    }

    #[test]
    fn thermo_hamiltonian_commutes_with_system(
        kind in prop::sample::select(vec![ModelKind::TwoModeBoson, ModelKind::DoubleDot, ModelKind::InteractingDot]),
        method in prop::sample::select(vec![Method::Global, Method::Local, Method::SemiLocal]),
        g in 0.01f64..0.3,
        x in -0.2f64..0.2,
    ) {
        let m = match kind {
            ModelKind::InteractingDot => model(kind, &[("g", g), ("u", x.abs() * 4.0)]),
            _ => model(kind, &[("g", g), ("delta", x)]),
        };
        let (_, res, comm) = thermo_for(&m, &method);
        prop_assert!(res <= 1e-10, "residual {res}");
        prop_assert!(comm <= 1e-10, "commutator {comm}");
    }

    #[test]
    fn clustering_partitions_frequencies(freqs in prop::collection::vec(0.1f64..5.0, 1..12), eps in 0.01f64..0.5) {
        let grouping = match group_frequencies(&freqs, eps, 0.0, &SetFrequencyPolicy::Mean) {
            Ok(g) => g,
            Err(_) => {
                // rejected only when a single-linkage chain is wider than ε
                let mut f = freqs.clone();
                f.sort_by(f64::total_cmp);
                let mut start = f[0];
                let mut widest = 0.0f64;
                for w in f.windows(2) {
                    if w[1] - w[0] > eps {
                        start = w[1];
                    }
                    widest = widest.max(w[1] - start);
                }
                prop_assert!(widest > eps);
                return Ok(());
            }
        };
        for w in &freqs {
            let hits = grouping.sets.iter().filter(|s| s.members.iter().any(|m| (m.frequency - w).abs() <= 1e-12 * w)).count();
            prop_assert_eq!(hits, 1);
        }
        for pair in grouping.sets.windows(2) {
            let lo = pair[0].members.iter().map(|m| m.frequency).fold(f64::MIN, f64::max);
            let hi = pair[1].members.iter().map(|m| m.frequency).fold(f64::MAX, f64::min);
            prop_assert!(hi - lo > eps);
        }
        for s in &grouping.sets {
            prop_assert!(s.spread() <= eps);
            let lo = s.members.iter().map(|m| m.frequency).fold(f64::MAX, f64::min);
            let hi = s.members.iter().map(|m| m.frequency).fold(f64::MIN, f64::max);
            prop_assert!(s.frequency >= lo - 1e-12 && s.frequency <= hi + 1e-12);
        }
    }
}
