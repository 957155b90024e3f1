#![allow(clippy::excessive_precision)]

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermolind::baths::BathSpec;
use thermolind::dissipators::{BasisChoice, BuildOptions};
use thermolind::models::{analytic_reference, Method, ModelKind, ModelSpec, SolveOptions};
use thermolind::solvers::{assemble_liouvillian, steady_state};
use thermolind::thermo::{entropy_production_rate, gibbs_state, internal_energy, thermo_report};
use thermolind::{number_operator, total_number, DensityMatrix, ModeLayout};

fn full() -> BuildOptions {
    BuildOptions { basis: BasisChoice::Full, ..Default::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn thermal_mode_energy() {
    let layout = Arc::new(ModeLayout::bosons(1, 80).unwrap());
    let h = number_operator(&layout, 0).unwrap();
    let bath = BathSpec::bose("h", 1.0, 0.02).unwrap();
    let rho = gibbs_state(&h, &bath, &total_number(&layout)).unwrap();
    // Ω n_B(Ω) at Ω = T, from mpmath
    assert!((internal_energy(&h, &rho).unwrap() - 0.58197670686932642439).abs() < 1e-13);
    let vacuum = DensityMatrix::basis_state(&layout, 0).unwrap();
    assert_eq!(internal_energy(&h, &vacuum).unwrap(), 0.0);
}

#[test]
fn local_energy_counts_quanta_at_the_mean_frequency() {
    let m = ModelSpec::default_for(ModelKind::TwoModeBoson).with("delta", 0.05).unwrap().with("g", 0.1).unwrap();
    let b = m.build(&Method::Local, 4, &full()).unwrap();
    let layout = b.hamiltonian.layout().clone();
    let rho = DensityMatrix::basis_state(&layout, layout.index_of(&[1, 1]).unwrap()).unwrap();
    let u = internal_energy(b.common_thermo_hamiltonian().unwrap(), &rho).unwrap();
    assert!((u - 2.0).abs() < 1e-12);
}

#[test]
fn passive_bosonic_models_produce_no_power() {
    let m = ModelSpec::default_for(ModelKind::TwoModeBoson).with("g", 0.1).unwrap();
    for method in [Method::Local, Method::Global, Method::ConventionalLocal] {
        let r = m.solve(&method, &SolveOptions::default()).unwrap().report;
        assert!(r.output_power.abs() < 1e-15 * r.heat("h").unwrap().abs().max(1.0), "{method}");
        assert_eq!(r.efficiency, None);
    }
}

#[test]
fn driven_power_follows_the_bookkeeping() {
    let m = ModelSpec::default_for(ModelKind::DrivenBoson).with("delta", 0.02).unwrap();
    let (wc, wh) = match &m {
        ModelSpec::DrivenBoson(p) => p.local_frequencies(),
        _ => unreachable!(),
    };
    let local = m.solve(&Method::Local, &SolveOptions::default()).unwrap().report;
    let jh = local.heat("h").unwrap();
    assert!(rel(local.output_power, (1.0 - wc / wh) * jh) < 1e-10);
    let global = m.solve(&Method::Global, &SolveOptions::default()).unwrap().report;
    let sum = global.heat("h").unwrap() + global.heat("c").unwrap();
    assert!(rel(global.output_power, sum) < 1e-12);
    assert_eq!(global.external_power, None);
}

#[test]
fn gibbs_state_produces_no_entropy() {
    let m = ModelSpec::default_for(ModelKind::DoubleDot).at_equilibrium();
    for method in [Method::Global, Method::Local] {
        let b = m.build(&method, 1, &full()).unwrap();
        let rho = gibbs_state(b.common_thermo_hamiltonian().unwrap(), &b.baths[0].bath, &b.number).unwrap();
        let (s, _) = entropy_production_rate(&b, &rho).unwrap();
        assert!(s.abs() < 1e-12, "{method}: {s}");
    }
}

#[test]
fn steady_entropy_production_is_the_heat_flux_balance() {
    let m = ModelSpec::default_for(ModelKind::TwoModeBoson).with("g", 0.1).unwrap();
    let b = m.build(&Method::Local, 10, &full()).unwrap();
    let ss = steady_state(&assemble_liouvillian(&b).unwrap(), 1e-12).unwrap();
    let r = thermo_report(&b, &ss.rho, Some("h")).unwrap();
    let (tc, th) = (m.get("t_c").unwrap(), m.get("t_h").unwrap());
    let j = r.heat("h").unwrap();
    let flux = j * (1.0 / tc - 1.0 / th);
    assert!(flux > 0.0);
    assert!((r.entropy_production - flux).abs() < 1e-10 * flux);
    assert!((r.heat("c").unwrap() + j).abs() < 1e-12);
}

#[test]
fn conventional_local_flux_balance_turns_negative() {
    let m = ModelSpec::default_for(ModelKind::TwoModeBoson).with("g", 0.1).unwrap().with("delta", 0.2).unwrap();
    let r = analytic_reference(&m, &Method::ConventionalLocal).unwrap();
    let (tc, th) = (m.get("t_c").unwrap(), m.get("t_h").unwrap());
    assert!(-(r.heat[0] / tc + r.heat[1] / th) < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn second_law_on_random_states(
        kind in prop::sample::select(vec![ModelKind::TwoModeBoson, ModelKind::DoubleDot, ModelKind::DrivenBoson, ModelKind::InteractingDot]),
        method in prop::sample::select(vec![Method::Global, Method::Local, Method::SemiLocal]),
        g in 0.01f64..0.2,
        seed in any::<u64>(),
    ) {
        let m = ModelSpec::default_for(kind).with("g", g).unwrap();
        let b = m.build(&method, 3, &full()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let rho = DensityMatrix::random(b.hamiltonian.layout(), &mut rng);
            let (s, bound) = entropy_production_rate(&b, &rho).unwrap();
            prop_assert!(s >= -1e-12 - bound, "Σ̇ = {s}");
        }
    }

    #[test]
    fn first_law_holds_on_random_states(
        kind in prop::sample::select(vec![ModelKind::TwoModeBoson, ModelKind::DoubleDot, ModelKind::InteractingDot]),
        method in prop::sample::select(vec![Method::Global, Method::Local, Method::SemiLocal]),
        g in 0.01f64..0.2,
        seed in any::<u64>(),
    ) {
        let m = ModelSpec::default_for(kind).with("g", g).unwrap();
        let b = m.build(&method, 3, &full()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = DensityMatrix::random(b.hamiltonian.layout(), &mut rng);
        let r = thermo_report(&b, &rho, None).unwrap();
        let scale = r.baths.iter().map(|x| x.heat.abs()).fold(1e-300, f64::max);
        prop_assert!(r.first_law_residual.unwrap() <= 1e-10 * scale);
    }
}
