use std::sync::Arc;

use proptest::prelude::*;
use thermolind::dissipators::{lindblad_d, BasisChoice, BuildOptions};
use thermolind::models::{analytic_reference, figure, BosonSolver, Method, ModelKind, ModelSpec, SolveOptions};
use thermolind::solvers::{assemble_liouvillian, evolve, steady_state, EvolveOptions};
use thermolind::thermo::{gibbs_state, heat_current};
use thermolind::{ladder, number_operator, DensityMatrix, ModeLayout, Superoperator, VecBasis, C64};

fn full() -> BuildOptions {
    BuildOptions { basis: BasisChoice::Full, ..Default::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// `−i[ωn, ·] + κ D[a]` for one mode truncated at `n_max` quanta.
fn damped_mode(omega: f64, kappa: f64, n_max: usize) -> (Arc<ModeLayout>, Superoperator) {
    let layout = Arc::new(ModeLayout::bosons(1, n_max).unwrap());
    let basis = Arc::new(VecBasis::full(layout.total_dim()));
    let h = number_operator(&layout, 0).unwrap().scale_real(omega);
    let coherent = Superoperator::hamiltonian(&h, &basis).unwrap();
    let damping = lindblad_d(&ladder(&layout, 0).unwrap(), &basis).unwrap();
    let l = Superoperator::linear_combination(&[(C64::new(1.0, 0.0), &coherent), (C64::new(kappa, 0.0), &damping)])
        .unwrap();
    (layout, l)
}

fn zero_modes(l: &Superoperator) -> (usize, Vec<C64>) {
    let ev: Vec<C64> = l.to_dense().eigenvalues().unwrap().into_iter().map(|z| C64::new(z.re, z.im)).collect();
    (ev.iter().filter(|z| z.norm() < 1e-10).count(), ev)
}

#[test]
fn damped_mode_spectrum() {
    let (_, l) = damped_mode(1.0, 0.02, 4);
    let (zeros, ev) = zero_modes(&l);
    assert_eq!(zeros, 1);
    // the coherence ⟨0|ρ|1⟩ decays at κ/2
    assert!(ev.iter().any(|z| (z.re + 0.01).abs() < 1e-10 && (z.im.abs() - 1.0).abs() < 1e-10), "{ev:?}");
    assert!(ev.iter().all(|z| z.re <= 1e-12));
}

#[test]
fn single_quantum_decays_exponentially() {
    let kappa = 0.3;
    let (layout, l) = damped_mode(1.0, kappa, 3);
    let one = layout.index_of(&[1]).unwrap();
    let rho0 = DensityMatrix::basis_state(&layout, one).unwrap();
    let times = [0.5, 1.0, 2.0, 5.0];
    let opts = EvolveOptions { tol_step: 1e-12, ..Default::default() };
    let tr = evolve(&l, &rho0, &times, &opts).unwrap();
    let n = number_operator(&layout, 0).unwrap();
    for (t, rho) in times.iter().zip(&tr.states) {
        assert!((rho.expect(&n).unwrap() - (-kappa * t).exp()).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn coupled_modes_have_a_unique_steady_state() {
    let m = ModelSpec::default_for(ModelKind::TwoModeBoson);
    for method in [Method::Global, Method::Local, Method::ConventionalLocal, Method::PerLind] {
        let l = assemble_liouvillian(&m.build(&method, 3, &full()).unwrap()).unwrap();
        assert_eq!(zero_modes(&l).0, 1, "{method}");
    }
}

#[test]
fn trajectories_stay_physical() {
    let m = ModelSpec::default_for(ModelKind::TwoModeBoson).with("g", 0.1).unwrap();
    let layout = m.system(4).unwrap().hamiltonian.layout().clone();
    let start = layout.index_of(&[0, 3]).unwrap();
    for method in [Method::Global, Method::Local, Method::PerLind] {
        let l = assemble_liouvillian(&m.build(&method, 4, &full()).unwrap()).unwrap();
        let rho0 = DensityMatrix::basis_state(&layout, start).unwrap();
        let tr = evolve(&l, &rho0, &[1.0, 10.0, 50.0, 200.0], &EvolveOptions::default()).unwrap();
        assert!(tr.trace_drift < 1e-9, "{method}: drift {}", tr.trace_drift);
        assert!(tr.min_eigenvalue > -1e-8, "{method}: eigenvalue {}", tr.min_eigenvalue);
    }
}

#[test]
fn local_and_conventional_heat_differ_only_in_transients() {
    let m = ModelSpec::default_for(ModelKind::TwoModeBoson).with("g", 0.1).unwrap();
    let local = m.build(&Method::Local, 4, &full()).unwrap();
    let cl = m.build(&Method::ConventionalLocal, 4, &full()).unwrap();
    let l = assemble_liouvillian(&local).unwrap();
    let layout = local.hamiltonian.layout().clone();
    // (|10⟩ + |01⟩)/√2 carries a hopping coherence
    let mut psi = vec![C64::new(0.0, 0.0); layout.total_dim()];
    psi[layout.index_of(&[1, 0]).unwrap()] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[layout.index_of(&[0, 1]).unwrap()] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let rho0 = DensityMatrix::pure(&layout, &psi).unwrap();
    let tr = evolve(&l, &rho0, &[1.0], &EvolveOptions::default()).unwrap();
    let (a, b) = (heat_current(&local, "h", &tr.states[0]).unwrap(), heat_current(&cl, "h", &tr.states[0]).unwrap());
    assert!(rel(a, b) > 1e-3, "transient currents {a} and {b}");
    let ss = steady_state(&l, 1e-10).unwrap().rho;
    let (a, b) = (heat_current(&local, "h", &ss).unwrap(), heat_current(&cl, "h", &ss).unwrap());
    assert!(rel(a, b) < 1e-10, "steady currents {a} and {b}");
}

#[test]
fn moments_reproduce_closed_forms() {
    let fig = figure("fig2a").unwrap();
    for v in fig.sweep.values().unwrap().into_iter().step_by(4) {
        let m = fig.model.clone().with(&fig.sweep.param, v).unwrap();
        for method in [Method::Local, Method::Global, Method::ConventionalLocal] {
            let s = m.solve(&method, &SolveOptions::default()).unwrap().report;
            let r = analytic_reference(&m, &method).unwrap();
            assert!(rel(s.heat("h").unwrap(), r.heat[1]) < 1e-10, "{method} at g = {v}");
        }
    }
}

#[test]
fn truncated_fock_space_matches_moments() {
    let m = ModelSpec::default_for(ModelKind::TwoModeBoson).with("g", 0.05).unwrap();
    let fock = SolveOptions { boson: BosonSolver::Fock { cutoff: 12 }, ..Default::default() };
    for method in [Method::Local, Method::Global] {
        let a = m.solve(&method, &SolveOptions::default()).unwrap().report;
        let b = m.solve(&method, &fock).unwrap().report;
        assert!(rel(b.heat("h").unwrap(), a.heat("h").unwrap()) < 1e-4, "{method}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn equal_baths_relax_to_gibbs(
        kind in prop::sample::select(vec![ModelKind::TwoModeBoson, ModelKind::DoubleDot, ModelKind::InteractingDot]),
        method in prop::sample::select(vec![Method::Global, Method::Local, Method::SemiLocal]),
        g in 0.01f64..0.3,
        t in 0.3f64..2.0,
    ) {
        let m = ModelSpec::default_for(kind).with("g", g).unwrap();
        let hot = if m.is_bosonic() { "t_h" } else if m.hot_bath() == "L" { "t_l" } else { "t_r" };
        let m = m.with(hot, t).unwrap().at_equilibrium();
        let b = m.build(&method, 6, &BuildOptions::default()).unwrap();
        let ss = steady_state(&assemble_liouvillian(&b).unwrap(), 1e-12).unwrap();
        let h_td = b.common_thermo_hamiltonian().unwrap();
        let rho_g = gibbs_state(h_td, &b.baths[0].bath, &b.number).unwrap();
        prop_assert!(ss.rho.trace_distance(&rho_g).unwrap() < 1e-8);
    }
}
