#![allow(clippy::excessive_precision)]

use proptest::prelude::*;
use thermolind::dissipators::{BuildOptions, DriveBookkeeping};
use thermolind::models::{analytic_reference, BosonSolver, Method, ModelKind, ModelSpec, SolveOptions};
use thermolind::Error;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn two_mode(g: f64) -> ModelSpec {
    ModelSpec::default_for(ModelKind::TwoModeBoson).with("g", g).unwrap()
}

// Frozen from a 40-digit mpmath evaluation of the closed forms.
#[test]
fn two_mode_closed_forms() {
    let m = two_mode(0.1);
    let l = analytic_reference(&m, &Method::Local).unwrap();
    let g = analytic_reference(&m, &Method::Global).unwrap();
    assert!(rel(l.heat[1], 1.7863919641219162833e-3) < 1e-13);
    assert!(rel(g.heat[1], 1.8028736981381912316e-3) < 1e-13);
    assert_eq!(l.heat[0], -l.heat[1]);
    let weak = analytic_reference(&two_mode(0.02), &Method::Global).unwrap();
    assert!(rel(weak.heat[1], 1.8042005772007817095e-3) < 1e-13);
}

#[test]
fn conventional_local_equals_local_at_resonance() {
    let m = two_mode(0.07);
    let cl = analytic_reference(&m, &Method::ConventionalLocal).unwrap();
    let l = analytic_reference(&m, &Method::Local).unwrap();
    assert!(rel(cl.heat[1], l.heat[1]) < 1e-14);
}

#[test]
fn conventional_local_runs_backwards() {
    let m = two_mode(0.1).with("delta", 0.2).unwrap();
    let cl = analytic_reference(&m, &Method::ConventionalLocal).unwrap();
    let l = analytic_reference(&m, &Method::Local).unwrap();
    assert!(rel(cl.heat[1], -3.0132524186825010093e-4) < 1e-12);
    assert!(rel(l.heat[1], 3.6013091492278152618e-4) < 1e-12);
}

#[test]
fn double_dot_closed_forms() {
    let m = ModelSpec::default_for(ModelKind::DoubleDot).with("g", 0.3).unwrap();
    let g = analytic_reference(&m, &Method::Global).unwrap();
    let l = analytic_reference(&m, &Method::Local).unwrap();
    assert!(rel(g.heat[0], 5.3424281189196215399e-3) < 1e-12);
    assert!(rel(g.power, 2.073284763200177504e-3) < 1e-12);
    assert!(rel(l.heat[0], 5.3699522625706829187e-3) < 1e-12);
    assert!(rel(l.power, 2.1479809050282731675e-3) < 1e-12);
}

#[test]
fn driven_closed_forms() {
    let m = ModelSpec::default_for(ModelKind::DrivenBoson);
    let l = analytic_reference(&m, &Method::Local).unwrap();
    let g = analytic_reference(&m, &Method::Global).unwrap();
    assert!(rel(l.heat[1], 3.1032874266655460084e-2) < 1e-12);
    assert!(rel(l.power, 1.5516437133327730042e-2) < 1e-12);
    assert!(rel(g.heat[1], 3.2831809432115886171e-2) < 1e-12);
    assert!(rel(g.power, 1.6444299440237747149e-2) < 1e-12);
    let m = m.with("delta", 0.0125).unwrap();
    let g = analytic_reference(&m, &Method::Global).unwrap();
    assert!(rel(g.power, 1.6077739989636117157e-2) < 1e-12);
}

#[test]
fn interacting_dot_has_no_closed_form() {
    let m = ModelSpec::default_for(ModelKind::InteractingDot);
    for method in [Method::Local, Method::Global, Method::Transmission] {
        assert!(matches!(analytic_reference(&m, &method), Err(Error::NoClosedForm(_))));
    }
}

#[test]
fn driven_local_uses_single_thermo_hamiltonian() {
    let m = ModelSpec::default_for(ModelKind::DrivenBoson).with("delta", 0.03).unwrap();
    let local = m.build(&Method::Local, 3, &BuildOptions::default()).unwrap();
    assert!(matches!(local.drive, DriveBookkeeping::Commutator { .. }));
    let global = m.build(&Method::Global, 3, &BuildOptions::default()).unwrap();
    assert!(matches!(global.drive, DriveBookkeeping::Closure));
    assert!(matches!(
        m.build(&Method::ConventionalLocal, 3, &BuildOptions::default()),
        Err(Error::NoLocalStructure(_))
    ));
}

#[test]
fn semilocal_covers_absorption_jumps() {
    for kind in [ModelKind::TwoModeBoson, ModelKind::DoubleDot, ModelKind::DrivenBoson, ModelKind::InteractingDot] {
        let m = ModelSpec::default_for(kind);
        let b = m.build(&Method::SemiLocal, 4, &BuildOptions::default()).unwrap();
        assert!(b.baths.iter().all(|ch| ch.jumps.iter().any(|j| j.frequency < 0.0)), "{kind:?}");
    }
    // the interacting dot splits its sets by sector
    let m = ModelSpec::default_for(ModelKind::InteractingDot);
    let s = m.solve(&Method::SemiLocal, &SolveOptions::default()).unwrap().report;
    let l = m.solve(&Method::Local, &SolveOptions::default()).unwrap().report;
    assert!(s.heat("L").unwrap() > 0.0 && rel(s.heat("L").unwrap(), l.heat("L").unwrap()) > 1e-6);
}

#[test]
fn solvers_match_closed_forms() {
    let cases = [
        (two_mode(0.05).with("delta", 0.03).unwrap(), vec![Method::ConventionalLocal, Method::Local, Method::Global]),
        (ModelSpec::default_for(ModelKind::DoubleDot).with("g", 0.2).unwrap(), vec![Method::Local, Method::Global]),
        (
            ModelSpec::default_for(ModelKind::DrivenBoson).with("delta", 0.02).unwrap(),
            vec![Method::Local, Method::Global],
        ),
    ];
    for (m, methods) in cases {
        for method in methods {
            let s = m.solve(&method, &SolveOptions::default()).unwrap().report;
            let r = analytic_reference(&m, &method).unwrap();
            for (k, id) in m.bath_ids().iter().enumerate() {
                assert!(rel(s.heat(id).unwrap(), r.heat[k]) < 1e-8, "{:?} {method} {id}", m.kind());
            }
            assert!((s.output_power - r.power).abs() <= 1e-8 * r.heat[1].abs().max(r.heat[0].abs()), "{method}");
        }
    }
}

#[test]
fn moments_agree_with_fock() {
    let m = two_mode(0.04).with("t_h", 0.6).unwrap().with("t_c", 0.3).unwrap();
    let a = m.solve(&Method::Global, &SolveOptions::default()).unwrap().report;
    let opts = SolveOptions { boson: BosonSolver::Fock { cutoff: 24 }, ..Default::default() };
    let b = m.solve(&Method::Global, &opts).unwrap().report;
    assert!(rel(b.heat("h").unwrap(), a.heat("h").unwrap()) < 1e-6);
}

#[test]
fn transmission_reports_for_dots() {
    let m = ModelSpec::default_for(ModelKind::DoubleDot).with("g", 0.05).unwrap();
    let t = m.solve(&Method::Transmission, &SolveOptions::default()).unwrap().report;
    let sum: f64 = t.baths.iter().map(|b| b.heat + b.power).sum();
    assert!(sum.abs() < 1e-12);
    assert!(t.output_power > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn local_and_conventional_agree_without_detuning(g in 0.001f64..0.3, kc in 0.005f64..0.05, kh in 0.005f64..0.05) {
        let m = two_mode(g).with("kappa_c", kc).unwrap().with("kappa_h", kh).unwrap();
        let cl = analytic_reference(&m, &Method::ConventionalLocal).unwrap();
        let l = analytic_reference(&m, &Method::Local).unwrap();
        prop_assert!(rel(cl.heat[1], l.heat[1]) < 1e-12);
    }

    #[test]
    fn heat_flows_downhill(g in 0.001f64..0.3, d in -0.1f64..0.1, tc in 0.2f64..1.0) {
        let m = two_mode(g).with("delta", d).unwrap().with("t_c", tc).unwrap();
        for method in [Method::Local, Method::Global] {
            let r = analytic_reference(&m, &method).unwrap();
            prop_assert!(r.heat[1] >= 0.0);
        }
    }

    #[test]
    fn local_dot_is_tight_coupled(g in 0.001f64..0.5, w in 1.2f64..4.0) {
        let m = ModelSpec::default_for(ModelKind::DoubleDot).with("g", g).unwrap().with("omega", w).unwrap();
        let r = analytic_reference(&m, &Method::Local).unwrap();
        prop_assert!(rel(r.power / r.heat[0], 1.0 / w) < 1e-12);
    }
}
