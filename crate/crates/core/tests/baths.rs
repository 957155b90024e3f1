#![allow(clippy::excessive_precision)]

use proptest::prelude::*;
use thermolind::baths::{occupation, rate, BathSpec};
use thermolind::dissipators::BuildOptions;
use thermolind::models::{Method, ModelKind, ModelSpec};

// Reference occupations evaluated with mpmath at 40 digits.
#[test]
fn occupations_match_reference_values() {
    let b = BathSpec::bose("h", 1.0, 0.02).unwrap();
    assert!((occupation(&b, 1.0).unwrap() - 0.58197670686932642439).abs() < 1e-15);
    let b = BathSpec::bose("c", 0.8, 0.02).unwrap();
    assert!((occupation(&b, 0.5).unwrap() - 1.1517473723199715159).abs() < 1e-14);
    let f = BathSpec::fermi("R", 0.4, 0.5, 0.05).unwrap();
    assert!((occupation(&f, 1.5).unwrap() - 0.075858180021243551193).abs() < 1e-16);
}

#[test]
fn chemical_potential_enters_through_the_charge() {
    let f = BathSpec::fermi("R", 0.4, 0.5, 0.05).unwrap();
    let r = rate(&f, 1.5, 1).unwrap();
    // emission κ(1 − n_F), absorption κ n_F at ω − μ = 1
    assert!((r.emission - 0.05 * (1.0 - 0.075858180021243551193)).abs() < 1e-16);
    assert!((r.absorption - 0.05 * 0.075858180021243551193).abs() < 1e-16);
    // a hole-like jump sees ω + μ
    let h = rate(&f, 1.5, -1).unwrap();
    assert!((h.absorption / h.emission - (-2.0f64 / 0.4).exp()).abs() < 1e-15);
}

#[test]
fn invalid_baths_are_rejected() {
    assert!(BathSpec::bose("x", 0.0, 0.02).is_err());
    assert!(BathSpec::bose("x", 1.0, -0.1).is_err());
    assert!(BathSpec::fermi("x", f64::NAN, 0.0, 0.1).is_err());
    let b = BathSpec::bose("x", 1.0, 0.02).unwrap();
    assert!(rate(&b, -0.5, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn built_jumps_obey_detailed_balance(
        kind in prop::sample::select(vec![ModelKind::TwoModeBoson, ModelKind::DoubleDot, ModelKind::DrivenBoson, ModelKind::InteractingDot]),
        method in prop::sample::select(vec![Method::Global, Method::Local, Method::SemiLocal]),
        g in 0.01f64..0.2,
        t in 0.3f64..2.0,
    ) {
        let m = ModelSpec::default_for(kind).with("g", g).unwrap();
        let hot = m.hot_bath();
        let key = if m.is_bosonic() { "t_h" } else if hot == "L" { "t_l" } else { "t_r" };
        let m = m.with(key, t).unwrap();
        let bundle = m.build(&method, 3, &BuildOptions::default()).unwrap();
        for ch in &bundle.baths {
            prop_assert!(ch.jumps.len() % 2 == 0);
            for pair in ch.jumps.chunks(2) {
                let (em, ab) = (&pair[0], &pair[1]);
                prop_assert!(em.frequency > 0.0 && ab.frequency == -em.frequency);
                prop_assert!(em.rate >= 0.0 && ab.rate >= 0.0);
                let x = (em.frequency - ch.bath.chemical_potential * em.charge as f64) / ch.bath.temperature;
                prop_assert!((ab.rate / em.rate - (-x).exp()).abs() <= 1e-12 * (-x).exp().max(1.0));
                prop_assert!(ab.operator.max_abs_diff(&em.operator.adjoint()).unwrap() == 0.0);
            }
        }
    }
}
