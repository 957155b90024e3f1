//! Closed-form steady-state currents.

use crate::baths::{bose_function, fermi_function};
use crate::error::{Error, Result};
use crate::transmission::landauer;

use super::{DoubleDot, DrivenBoson, Method, ModelSpec, TwoModeBoson};

/// Heat into the system from each bath (mode order) and the output power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCurrents {
    pub heat: [f64; 2],
    pub power: f64,
}

fn nb(omega: f64, t: f64) -> f64 {
    bose_function(omega / t)
}

fn nf(omega: f64, mu: f64, t: f64) -> f64 {
    fermi_function((omega - mu) / t)
}

/// Shared local prefactor `4g²κ₁κ₂ / (4g² + κ₁κ₂ + 16Δ²κ₁κ₂/(κ₁+κ₂)²)`.
fn local_kernel(g: f64, k1: f64, k2: f64, delta: f64) -> f64 {
    let ks = k1 + k2;
    let p = k1 * k2;
    4.0 * g * g * p / (4.0 * g * g + p + 16.0 * delta * delta * p / (ks * ks))
}

/// Normal-mode splitting `√(Δ² + g²)` and the effective couplings of the
/// upper (`+`) and lower (`−`) modes: `[(κ₁⁺, κ₂⁺), (κ₁⁻, κ₂⁻)]`, where mode 2
/// is the one that lies higher for `Δ > 0`.
fn normal_modes(g: f64, delta: f64, k1: f64, k2: f64) -> (f64, [(f64, f64); 2]) {
    let s = (delta * delta + g * g).sqrt();
    let cos_theta = if s > 0.0 { delta / s } else { 0.0 };
    let c2 = 0.5 * (1.0 + cos_theta);
    let s2 = 0.5 * (1.0 - cos_theta);
    (s, [(k1 * s2, k2 * c2), (k1 * c2, k2 * s2)])
}

fn series(k1: f64, k2: f64) -> f64 {
    if k1 + k2 == 0.0 {
        0.0
    } else {
        k1 * k2 / (k1 + k2)
    }
}

pub(super) fn two_mode(p: &TwoModeBoson, method: &Method) -> Result<ReferenceCurrents> {
    let (kc, kh) = (p.kappa_c, p.kappa_h);
    let delta = p.delta();
    let w = p.omega_bar();
    let jh = match method {
        Method::ConventionalLocal => {
            let ks = kc + kh;
            (kc * p.omega_h + kh * p.omega_c) / (ks * ks)
                * local_kernel(p.g, kc, kh, delta)
                * (nb(p.omega_h, p.t_h) - nb(p.omega_c, p.t_c))
        }
        Method::Local => w / (kc + kh) * local_kernel(p.g, kc, kh, delta) * (nb(w, p.t_h) - nb(w, p.t_c)),
        Method::Global => {
            let (s, k) = normal_modes(p.g, delta, kc, kh);
            [w + s, w - s]
                .iter()
                .zip(k)
                .map(|(&om, (k1, k2))| om * series(k1, k2) * (nb(om, p.t_h) - nb(om, p.t_c)))
                .sum()
        }
        _ => return Err(no_closed_form("two-mode boson", method)),
    };
    Ok(ReferenceCurrents { heat: [-jh, jh], power: 0.0 })
}

pub(super) fn double_dot(p: &DoubleDot, method: &Method) -> Result<ReferenceCurrents> {
    let (kl, kr) = (p.kappa_l, p.kappa_r);
    let w = p.omega_bar();
    let fd = |om: f64| nf(om, p.mu_l, p.t_l) - nf(om, p.mu_r, p.t_r);
    let (jl, power) = match method {
        Method::Local => {
            let particles = local_kernel(p.g, kl, kr, p.delta()) / (kl + kr) * fd(w);
            ((w - p.mu_l) * particles, (p.mu_r - p.mu_l) * particles)
        }
        Method::Global => {
            let (s, k) = normal_modes(p.g, p.delta(), kl, kr);
            let mut jl = 0.0;
            let mut particles = 0.0;
            for (&om, (k1, k2)) in [w + s, w - s].iter().zip(k) {
                let x = series(k1, k2) * fd(om);
                jl += (om - p.mu_l) * x;
                particles += x;
            }
            (jl, (p.mu_r - p.mu_l) * particles)
        }
        _ => return Err(no_closed_form("double dot", method)),
    };
    Ok(ReferenceCurrents { heat: [jl, power - jl], power })
}

pub(super) fn driven(p: &DrivenBoson, method: &Method) -> Result<ReferenceCurrents> {
    let (kc, kh) = (p.kappa_c, p.kappa_h);
    let (wc, wh) = p.local_frequencies();
    match method {
        Method::Local => {
            let jh = wh / (kc + kh) * local_kernel(p.g, kc, kh, p.delta) * (nb(wh, p.t_h) - nb(wc, p.t_c));
            Ok(ReferenceCurrents { heat: [-wc / wh * jh, jh], power: (1.0 - wc / wh) * jh })
        }
        Method::Global => {
            let (s, k) = normal_modes(p.g, p.delta, kc, kh);
            let mut jh = 0.0;
            let mut jc = 0.0;
            let mut power = 0.0;
            for (sign, (k1, k2)) in [1.0, -1.0].into_iter().zip(k) {
                let (oc, oh) = (wc + sign * s, wh + sign * s);
                let x = series(k1, k2) * (nb(oh, p.t_h) - nb(oc, p.t_c));
                jh += oh * x;
                jc -= oc * x;
                power += p.drive() * x;
            }
            Ok(ReferenceCurrents { heat: [jc, jh], power })
        }
        _ => Err(no_closed_form("driven boson", method)),
    }
}

fn no_closed_form(model: &str, method: &Method) -> Error {
    Error::NoClosedForm(format!("{model} with the {} approach", method.name()))
}

/// Closed-form currents for the given approach. The transmission approach
/// evaluates the Landauer integrals.
pub fn analytic_reference(model: &ModelSpec, method: &Method) -> Result<ReferenceCurrents> {
    model.validate()?;
    if *method == Method::Transmission {
        let l = landauer(&model.transmission_spec()?, &model.baths()?)?;
        return Ok(ReferenceCurrents { heat: l.heat, power: l.power });
    }
    match model {
        ModelSpec::TwoModeBoson(p) => two_mode(p, method),
        ModelSpec::DoubleDot(p) => double_dot(p, method),
        ModelSpec::DrivenBoson(p) => driven(p, method),
        ModelSpec::InteractingDot(_) => Err(Error::NoClosedForm("interacting dot".into())),
    }
}
