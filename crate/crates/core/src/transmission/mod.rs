//! Landauer-type currents for the non-interacting models.
//!
//! Baths are passed in mode order: `(c, h)` for the bosonic models and
//! `(L, R)` for the double dot. Heat currents are positive when they flow
//! into the system.

mod quad;

pub use quad::integrate;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::baths::{fermi_function, BathSpec, Statistics};
use crate::error::{Error, Result};

/// Quadrature tolerance relative to the integrand peak.
pub const TOL_QUAD: f64 = 1e-12;
/// Energy window, in units of `max(κ, T)`, seeded around each resonance.
const WINDOW: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransmissionSpec {
    TwoModeBoson {
        omega_c: f64,
        omega_h: f64,
        g: f64,
        kappa_c: f64,
        kappa_h: f64,
    },
    DoubleDot {
        omega_l: f64,
        omega_r: f64,
        g: f64,
        kappa_l: f64,
        kappa_r: f64,
    },
    /// Energies refer to the hot bath; the cold bath sees `ω − drive`.
    DrivenBoson {
        omega_c: f64,
        omega_h: f64,
        g: f64,
        kappa_c: f64,
        kappa_h: f64,
        drive: f64,
    },
}

impl TransmissionSpec {
    fn validate(&self) -> Result<()> {
        let (k1, k2, g) = self.couplings();
        if !(k1 > 0.0 && k2 > 0.0) || !g.is_finite() {
            return Err(Error::InvalidParameter("transmission needs κ > 0 and finite g".into()));
        }
        Ok(())
    }

    fn couplings(&self) -> (f64, f64, f64) {
        match *self {
            TransmissionSpec::TwoModeBoson { kappa_c, kappa_h, g, .. } => (kappa_c, kappa_h, g),
            TransmissionSpec::DoubleDot { kappa_l, kappa_r, g, .. } => (kappa_l, kappa_r, g),
            TransmissionSpec::DrivenBoson { kappa_c, kappa_h, g, .. } => (kappa_c, kappa_h, g),
        }
    }

    /// Bare resonances `(first, second)` on the integration axis.
    fn bare(&self) -> (f64, f64) {
        match *self {
            TransmissionSpec::TwoModeBoson { omega_c, omega_h, .. } => (omega_c, omega_h),
            TransmissionSpec::DoubleDot { omega_l, omega_r, .. } => (omega_l, omega_r),
            TransmissionSpec::DrivenBoson { omega_c, omega_h, drive, .. } => (omega_c + drive, omega_h),
        }
    }

    fn breakpoints(&self, scale: f64) -> Vec<f64> {
        let (a, b) = self.bare();
        let g = self.couplings().2;
        let mid = 0.5 * (a + b);
        let split = (0.25 * (b - a) * (b - a) + g * g).sqrt();
        let mut out = Vec::new();
        for r in [a, b, mid - split, mid + split] {
            out.extend([r - WINDOW * scale, r - 2.0 * scale, r, r + 2.0 * scale, r + WINDOW * scale]);
        }
        out
    }
}

/// `T(ω) = g²κ₁κ₂ / |(ω − Ω₂ + iκ₂/2)(ω − Ω₁ + iκ₁/2) − g²|²`.
pub fn transmission(spec: &TransmissionSpec, omega: f64) -> f64 {
    let (k1, k2, g) = spec.couplings();
    let (w1, w2) = spec.bare();
    let d = C64::new(omega - w2, 0.5 * k2) * C64::new(omega - w1, 0.5 * k1) - g * g;
    g * g * k1 * k2 / d.norm_sqr()
}

/// `ω n_B(ω)` with its limit `T` at zero.
fn omega_nb(omega: f64, t: f64) -> f64 {
    if omega == 0.0 {
        t
    } else {
        omega / (omega / t).exp_m1()
    }
}

/// `min(1, ε/ε₀) n_B(ε)`, finite at `ε → 0`.
fn onset_nb(eps: f64, t: f64, eps0: f64) -> f64 {
    if eps <= 0.0 {
        return t / eps0;
    }
    let s = (eps / eps0).min(1.0);
    s / (eps / t).exp_m1()
}

/// Heat into the system from each bath and the output power `P_S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauerCurrents {
    pub heat: [f64; 2],
    pub power: f64,
}

fn check_stats(baths: &[BathSpec], stats: Statistics) -> Result<()> {
    if baths.len() != 2 {
        return Err(Error::InvalidParameter("Landauer formulas need exactly two baths".into()));
    }
    for b in baths {
        b.validate()?;
        if b.statistics != stats {
            return Err(Error::InvalidParameter(format!("bath {} has the wrong statistics", b.id)));
        }
    }
    Ok(())
}

pub fn landauer(spec: &TransmissionSpec, baths: &[BathSpec]) -> Result<LandauerCurrents> {
    spec.validate()?;
    let (k1, k2, _) = spec.couplings();
    let kmax = k1.max(k2);
    let tmax = baths.iter().map(|b| b.temperature).fold(0.0, f64::max);
    let mut bps = spec.breakpoints(kmax.max(tmax));
    let norm = 1.0 / (2.0 * PI);
    match *spec {
        TransmissionSpec::TwoModeBoson { .. } => {
            check_stats(baths, Statistics::Bose)?;
            let (tc, th) = (baths[0].temperature, baths[1].temperature);
            bps.push(0.0);
            let j = integrate(
                |w| transmission(spec, w) * (omega_nb(w, th) - omega_nb(w, tc)),
                0.0,
                f64::INFINITY,
                &bps,
                TOL_QUAD,
            )?;
            Ok(LandauerCurrents { heat: [-norm * j, norm * j], power: 0.0 })
        }
        TransmissionSpec::DoubleDot { .. } => {
            check_stats(baths, Statistics::Fermi)?;
            let (l, r) = (&baths[0], &baths[1]);
            bps.extend([l.chemical_potential, r.chemical_potential]);
            let diff = |w: f64| {
                fermi_function((w - l.chemical_potential) / l.temperature)
                    - fermi_function((w - r.chemical_potential) / r.temperature)
            };
            let inf = f64::INFINITY;
            let jl =
                integrate(|w| transmission(spec, w) * (w - l.chemical_potential) * diff(w), -inf, inf, &bps, TOL_QUAD)?;
            let jr =
                integrate(|w| transmission(spec, w) * (w - r.chemical_potential) * diff(w), -inf, inf, &bps, TOL_QUAD)?;
            let n = integrate(|w| transmission(spec, w) * diff(w), -inf, inf, &bps, TOL_QUAD)?;
            Ok(LandauerCurrents {
                heat: [norm * jl, -norm * jr],
                power: norm * (r.chemical_potential - l.chemical_potential) * n,
            })
        }
        TransmissionSpec::DrivenBoson { drive, .. } => {
            check_stats(baths, Statistics::Bose)?;
            let (tc, th) = (baths[0].temperature, baths[1].temperature);
            let eps0 = 10.0 * kmax;
            let lo = drive.max(0.0);
            bps.extend([drive, drive + eps0, eps0]);
            // occupation difference at hot-bath energy ω, cold-bath energy ω − drive
            let bracket = |w: f64| {
                let ec = w - drive;
                let sh = (w / eps0).min(1.0);
                let sc = (ec / eps0).min(1.0);
                transmission(spec, w) * (sc * onset_nb(w, th, eps0) - sh * onset_nb(ec, tc, eps0))
            };
            let jh = integrate(|w| w * bracket(w), lo, f64::INFINITY, &bps, TOL_QUAD)?;
            let jc = integrate(|w| (w - drive) * bracket(w), lo, f64::INFINITY, &bps, TOL_QUAD)?;
            Ok(LandauerCurrents { heat: [-norm * jc, norm * jh], power: norm * (jh - jc) })
        }
    }
}

/// Heat into the system from the bath with the given id.
pub fn landauer_heat(spec: &TransmissionSpec, baths: &[BathSpec], bath_id: &str) -> Result<f64> {
    let i = baths.iter().position(|b| b.id == bath_id).ok_or_else(|| Error::UnknownBath(bath_id.into()))?;
    Ok(landauer(spec, baths)?.heat[i])
}

pub fn landauer_power(spec: &TransmissionSpec, baths: &[BathSpec]) -> Result<f64> {
    Ok(landauer(spec, baths)?.power)
}
