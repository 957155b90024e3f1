//! Energy and entropy bookkeeping for a generator and a state.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::baths::BathSpec;
use crate::dissipators::{BathChannel, DriveBookkeeping, GeneratorBundle, HeatRule};
use crate::error::{Error, Result};
use crate::operators::{eigh, DensityMatrix, Operator};
use crate::solvers::{MomentState, QuadraticModel};

/// Eigenvalues of `ρ` below this are raised to it before the logarithm.
pub const EPS_LOG: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BathFlux {
    pub bath: String,
    pub heat: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermoReport {
    pub baths: Vec<BathFlux>,
    /// Absent when only the steady-state closure defines it.
    pub external_power: Option<f64>,
    pub output_power: f64,
    pub entropy_production: f64,
    /// Sensitivity of the entropy production to the log regularization.
    pub entropy_bound: f64,
    /// `|dU/dt − Σ_α(P_α + J_α) − P_ext|`; absent without a single `H_TD`.
    pub first_law_residual: Option<f64>,
    pub efficiency: Option<f64>,
}

impl ThermoReport {
    pub fn heat(&self, bath: &str) -> Result<f64> {
        self.flux(bath).map(|f| f.heat)
    }

    pub fn power(&self, bath: &str) -> Result<f64> {
        self.flux(bath).map(|f| f.power)
    }

    fn flux(&self, bath: &str) -> Result<&BathFlux> {
        self.baths.iter().find(|b| b.bath == bath).ok_or_else(|| Error::UnknownBath(bath.into()))
    }

    pub fn total_heat(&self) -> f64 {
        self.baths.iter().map(|b| b.heat).sum()
    }
}

/// `Tr{H_TD ρ}`.
pub fn internal_energy(h_td: &Operator, rho: &DensityMatrix) -> Result<f64> {
    rho.expect(h_td)
}

fn re_trace(a: &Operator, b: &Operator) -> Result<f64> {
    Ok(a.trace_product(b)?.re)
}

fn heat_from_action(ch: &BathChannel, number: &Operator, rho: &DensityMatrix, action: &Operator) -> Result<f64> {
    match &ch.heat_rule {
        HeatRule::ThermoHamiltonian => {
            let mu = ch.bath.chemical_potential;
            let mut j = re_trace(&ch.thermo_hamiltonian, action)?;
            if mu != 0.0 {
                j -= mu * re_trace(number, action)?;
            }
            Ok(j)
        }
        HeatRule::Symmetrized(terms) => {
            let mut s = C64::new(0.0, 0.0);
            for t in terms {
                for (sign, parts) in [(-1.0, &t.emission), (1.0, &t.absorption)] {
                    for p in parts {
                        let left = p.operator.adjoint();
                        for q in parts {
                            let x = left.try_mul(&q.operator)?.trace_product(rho.op())?;
                            s += sign * 0.5 * (p.energy + q.energy) * x;
                        }
                    }
                }
            }
            Ok(s.re)
        }
    }
}

/// Heat current into the system from bath `bath_id`.
pub fn heat_current(bundle: &GeneratorBundle, bath_id: &str, rho: &DensityMatrix) -> Result<f64> {
    let ch = bundle.bath(bath_id)?;
    let action = ch.dissipator.apply(rho.op())?;
    heat_from_action(ch, &bundle.number, rho, &action)
}

/// `μ_α Tr{N L_α ρ}`.
pub fn bath_power(bundle: &GeneratorBundle, bath_id: &str, rho: &DensityMatrix) -> Result<f64> {
    let ch = bundle.bath(bath_id)?;
    let mu = ch.bath.chemical_potential;
    if mu == 0.0 {
        return Ok(0.0);
    }
    Ok(mu * re_trace(&bundle.number, &ch.dissipator.apply(rho.op())?)?)
}

/// `−i Tr{[H_TD, H]ρ}`, zero for time-independent models and absent when
/// each bath has its own thermodynamic Hamiltonian.
pub fn external_power(bundle: &GeneratorBundle, rho: &DensityMatrix) -> Result<Option<f64>> {
    match &bundle.drive {
        DriveBookkeeping::None => Ok(Some(0.0)),
        DriveBookkeeping::Commutator { thermo } => {
            let c = thermo.commutator(&bundle.hamiltonian)?;
            Ok(Some((C64::new(0.0, -1.0) * c.trace_product(rho.op())?).re))
        }
        DriveBookkeeping::Closure => Ok(None),
    }
}

/// `P_S = −Σ_α P_α − P_ext`; with the closure this is `Σ_α J_α`.
pub fn output_power(bundle: &GeneratorBundle, rho: &DensityMatrix) -> Result<f64> {
    Ok(thermo_report(bundle, rho, None)?.output_power)
}

/// `e^{−β(H_TD − μN)}/Z`.
pub fn gibbs_state(h_td: &Operator, bath: &BathSpec, number: &Operator) -> Result<DensityMatrix> {
    let k = if bath.chemical_potential == 0.0 {
        h_td.clone()
    } else {
        h_td.try_sub(&number.scale_real(bath.chemical_potential))?
    };
    let e = eigh(&k)?;
    let beta = bath.beta();
    let e0 = e.values.first().copied().unwrap_or(0.0);
    let w: Vec<f64> = e.values.iter().map(|&x| (-beta * (x - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    let w: Vec<f64> = w.iter().map(|x| x / z).collect();
    let op = Operator::from_matrix(h_td.layout().clone(), e.reconstruct(&w))?.hermitian_part();
    DensityMatrix::new(op)
}

/// `η = P_S / J_hot` when both are positive.
pub fn efficiency(report: &ThermoReport, hot_bath: &str) -> Option<f64> {
    let j = report.heat(hot_bath).ok()?;
    (j > 0.0 && report.output_power > 0.0).then(|| report.output_power / j)
}

/// Spohn entropy production `−Σ_α Tr{(L_α ρ)(ln ρ − ln ρ_G^α)}` with
/// `ln ρ_G^α = −β_α(H_TD^α − μ_α N) − ln Z`; returns the rate and the
/// sensitivity to the eigenvalue floor.
pub fn entropy_production_rate(bundle: &GeneratorBundle, rho: &DensityMatrix) -> Result<(f64, f64)> {
    let actions = bath_actions(bundle, rho)?;
    let heats = bundle
        .baths
        .iter()
        .zip(&actions)
        .map(|(ch, a)| heat_from_action(ch, &bundle.number, rho, a))
        .collect::<Result<Vec<_>>>()?;
    entropy_from(bundle, rho, &actions, &heats)
}

fn bath_actions(bundle: &GeneratorBundle, rho: &DensityMatrix) -> Result<Vec<Operator>> {
    bundle.baths.iter().map(|ch| ch.dissipator.apply(rho.op())).collect()
}

fn entropy_from(
    bundle: &GeneratorBundle,
    rho: &DensityMatrix,
    actions: &[Operator],
    heats: &[f64],
) -> Result<(f64, f64)> {
    let e = eigh(rho.op())?;
    let logs: Vec<f64> = e.values.iter().map(|&x| x.max(EPS_LOG).ln()).collect();
    let mut sigma = 0.0;
    let mut bound = 0.0;
    for ((ch, a), j) in bundle.baths.iter().zip(actions).zip(heats) {
        let d = e.to_eigenbasis(a.matrix());
        for (k, &l) in logs.iter().enumerate() {
            let x = d[(k, k)].re;
            sigma -= x * l;
            if e.values[k] < EPS_LOG {
                bound += x.abs() * EPS_LOG.ln().abs();
            }
        }
        sigma -= j / ch.bath.temperature;
    }
    Ok((sigma, bound))
}

/// Full bookkeeping for one state. `hot_bath` selects the efficiency
/// denominator.
pub fn thermo_report(bundle: &GeneratorBundle, rho: &DensityMatrix, hot_bath: Option<&str>) -> Result<ThermoReport> {
    let actions = bath_actions(bundle, rho)?;
    let mut baths = Vec::new();
    let mut heats = Vec::new();
    for (ch, a) in bundle.baths.iter().zip(&actions) {
        let heat = heat_from_action(ch, &bundle.number, rho, a)?;
        let mu = ch.bath.chemical_potential;
        let power = if mu == 0.0 { 0.0 } else { mu * re_trace(&bundle.number, a)? };
        heats.push(heat);
        baths.push(BathFlux { bath: ch.bath.id.clone(), heat, power });
    }
    let p_ext = external_power(bundle, rho)?;
    let sum_jp: f64 = baths.iter().map(|b| b.heat + b.power).sum();
    let sum_p: f64 = baths.iter().map(|b| b.power).sum();
    let output_power = match p_ext {
        Some(p) => -sum_p - p,
        None => baths.iter().map(|b| b.heat).sum(),
    };
    let first_law_residual = match (bundle.common_thermo_hamiltonian(), p_ext) {
        (Some(h_td), Some(p)) => {
            let mut total = bundle.hamiltonian_part.apply(rho.op())?;
            for a in &actions {
                total = total.try_add(a)?;
            }
            let du = re_trace(h_td, &total)?;
            Some((du - sum_jp - p).abs())
        }
        _ => None,
    };
    let (entropy_production, entropy_bound) = entropy_from(bundle, rho, &actions, &heats)?;
    let mut report = ThermoReport {
        baths,
        external_power: p_ext,
        output_power,
        entropy_production,
        entropy_bound,
        first_law_residual,
        efficiency: None,
    };
    if let Some(h) = hot_bath {
        report.efficiency = efficiency(&report, h);
    }
    Ok(report)
}

/// Bookkeeping from second moments. Valid at the stationary point only:
/// `dU/dt = 0` and the entropy production follows from the balance
/// `Σ̇ = −Σ_α J_α / T_α`.
pub fn thermo_report_moments(
    model: &QuadraticModel,
    state: &MomentState,
    hot_bath: Option<&str>,
) -> Result<ThermoReport> {
    let mut baths = Vec::new();
    for b in &model.baths {
        baths.push(BathFlux {
            bath: b.id.clone(),
            heat: model.heat_current(&b.id, state)?,
            power: model.bath_power(&b.id, state)?,
        });
    }
    let p_ext = model.external_power(state);
    let sum_jp: f64 = baths.iter().map(|b| b.heat + b.power).sum();
    let sum_p: f64 = baths.iter().map(|b| b.power).sum();
    let output_power = match p_ext {
        Some(p) => -sum_p - p,
        None => baths.iter().map(|b| b.heat).sum(),
    };
    let entropy_production = -model.baths.iter().zip(&baths).map(|(b, f)| f.heat / b.temperature).sum::<f64>();
    let mut report = ThermoReport {
        first_law_residual: p_ext.map(|p| (sum_jp + p).abs()),
        baths,
        external_power: p_ext,
        output_power,
        entropy_production,
        entropy_bound: 0.0,
        efficiency: None,
    };
    if let Some(h) = hot_bath {
        report.efficiency = efficiency(&report, h);
    }
    Ok(report)
}
