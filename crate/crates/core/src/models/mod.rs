//! The four benchmark systems: two coupled oscillators, a double quantum dot,
//! a driven two-oscillator engine (rotating frame) and an interacting double
//! dot.

pub mod figures;
mod params;
mod reference;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use figures::{figure, Figure, Spacing, Sweep, FIGURES};
pub use params::{DoubleDot, DrivenBoson, InteractingDot, TwoModeBoson};
pub use reference::{analytic_reference, ReferenceCurrents};

use crate::baths::BathSpec;
use crate::dissipators::{
    build_conventional_local, build_perlind_system, build_unified_preset, BuildOptions, GeneratorBundle,
    GroupingPreset, LocalMode, SystemSpec,
};
use crate::error::{Error, Result};
use crate::operators::{ladder, number_operator, total_number, ModeLayout, Operator};
use crate::solvers::{
    assemble_liouvillian, converge_cutoff, quadratic_steady_moments, steady_state_with, QuadraticModel, SteadyOptions,
    CUTOFF_MAX, CUTOFF_RTOL, CUTOFF_START,
};
use crate::spectral::{CouplingSpec, FrequencyGrouping};
use crate::thermo::{thermo_report, thermo_report_moments, BathFlux, ThermoReport};
use crate::transmission::TransmissionSpec;

/// Total excitation cap used only to read off the quadratic form of a bosonic
/// generator; the operators involved are exact at this size.
const MOMENT_CUTOFF: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TwoModeBoson,
    DoubleDot,
    DrivenBoson,
    InteractingDot,
}

/// A benchmark model with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    TwoModeBoson(TwoModeBoson),
    DoubleDot(DoubleDot),
    DrivenBoson(DrivenBoson),
    InteractingDot(InteractingDot),
}

/// How the steady state is modelled.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Global,
    Local,
    SemiLocal,
    /// Clustering with the default thresholds.
    Auto,
    Grouping(FrequencyGrouping),
    ConventionalLocal,
    PerLind,
    /// Landauer formula; non-interacting models only.
    Transmission,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Global => "global",
            Method::Local => "local",
            Method::SemiLocal => "semilocal",
            Method::Auto => "auto",
            Method::Grouping(_) => "custom",
            Method::ConventionalLocal => "conventional-local",
            Method::PerLind => "perlind",
            Method::Transmission => "transmission",
        }
    }

    pub fn is_unified(&self) -> bool {
        matches!(self, Method::Global | Method::Local | Method::SemiLocal | Method::Auto | Method::Grouping(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "global" => Method::Global,
            "local" => Method::Local,
            "semilocal" | "semi-local" => Method::SemiLocal,
            "auto" => Method::Auto,
            "conventional-local" | "cl" => Method::ConventionalLocal,
            "perlind" => Method::PerLind,
            "transmission" | "landauer" => Method::Transmission,
            _ => return Err(Error::InvalidParameter(format!("unknown approach `{s}`"))),
        })
    }
}

/// Solver used for the bosonic models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BosonSolver {
    /// Exact second moments.
    #[default]
    Moments,
    /// Fock space with a fixed total excitation cap.
    Fock { cutoff: usize },
    /// Fock space with the cap doubled until the currents settle.
    FockConverged,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub build: BuildOptions,
    pub steady: SteadyOptions,
    pub boson: BosonSolver,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub report: ThermoReport,
    /// Total excitation cap of the Fock solve, if one was used.
    pub cutoff: Option<usize>,
    /// Eigenvalue weight clipped from the steady state.
    pub clipped: f64,
}

struct Modes {
    layout: Arc<ModeLayout>,
    a: [Operator; 2],
    n: [Operator; 2],
}

impl Modes {
    fn new(layout: ModeLayout) -> Result<Self> {
        let layout = Arc::new(layout);
        Ok(Self {
            a: [ladder(&layout, 0)?, ladder(&layout, 1)?],
            n: [number_operator(&layout, 0)?, number_operator(&layout, 1)?],
            layout,
        })
    }

    fn hopping(&self) -> Result<Operator> {
        let x = self.a[0].adjoint().try_mul(&self.a[1])?;
        x.try_add(&x.adjoint())
    }

    fn couplings(&self, ids: [&str; 2], offsets: [f64; 2]) -> Vec<CouplingSpec> {
        let mut out = Vec::new();
        for k in 0..2 {
            out.push(CouplingSpec::new(ids[k], -1, self.a[k].clone(), 1).with_frame_offset(offsets[k]));
            out.push(CouplingSpec::new(ids[k], 1, self.a[k].adjoint(), -1).with_frame_offset(offsets[k]));
        }
        out
    }
}

fn combine(terms: &[(f64, &Operator)]) -> Result<Operator> {
    let t: Vec<_> = terms.iter().map(|&(c, op)| (crate::C64::new(c, 0.0), op)).collect();
    Operator::linear_combination(&t)
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::TwoModeBoson(_) => ModelKind::TwoModeBoson,
            ModelSpec::DoubleDot(_) => ModelKind::DoubleDot,
            ModelSpec::DrivenBoson(_) => ModelKind::DrivenBoson,
            ModelSpec::InteractingDot(_) => ModelKind::InteractingDot,
        }
    }

    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::TwoModeBoson => ModelSpec::TwoModeBoson(Default::default()),
            ModelKind::DoubleDot => ModelSpec::DoubleDot(Default::default()),
            ModelKind::DrivenBoson => ModelSpec::DrivenBoson(Default::default()),
            ModelKind::InteractingDot => ModelSpec::InteractingDot(Default::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::TwoModeBoson(p) => p.validate(),
            ModelSpec::DoubleDot(p) => p.validate(),
            ModelSpec::DrivenBoson(p) => p.validate(),
            ModelSpec::InteractingDot(p) => p.validate(),
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::TwoModeBoson(_) => TwoModeBoson::PARAMS,
            ModelSpec::DoubleDot(_) => DoubleDot::PARAMS,
            ModelSpec::DrivenBoson(_) => DrivenBoson::PARAMS,
            ModelSpec::InteractingDot(_) => InteractingDot::PARAMS,
        }
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        match self {
            ModelSpec::TwoModeBoson(p) => p.get(name),
            ModelSpec::DoubleDot(p) => p.get(name),
            ModelSpec::DrivenBoson(p) => p.get(name),
            ModelSpec::InteractingDot(p) => p.get(name),
        }
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match self {
            ModelSpec::TwoModeBoson(p) => p.set(name, value),
            ModelSpec::DoubleDot(p) => p.set(name, value),
            ModelSpec::DrivenBoson(p) => p.set(name, value),
            ModelSpec::InteractingDot(p) => p.set(name, value),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn is_bosonic(&self) -> bool {
        matches!(self, ModelSpec::TwoModeBoson(_) | ModelSpec::DrivenBoson(_))
    }

    /// Bath ids in mode order.
    pub fn bath_ids(&self) -> [&'static str; 2] {
        if self.is_bosonic() {
            ["c", "h"]
        } else {
            ["L", "R"]
        }
    }

    pub fn hot_bath(&self) -> &'static str {
        if self.is_bosonic() {
            "h"
        } else {
            "L"
        }
    }

    pub fn cold_bath(&self) -> &'static str {
        if self.is_bosonic() {
            "c"
        } else {
            "R"
        }
    }

    pub fn baths(&self) -> Result<Vec<BathSpec>> {
        Ok(match self {
            ModelSpec::TwoModeBoson(p) => {
                vec![BathSpec::bose("c", p.t_c, p.kappa_c)?, BathSpec::bose("h", p.t_h, p.kappa_h)?]
            }
            ModelSpec::DrivenBoson(p) => {
                vec![BathSpec::bose("c", p.t_c, p.kappa_c)?, BathSpec::bose("h", p.t_h, p.kappa_h)?]
            }
            ModelSpec::DoubleDot(p) => {
                vec![BathSpec::fermi("L", p.t_l, p.mu_l, p.kappa_l)?, BathSpec::fermi("R", p.t_r, p.mu_r, p.kappa_r)?]
            }
            ModelSpec::InteractingDot(p) => {
                vec![BathSpec::fermi("L", p.t_l, p.mu_l, p.kappa_l)?, BathSpec::fermi("R", p.t_r, p.mu_r, p.kappa_r)?]
            }
        })
    }

    /// Copy with the cold bath set to the temperature and chemical potential
    /// of the hot one.
    pub fn at_equilibrium(&self) -> ModelSpec {
        let mut m = self.clone();
        match &mut m {
            ModelSpec::TwoModeBoson(p) => p.t_c = p.t_h,
            ModelSpec::DrivenBoson(p) => p.t_c = p.t_h,
            ModelSpec::DoubleDot(p) => (p.t_r, p.mu_r) = (p.t_l, p.mu_l),
            ModelSpec::InteractingDot(p) => (p.t_r, p.mu_r) = (p.t_l, p.mu_l),
        }
        m
    }

    pub fn max_coupling(&self) -> Result<f64> {
        Ok(self.baths()?.iter().map(|b| b.coupling).fold(0.0, f64::max))
    }

    fn modes(&self, cutoff: usize) -> Result<Modes> {
        if self.is_bosonic() {
            if cutoff == 0 {
                return Err(Error::InvalidParameter("bosonic cutoff must be ≥ 1".into()));
            }
            Modes::new(ModeLayout::bosons(2, cutoff)?)
        } else {
            Modes::new(ModeLayout::fermions(2)?)
        }
    }

    /// Hamiltonian, couplings and baths. `cutoff` is the total excitation
    /// cap of the bosonic models and is ignored for the dots.
    pub fn system(&self, cutoff: usize) -> Result<SystemSpec> {
        self.validate()?;
        let m = self.modes(cutoff)?;
        let ids = self.bath_ids();
        let hop = m.hopping()?;
        let number = total_number(&m.layout);
        let (hamiltonian, offsets, candidate) = match self {
            ModelSpec::TwoModeBoson(p) => {
                (combine(&[(p.omega_c, &m.n[0]), (p.omega_h, &m.n[1]), (p.g, &hop)])?, [0.0; 2], None)
            }
            ModelSpec::DoubleDot(p) => {
                (combine(&[(p.omega_l, &m.n[0]), (p.omega_r, &m.n[1]), (p.g, &hop)])?, [0.0; 2], None)
            }
            ModelSpec::InteractingDot(p) => {
                let nn = m.n[0].try_mul(&m.n[1])?;
                (combine(&[(p.omega, &number), (p.g, &hop), (p.u, &nn)])?, [0.0; 2], None)
            }
            ModelSpec::DrivenBoson(p) => {
                let h = combine(&[(-p.delta, &m.n[0]), (p.delta, &m.n[1]), (p.g, &hop)])?;
                let (wc, wh) = p.local_frequencies();
                let td = combine(&[(wc, &m.n[0]), (wh, &m.n[1])])?;
                (h, [wc, wh], Some(td))
            }
        };
        Ok(SystemSpec {
            hamiltonian,
            number,
            couplings: m.couplings(ids, offsets),
            baths: self.baths()?,
            thermo_candidate: candidate,
        })
    }

    /// Bare site modes for the conventional local approach.
    pub fn local_modes(&self, system: &SystemSpec) -> Result<Vec<LocalMode>> {
        let freqs = match self {
            ModelSpec::TwoModeBoson(p) => [p.omega_c, p.omega_h],
            ModelSpec::DoubleDot(p) => [p.omega_l, p.omega_r],
            ModelSpec::InteractingDot(p) => [p.omega, p.omega],
            ModelSpec::DrivenBoson(_) => {
                return Err(Error::NoLocalStructure("the driven model has no time-independent site frequencies".into()))
            }
        };
        let layout = system.hamiltonian.layout();
        let mut out = Vec::new();
        for (k, id) in self.bath_ids().into_iter().enumerate() {
            out.push(LocalMode { bath_id: id.into(), operator: ladder(layout, k)?, frequency: freqs[k], charge: 1 });
        }
        Ok(out)
    }

    pub fn transmission_spec(&self) -> Result<TransmissionSpec> {
        Ok(match *self {
            ModelSpec::TwoModeBoson(p) => TransmissionSpec::TwoModeBoson {
                omega_c: p.omega_c,
                omega_h: p.omega_h,
                g: p.g,
                kappa_c: p.kappa_c,
                kappa_h: p.kappa_h,
            },
            ModelSpec::DoubleDot(p) => TransmissionSpec::DoubleDot {
                omega_l: p.omega_l,
                omega_r: p.omega_r,
                g: p.g,
                kappa_l: p.kappa_l,
                kappa_r: p.kappa_r,
            },
            ModelSpec::DrivenBoson(p) => TransmissionSpec::DrivenBoson {
                omega_c: p.omega_c,
                omega_h: p.omega_h,
                g: p.g,
                kappa_c: p.kappa_c,
                kappa_h: p.kappa_h,
                drive: p.drive(),
            },
            ModelSpec::InteractingDot(_) => {
                return Err(Error::NoClosedForm("the interacting dot has no transmission function".into()))
            }
        })
    }

    pub fn grouping_preset(&self, method: &Method) -> Result<GroupingPreset> {
        Ok(match method {
            Method::Global => GroupingPreset::Global,
            Method::Local => GroupingPreset::Local,
            Method::SemiLocal => GroupingPreset::SemiLocal,
            Method::Auto => GroupingPreset::auto_for(&self.baths()?),
            Method::Grouping(g) => GroupingPreset::Custom(g.clone()),
            _ => return Err(Error::InvalidParameter(format!("{method} is not a grouping"))),
        })
    }

    /// Generator for a master-equation approach.
    pub fn build_on(&self, system: &SystemSpec, method: &Method, opts: &BuildOptions) -> Result<GeneratorBundle> {
        match method {
            Method::ConventionalLocal => build_conventional_local(system, &self.local_modes(system)?, opts),
            Method::PerLind => build_perlind_system(system, opts),
            Method::Transmission => Err(Error::InvalidParameter("the transmission approach has no generator".into())),
            _ => build_unified_preset(system, &self.grouping_preset(method)?, opts),
        }
    }

    pub fn build(&self, method: &Method, cutoff: usize, opts: &BuildOptions) -> Result<GeneratorBundle> {
        self.build_on(&self.system(cutoff)?, method, opts)
    }

    /// Steady-state bookkeeping for one approach.
    pub fn solve(&self, method: &Method, opts: &SolveOptions) -> Result<Solution> {
        if *method == Method::Transmission {
            return Ok(Solution { report: self.transmission_report()?, cutoff: None, clipped: 0.0 });
        }
        let hot = Some(self.hot_bath());
        if !self.is_bosonic() {
            return self.solve_fock(method, 1, opts);
        }
        match opts.boson {
            BosonSolver::Moments => {
                let bundle = self.build(method, MOMENT_CUTOFF, &opts.build)?;
                let q = QuadraticModel::from_bundle(&bundle)?;
                let s = quadratic_steady_moments(&q)?;
                Ok(Solution { report: thermo_report_moments(&q, &s, hot)?, cutoff: None, clipped: 0.0 })
            }
            BosonSolver::Fock { cutoff } => self.solve_fock(method, cutoff, opts),
            BosonSolver::FockConverged => {
                let mut last = None;
                let r = converge_cutoff(CUTOFF_START, CUTOFF_MAX, CUTOFF_RTOL, |n| {
                    let s = self.solve_fock(method, n, opts)?;
                    let mut v: Vec<f64> = s.report.baths.iter().map(|b| b.heat).collect();
                    v.push(s.report.output_power);
                    last = Some(s);
                    Ok(v)
                })?;
                log::debug!("Fock cutoff converged at {} (change {:.2e})", r.cutoff, r.change);
                Ok(last.expect("at least one evaluation"))
            }
        }
    }

    fn solve_fock(&self, method: &Method, cutoff: usize, opts: &SolveOptions) -> Result<Solution> {
        let bundle = self.build(method, cutoff, &opts.build)?;
        let l = assemble_liouvillian(&bundle)?;
        let ss = steady_state_with(&l, &opts.steady)?;
        let report = thermo_report(&bundle, &ss.rho, Some(self.hot_bath()))?;
        Ok(Solution { report, cutoff: self.is_bosonic().then_some(cutoff), clipped: ss.clipped })
    }

    fn transmission_report(&self) -> Result<ThermoReport> {
        let baths = self.baths()?;
        let l = crate::transmission::landauer(&self.transmission_spec()?, &baths)?;
        // particle current from the first to the second bath
        let (mu1, mu2) = (baths[0].chemical_potential, baths[1].chemical_potential);
        let particles = if mu2 != mu1 { l.power / (mu2 - mu1) } else { 0.0 };
        let powers = [mu1 * particles, -mu2 * particles];
        let fluxes: Vec<BathFlux> = baths
            .iter()
            .zip(l.heat)
            .zip(powers)
            .map(|((b, heat), power)| BathFlux { bath: b.id.clone(), heat, power })
            .collect();
        let external = if matches!(self, ModelSpec::DrivenBoson(_)) { -l.power } else { 0.0 };
        let mut report = ThermoReport {
            entropy_production: -baths.iter().zip(l.heat).map(|(b, j)| j / b.temperature).sum::<f64>(),
            baths: fluxes,
            external_power: Some(external),
            output_power: l.power,
            entropy_bound: 0.0,
            first_law_residual: None,
            efficiency: None,
        };
        report.efficiency = crate::thermo::efficiency(&report, self.hot_bath());
        Ok(report)
    }
}
