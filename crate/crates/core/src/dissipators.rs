//! GKLS generators: the grouped (unified) construction and the reference
//! conventional-local and PERLind constructions.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::baths::{rate, BathSpec};
use crate::error::{Error, Result};
use crate::operators::{Operator, Superoperator, VecBasis};
use crate::spectral::{
    build_grouped_jumps, build_thermo_hamiltonian_with, group_frequencies, BohrComponent, CouplingSpec,
    FrequencyGrouping, GroupedJump, SetFrequencyPolicy, Spectrum, TOL_BOHR,
};

/// Relative tolerance for the charge relation and the mirror check.
const TOL_STRUCT: f64 = 1e-10;

/// System Hamiltonian, particle number, couplings and reservoirs.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub hamiltonian: Operator,
    pub number: Operator,
    pub couplings: Vec<CouplingSpec>,
    pub baths: Vec<BathSpec>,
    /// Single thermodynamic Hamiltonian to try for rotating-frame models. It
    /// is used for every bath when all grouped jumps satisfy
    /// `[S_q, H] = ω_q S_q`; otherwise each bath gets its own.
    pub thermo_candidate: Option<Operator>,
}

impl SystemSpec {
    pub fn bath(&self, id: &str) -> Result<&BathSpec> {
        self.baths.iter().find(|b| b.id == id).ok_or_else(|| Error::UnknownBath(id.into()))
    }

    pub fn has_frame_offsets(&self) -> bool {
        self.couplings.iter().any(|c| c.frame_offset != 0.0)
    }

    fn validate(&self) -> Result<()> {
        for b in &self.baths {
            b.validate()?;
        }
        for c in &self.couplings {
            self.bath(&c.bath_id)?;
            c.check_charge(&self.number, TOL_STRUCT)?;
        }
        Ok(())
    }
}

/// Vectorization space used for superoperators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasisChoice {
    /// All `d²` matrix entries.
    Full,
    /// Only entries between states of equal particle number.
    #[default]
    ChargeSector,
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub basis: BasisChoice,
    pub tol_bohr: f64,
    /// Absolute tolerance on cycle constraints, relative to the spectral scale.
    pub tol_consistency: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { basis: BasisChoice::ChargeSector, tol_bohr: TOL_BOHR, tol_consistency: 1e-9 }
    }
}

/// How the frequency sets are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupingPreset {
    /// One set per distinct frequency (secular approximation).
    Global,
    /// One set per bath at the mean of its frequencies.
    Local,
    /// One set per bath and particle-number sector of the source state.
    SemiLocal,
    /// Single-linkage clustering of all positive frequencies.
    Auto {
        eps_cluster: f64,
        gap_min: f64,
    },
    Custom(FrequencyGrouping),
}

impl GroupingPreset {
    /// Clustering with `ε = 10·max κ` and `gap_min = 3·max κ`.
    pub fn auto_for(baths: &[BathSpec]) -> Self {
        let k = baths.iter().map(|b| b.coupling).fold(0.0, f64::max);
        GroupingPreset::Auto { eps_cluster: 10.0 * k, gap_min: 3.0 * k }
    }

    fn sector_resolved(&self) -> bool {
        matches!(self, GroupingPreset::SemiLocal)
            || matches!(self, GroupingPreset::Custom(g) if g.sets.iter().any(|s| s.members.iter().any(|m| m.sector.is_some())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Approach {
    Unified(FrequencyGrouping),
    ConventionalLocal,
    PerLind,
}

impl Approach {
    pub fn is_unified(&self) -> bool {
        matches!(self, Approach::Unified(_))
    }
}

/// A jump operator with its rate; `frequency` is the lab energy taken from
/// the bath (negative for absorption) and `charge` the particles removed.
#[derive(Debug, Clone)]
pub struct RatedJump {
    pub rate: f64,
    pub operator: Operator,
    pub frequency: f64,
    pub charge: i32,
    pub channel: i32,
}

/// One frequency-resolved piece of a PERLind jump: `√Γ(ω_σ) S_σ`.
#[derive(Debug, Clone)]
pub struct WeightedPart {
    /// `ω_σ − μ n`: energy removed from the system by the emission jump.
    pub energy: f64,
    pub operator: Operator,
}

/// PERLind jumps of one channel split by frequency.
#[derive(Debug, Clone)]
pub struct SymmetrizedTerm {
    pub emission: Vec<WeightedPart>,
    pub absorption: Vec<WeightedPart>,
}

#[derive(Debug, Clone)]
pub enum HeatRule {
    /// `Tr{(H_TD^α − μ_α N) L_α ρ}`.
    ThermoHamiltonian,
    /// Symmetrized frequency weights over PERLind jump parts.
    Symmetrized(Vec<SymmetrizedTerm>),
}

/// How the external power of a driven model is obtained.
#[derive(Debug, Clone)]
pub enum DriveBookkeeping {
    /// Time-independent model: no external power.
    None,
    /// Single thermodynamic Hamiltonian: `P_ext = −i Tr{[H_TD, H]ρ}`.
    Commutator { thermo: Operator },
    /// Per-bath thermodynamic Hamiltonians: only the steady-state closure
    /// `P_ext = −Σ_α (J_α + P_α)` is available.
    Closure,
}

#[derive(Debug, Clone)]
pub struct BathChannel {
    pub bath: BathSpec,
    pub dissipator: Superoperator,
    pub jumps: Vec<RatedJump>,
    pub thermo_hamiltonian: Operator,
    pub heat_rule: HeatRule,
}

/// Full generator with per-bath bookkeeping data.
#[derive(Debug, Clone)]
pub struct GeneratorBundle {
    pub approach: Approach,
    pub hamiltonian: Operator,
    pub number: Operator,
    pub hamiltonian_part: Superoperator,
    pub baths: Vec<BathChannel>,
    pub drive: DriveBookkeeping,
    pub basis: Arc<VecBasis>,
}

impl GeneratorBundle {
    pub fn bath(&self, id: &str) -> Result<&BathChannel> {
        self.baths.iter().find(|b| b.bath.id == id).ok_or_else(|| Error::UnknownBath(id.into()))
    }

    pub fn bath_ids(&self) -> Vec<String> {
        self.baths.iter().map(|b| b.bath.id.clone()).collect()
    }

    /// The common thermodynamic Hamiltonian, if every bath uses the same one.
    pub fn common_thermo_hamiltonian(&self) -> Option<&Operator> {
        let first = &self.baths.first()?.thermo_hamiltonian;
        let scale = first.max_abs().max(1.0);
        self.baths
            .iter()
            .all(|b| b.thermo_hamiltonian.max_abs_diff(first).is_ok_and(|d| d <= 1e-12 * scale))
            .then_some(first)
    }
}

/// `D[A]ρ = AρA† − ½{A†A, ρ}`.
pub fn lindblad_d(a: &Operator, basis: &Arc<VecBasis>) -> Result<Superoperator> {
    dissipator_from_jumps(&[(1.0, a.clone())], basis)
}

/// `Σ γ_k D[A_k]` lifted in one pass.
pub fn dissipator_from_jumps(jumps: &[(f64, Operator)], basis: &Arc<VecBasis>) -> Result<Superoperator> {
    let Some((_, first)) = jumps.first() else {
        return Err(Error::InvalidParameter("no jump operators".into()));
    };
    let id = Operator::identity(first.layout());
    let mut owned: Vec<(f64, Operator, Operator)> = Vec::with_capacity(jumps.len());
    for (g, a) in jumps {
        if *g < 0.0 {
            return Err(Error::InvalidParameter(format!("negative rate {g}")));
        }
        if *g == 0.0 {
            continue;
        }
        let ad = a.adjoint();
        let ada = ad.try_mul(a)?;
        owned.push((*g, ad, ada));
    }
    if owned.is_empty() {
        return Superoperator::zero(first.layout(), basis);
    }
    let mut terms: Vec<(C64, &Operator, &Operator)> = Vec::with_capacity(3 * owned.len());
    for ((g, ad, ada), (_, a)) in owned.iter().zip(jumps.iter().filter(|(g, _)| *g != 0.0)) {
        terms.push((C64::new(*g, 0.0), a, ad));
        terms.push((C64::new(-0.5 * g, 0.0), ada, &id));
        terms.push((C64::new(-0.5 * g, 0.0), &id, ada));
    }
    Superoperator::from_sandwiches(basis, &terms)
}

fn make_basis(system: &SystemSpec, choice: BasisChoice) -> Result<Arc<VecBasis>> {
    Ok(Arc::new(match choice {
        BasisChoice::Full => VecBasis::full(system.hamiltonian.dim()),
        BasisChoice::ChargeSector => VecBasis::charge_sector(&system.number)?,
    }))
}

/// Hamiltonian entering the coherent part. The wide-band limit carries no
/// Lamb shift, so this is `H_S` itself.
fn coherent_hamiltonian(system: &SystemSpec) -> Operator {
    system.hamiltonian.clone()
}

/// Spectrum of `H_S`, with sector labels when the number operator allows it.
pub fn system_spectrum(system: &SystemSpec, tol_bohr: f64) -> Result<Spectrum> {
    let s = Spectrum::new(&system.hamiltonian, tol_bohr)?;
    match s.clone().with_sectors(&system.number) {
        Ok(s) => Ok(s),
        Err(_) => Ok(s),
    }
}

/// Bohr components of every coupling.
pub fn system_components(
    spectrum: &Spectrum,
    system: &SystemSpec,
    sector_resolved: bool,
) -> Result<Vec<BohrComponent>> {
    let mut out = Vec::new();
    for c in &system.couplings {
        out.extend(spectrum.decompose(c, sector_resolved)?);
    }
    Ok(out)
}

/// Verifies that, per bath, the negative-frequency components are the
/// adjoints of the positive ones (Hermiticity of the total coupling).
fn check_mirror(components: &[BohrComponent], baths: &[BathSpec], spectrum: &Spectrum) -> Result<()> {
    let tol = spectrum.tol_bohr() * spectrum.scale();
    for b in baths {
        let comps: Vec<&BohrComponent> =
            components.iter().filter(|c| c.bath_id == b.id && c.system_frequency.abs() > tol).collect();
        let mut freqs: Vec<f64> = comps.iter().map(|c| c.system_frequency.abs()).collect();
        freqs.sort_by(f64::total_cmp);
        freqs.dedup_by(|a, b| (*a - *b).abs() <= tol);
        for w in freqs {
            let layout = spectrum.hamiltonian().layout();
            let mut pos = Operator::zeros(layout);
            let mut neg = Operator::zeros(layout);
            for c in &comps {
                if (c.system_frequency - w).abs() <= tol {
                    pos = pos.try_add(&c.operator)?;
                } else if (c.system_frequency + w).abs() <= tol {
                    neg = neg.try_add(&c.operator)?;
                }
            }
            let r = neg.max_abs_diff(&pos.adjoint())?;
            if r > TOL_STRUCT * pos.max_abs().max(neg.max_abs()).max(1.0) {
                return Err(Error::MirrorMismatch { residual: r });
            }
        }
    }
    Ok(())
}

/// Resolves a preset against the computed components.
pub fn resolve_grouping(preset: &GroupingPreset, components: &[BohrComponent]) -> Result<FrequencyGrouping> {
    match preset {
        GroupingPreset::Global => Ok(FrequencyGrouping::singletons(components)),
        GroupingPreset::Local => Ok(FrequencyGrouping::per_bath(components)),
        GroupingPreset::SemiLocal => FrequencyGrouping::per_bath_and_sector(components),
        GroupingPreset::Auto { eps_cluster, gap_min } => {
            let f: Vec<f64> = components.iter().filter(|c| c.frequency > 0.0).map(|c| c.frequency).collect();
            group_frequencies(&f, *eps_cluster, *gap_min, &SetFrequencyPolicy::Mean)
        }
        GroupingPreset::Custom(g) => Ok(g.clone()),
    }
}

/// Unified generator for a grouping preset.
pub fn build_unified_preset(
    system: &SystemSpec,
    preset: &GroupingPreset,
    opts: &BuildOptions,
) -> Result<GeneratorBundle> {
    system.validate()?;
    let spectrum = system_spectrum(system, opts.tol_bohr)?;
    let components = system_components(&spectrum, system, preset.sector_resolved())?;
    let grouping = resolve_grouping(preset, &components)?;
    build_unified_from(system, &spectrum, &components, &grouping, opts)
}

/// Unified generator for an explicit grouping.
pub fn build_unified(
    system: &SystemSpec,
    grouping: &FrequencyGrouping,
    opts: &BuildOptions,
) -> Result<GeneratorBundle> {
    build_unified_preset(system, &GroupingPreset::Custom(grouping.clone()), opts)
}

/// Unified generator from precomputed components.
pub fn build_unified_from(
    system: &SystemSpec,
    spectrum: &Spectrum,
    components: &[BohrComponent],
    grouping: &FrequencyGrouping,
    opts: &BuildOptions,
) -> Result<GeneratorBundle> {
    check_mirror(components, &system.baths, spectrum)?;
    let basis = make_basis(system, opts.basis)?;
    let grouped = build_grouped_jumps(components, grouping)?;
    let tol_c = opts.tol_consistency * spectrum.scale();

    let common = if system.has_frame_offsets() {
        None
    } else {
        Some(build_thermo_hamiltonian_with(spectrum, components, grouping, tol_c)?)
    };

    let mut channels = Vec::new();
    let mut per_bath_td = Vec::new();
    for b in &system.baths {
        let mut jumps = Vec::new();
        for j in grouped.iter().filter(|j| j.bath_id == b.id) {
            if j.frequency == 0.0 {
                if j.operator.max_abs() > 0.0 {
                    log::warn!("bath {}: zero-frequency component ignored", b.id);
                }
                continue;
            }
            if j.frequency < 0.0 {
                continue;
            }
            let r = rate(b, j.frequency, j.charge)?;
            jumps.push(RatedJump {
                rate: r.emission,
                operator: j.operator.clone(),
                frequency: j.frequency,
                charge: j.charge,
                channel: j.channel,
            });
            jumps.push(RatedJump {
                rate: r.absorption,
                operator: j.operator.adjoint(),
                frequency: -j.frequency,
                charge: -j.charge,
                channel: j.channel,
            });
        }
        let dissipator = bath_dissipator(&jumps, system, &basis)?;
        let thermo = match &common {
            Some(h) => h.clone(),
            None => {
                let own: Vec<BohrComponent> = components.iter().filter(|c| c.bath_id == b.id).cloned().collect();
                build_thermo_hamiltonian_with(spectrum, &own, grouping, tol_c)?
            }
        };
        per_bath_td.push(thermo.clone());
        channels.push(BathChannel {
            bath: b.clone(),
            dissipator,
            jumps,
            thermo_hamiltonian: thermo,
            heat_rule: HeatRule::ThermoHamiltonian,
        });
    }

    let drive = if !system.has_frame_offsets() {
        DriveBookkeeping::None
    } else {
        let first = &per_bath_td[0];
        let scale = first.max_abs().max(1.0);
        let same = per_bath_td.iter().all(|h| h.max_abs_diff(first).is_ok_and(|d| d <= 1e-10 * scale));
        if same {
            DriveBookkeeping::Commutator { thermo: first.clone() }
        } else if let Some(h) = accepted_candidate(system, &grouped, tol_c)? {
            for ch in &mut channels {
                ch.thermo_hamiltonian = h.clone();
            }
            DriveBookkeeping::Commutator { thermo: h }
        } else {
            DriveBookkeeping::Closure
        }
    };

    Ok(GeneratorBundle {
        approach: Approach::Unified(grouping.clone()),
        hamiltonian: system.hamiltonian.clone(),
        number: system.number.clone(),
        hamiltonian_part: Superoperator::hamiltonian(&coherent_hamiltonian(system), &basis)?,
        baths: channels,
        drive,
        basis,
    })
}

/// The candidate thermodynamic Hamiltonian, if every grouped jump is a
/// ladder operator of it at its set frequency.
fn accepted_candidate(system: &SystemSpec, grouped: &[GroupedJump], tol: f64) -> Result<Option<Operator>> {
    let Some(h) = &system.thermo_candidate else {
        return Ok(None);
    };
    for j in grouped.iter().filter(|j| j.frequency != 0.0) {
        let r = j.operator.commutator(h)?.max_abs_diff(&j.operator.scale_real(j.frequency))?;
        if r > tol * j.operator.max_abs().max(1.0) {
            return Ok(None);
        }
    }
    Ok(Some(h.clone()))
}

fn bath_dissipator(jumps: &[RatedJump], system: &SystemSpec, basis: &Arc<VecBasis>) -> Result<Superoperator> {
    if jumps.is_empty() {
        return Superoperator::zero(system.hamiltonian.layout(), basis);
    }
    let list: Vec<(f64, Operator)> = jumps.iter().map(|j| (j.rate, j.operator.clone())).collect();
    dissipator_from_jumps(&list, basis)
}

/// A bath's local mode for the conventional local approach.
#[derive(Debug, Clone)]
pub struct LocalMode {
    pub bath_id: String,
    /// Annihilation operator of the mode the bath touches.
    pub operator: Operator,
    /// Bare frequency of that mode.
    pub frequency: f64,
    pub charge: i32,
}

/// Local dissipators with each bath's occupation at its own mode frequency;
/// heat is booked with `H_S`.
pub fn build_conventional_local(
    system: &SystemSpec,
    modes: &[LocalMode],
    opts: &BuildOptions,
) -> Result<GeneratorBundle> {
    system.validate()?;
    if system.has_frame_offsets() {
        return Err(Error::NoLocalStructure("conventional local dissipators need a time-independent model".into()));
    }
    let basis = make_basis(system, opts.basis)?;
    let mut channels = Vec::new();
    for b in &system.baths {
        let mut jumps = Vec::new();
        for m in modes.iter().filter(|m| m.bath_id == b.id) {
            let r = rate(b, m.frequency, m.charge)?;
            jumps.push(RatedJump {
                rate: r.emission,
                operator: m.operator.clone(),
                frequency: m.frequency,
                charge: m.charge,
                channel: -1,
            });
            jumps.push(RatedJump {
                rate: r.absorption,
                operator: m.operator.adjoint(),
                frequency: -m.frequency,
                charge: -m.charge,
                channel: 1,
            });
        }
        if jumps.is_empty() {
            return Err(Error::NoLocalStructure(format!("no local mode for bath {}", b.id)));
        }
        channels.push(BathChannel {
            bath: b.clone(),
            dissipator: bath_dissipator(&jumps, system, &basis)?,
            jumps,
            thermo_hamiltonian: system.hamiltonian.clone(),
            heat_rule: HeatRule::ThermoHamiltonian,
        });
    }
    Ok(GeneratorBundle {
        approach: Approach::ConventionalLocal,
        hamiltonian: system.hamiltonian.clone(),
        number: system.number.clone(),
        hamiltonian_part: Superoperator::hamiltonian(&coherent_hamiltonian(system), &basis)?,
        baths: channels,
        drive: DriveBookkeeping::None,
        basis,
    })
}

/// PERLind generator from the system's own Bohr components.
pub fn build_perlind_system(system: &SystemSpec, opts: &BuildOptions) -> Result<GeneratorBundle> {
    system.validate()?;
    let spectrum = system_spectrum(system, opts.tol_bohr)?;
    let components = system_components(&spectrum, system, false)?;
    check_mirror(&components, &system.baths, &spectrum)?;
    build_perlind(system, &components, opts)
}

/// One jump per (bath, channel) mixing square-root rates across frequencies:
/// `J = Σ_j √Γ(ω_j) S_j` for emission and `Σ_j √Γ_abs(ω_j) S_j†` for absorption.
pub fn build_perlind(
    system: &SystemSpec,
    components: &[BohrComponent],
    opts: &BuildOptions,
) -> Result<GeneratorBundle> {
    let basis = make_basis(system, opts.basis)?;
    let driven = system.has_frame_offsets();
    let layout = system.hamiltonian.layout();
    let mut channels = Vec::new();
    for b in &system.baths {
        let mut channel_ids: Vec<i32> = components.iter().filter(|c| c.bath_id == b.id).map(|c| c.channel).collect();
        channel_ids.sort_unstable();
        channel_ids.dedup();
        let mut jumps = Vec::new();
        let mut terms = Vec::new();
        for k in channel_ids {
            let pos: Vec<&BohrComponent> =
                components.iter().filter(|c| c.bath_id == b.id && c.channel == k && c.frequency > 0.0).collect();
            if pos.is_empty() {
                continue;
            }
            let mut em = Operator::zeros(layout);
            let mut ab = Operator::zeros(layout);
            let mut term = SymmetrizedTerm { emission: Vec::new(), absorption: Vec::new() };
            for c in &pos {
                let r = rate(b, c.frequency, c.charge)?;
                let e_part = c.operator.scale_real(r.emission.sqrt());
                let a_part = c.operator.adjoint().scale_real(r.absorption.sqrt());
                em = em.try_add(&e_part)?;
                ab = ab.try_add(&a_part)?;
                let energy = c.frequency - b.chemical_potential * c.charge as f64;
                term.emission.push(WeightedPart { energy, operator: e_part });
                term.absorption.push(WeightedPart { energy, operator: a_part });
            }
            let charge = pos[0].charge;
            jumps.push(RatedJump { rate: 1.0, operator: em, frequency: f64::NAN, charge, channel: k });
            jumps.push(RatedJump { rate: 1.0, operator: ab, frequency: f64::NAN, charge: -charge, channel: k });
            terms.push(term);
        }
        channels.push(BathChannel {
            bath: b.clone(),
            dissipator: bath_dissipator(&jumps, system, &basis)?,
            jumps,
            thermo_hamiltonian: system.hamiltonian.clone(),
            heat_rule: if driven { HeatRule::Symmetrized(terms) } else { HeatRule::ThermoHamiltonian },
        });
    }
    Ok(GeneratorBundle {
        approach: Approach::PerLind,
        hamiltonian: system.hamiltonian.clone(),
        number: system.number.clone(),
        hamiltonian_part: Superoperator::hamiltonian(&coherent_hamiltonian(system), &basis)?,
        baths: channels,
        drive: if driven { DriveBookkeeping::Closure } else { DriveBookkeeping::None },
        basis,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};

    use super::*;
    use crate::operators::{ladder, DensityMatrix, ModeLayout};

    #[test]
    fn identity_jump_is_zero() {
        let l = Arc::new(ModeLayout::fermions(2).unwrap());
        let basis = Arc::new(VecBasis::full(4));
        let d = lindblad_d(&Operator::identity(&l), &basis).unwrap();
        assert!(d.max_abs() < 1e-15);
    }

    #[test]
    fn single_photon_decay() {
        let l = Arc::new(ModeLayout::new(vec![crate::Mode::Boson { cutoff: 1 }]).unwrap());
        let a = ladder(&l, 0).unwrap();
        let d = lindblad_d(&a, &Arc::new(VecBasis::full(2))).unwrap();
        let out = d.apply(DensityMatrix::basis_state(&l, 1).unwrap().op()).unwrap();
        assert_eq!(out.get(0, 0), C64::new(1.0, 0.0));
        assert_eq!(out.get(1, 1), C64::new(-1.0, 0.0));
        assert_eq!(out.get(0, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn dissipator_is_traceless() {
        let l = Arc::new(ModeLayout::new(vec![crate::Mode::Boson { cutoff: 2 }, crate::Mode::Fermion]).unwrap());
        let d = l.total_dim();
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let m = faer::Mat::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let a = Operator::from_matrix(l.clone(), m).unwrap();
        let basis = Arc::new(VecBasis::full(d));
        let s = lindblad_d(&a, &basis).unwrap();
        assert!(s.trace_preservation_residual() < 1e-13);
        let rho = DensityMatrix::random(&l, &mut rng);
        assert!(s.apply(rho.op()).unwrap().trace().norm() < 1e-14);
    }
}
