use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::dissipators::{DriveBookkeeping, GeneratorBundle, HeatRule};
use crate::error::{Error, Result};
use crate::operators::{ladder, Operator};

/// Relative tolerance for recognizing quadratic and linear operators.
const TOL_FORM: f64 = 1e-9;

/// `J = Σ_i u_i a_i + Σ_i v_i a_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearJump {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl LinearJump {
    fn is_loss(&self) -> bool {
        self.v.iter().all(|z| z.norm() == 0.0)
    }

    fn is_gain(&self) -> bool {
        self.u.iter().all(|z| z.norm() == 0.0)
    }
}

#[derive(Debug, Clone)]
pub enum QuadraticHeatRule {
    /// Coefficient matrix of `H_TD^α` (without `−μN`).
    Thermo(Mat<C64>),
    /// `(emission, absorption)` parts per channel with their energies.
    Symmetrized(Vec<(Vec<(f64, LinearJump)>, Vec<(f64, LinearJump)>)>),
}

#[derive(Debug, Clone)]
pub struct QuadraticBath {
    pub id: String,
    pub temperature: f64,
    pub chemical_potential: f64,
    pub jumps: Vec<(f64, LinearJump)>,
    pub heat: QuadraticHeatRule,
}

/// Mode-space data of a generator with quadratic `H` and linear jumps.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    /// `H = Σ h_ij a_i† a_j + const`.
    pub h: Mat<C64>,
    pub baths: Vec<QuadraticBath>,
    /// Coefficients of the single thermodynamic Hamiltonian used for `P_ext`.
    pub drive: Option<Mat<C64>>,
    pub closure: bool,
}

/// Second moments `M_ij = ⟨a_i† a_j⟩`.
#[derive(Debug, Clone)]
pub struct MomentState {
    pub m: Mat<C64>,
}

struct ModeBasis {
    vac: usize,
    single: Vec<usize>,
    ladders: Vec<Operator>,
}

impl ModeBasis {
    fn new(op: &Operator) -> Result<Self> {
        let layout = op.layout();
        if layout.has_fermions() {
            return Err(Error::NonQuadratic("moment closure is implemented for bosonic modes only".into()));
        }
        let m = layout.num_modes();
        let vac = layout.index_of(&vec![0; m]).ok_or_else(|| Error::NonQuadratic("no vacuum state".into()))?;
        let mut single = Vec::with_capacity(m);
        for i in 0..m {
            let mut occ = vec![0u32; m];
            occ[i] = 1;
            single.push(layout.index_of(&occ).ok_or_else(|| Error::NonQuadratic("cutoff below one".into()))?);
        }
        let ladders = (0..m).map(|i| ladder(layout, i)).collect::<Result<Vec<_>>>()?;
        Ok(Self { vac, single, ladders })
    }

    fn quadratic(&self, op: &Operator, what: &str) -> Result<Mat<C64>> {
        let m = self.single.len();
        let c = op.get(self.vac, self.vac);
        let h = Mat::from_fn(m, m, |i, j| {
            let z = op.get(self.single[i], self.single[j]);
            if i == j {
                z - c
            } else {
                z
            }
        });
        let mut terms: Vec<(C64, Operator)> = vec![(c, Operator::identity(op.layout()))];
        for i in 0..m {
            for j in 0..m {
                if h[(i, j)].norm() != 0.0 {
                    terms.push((h[(i, j)], self.ladders[i].adjoint().try_mul(&self.ladders[j])?));
                }
            }
        }
        let refs: Vec<(C64, &Operator)> = terms.iter().map(|(c, o)| (*c, o)).collect();
        let back = Operator::linear_combination(&refs)?;
        let dev = back.max_abs_diff(op)?;
        if dev > TOL_FORM * op.max_abs().max(1.0) {
            return Err(Error::NonQuadratic(format!("{what} is not quadratic (deviation {dev:.3e})")));
        }
        Ok(h)
    }

    fn linear(&self, op: &Operator, what: &str) -> Result<LinearJump> {
        let u: Vec<C64> = self.single.iter().map(|&s| op.get(self.vac, s)).collect();
        let v: Vec<C64> = self.single.iter().map(|&s| op.get(s, self.vac)).collect();
        let mut back = Operator::zeros(op.layout());
        for (i, a) in self.ladders.iter().enumerate() {
            back = back.try_add(&a.scale(u[i]))?.try_add(&a.adjoint().scale(v[i]))?;
        }
        let dev = back.max_abs_diff(op)?;
        if dev > TOL_FORM * op.max_abs().max(1.0) {
            return Err(Error::NonQuadratic(format!(
                "{what} is not linear in the mode operators (deviation {dev:.3e})"
            )));
        }
        let jump = LinearJump { u, v };
        if !jump.is_loss() && !jump.is_gain() {
            return Err(Error::NonQuadratic(format!("{what} mixes creation and annihilation")));
        }
        Ok(jump)
    }
}

impl QuadraticModel {
    pub fn from_bundle(bundle: &GeneratorBundle) -> Result<Self> {
        let basis = ModeBasis::new(&bundle.hamiltonian)?;
        let h = basis.quadratic(&bundle.hamiltonian, "H_S")?;
        let mut baths = Vec::new();
        for b in &bundle.baths {
            let jumps = b
                .jumps
                .iter()
                .filter(|j| j.rate > 0.0)
                .map(|j| Ok((j.rate, basis.linear(&j.operator, "jump operator")?)))
                .collect::<Result<Vec<_>>>()?;
            let heat = match &b.heat_rule {
                HeatRule::ThermoHamiltonian => {
                    QuadraticHeatRule::Thermo(basis.quadratic(&b.thermo_hamiltonian, "H_TD")?)
                }
                HeatRule::Symmetrized(terms) => {
                    let mut out = Vec::new();
                    for t in terms {
                        let conv = |parts: &[crate::dissipators::WeightedPart]| {
                            parts
                                .iter()
                                .map(|p| Ok((p.energy, basis.linear(&p.operator, "jump part")?)))
                                .collect::<Result<Vec<_>>>()
                        };
                        out.push((conv(&t.emission)?, conv(&t.absorption)?));
                    }
                    QuadraticHeatRule::Symmetrized(out)
                }
            };
            baths.push(QuadraticBath {
                id: b.bath.id.clone(),
                temperature: b.bath.temperature,
                chemical_potential: b.bath.chemical_potential,
                jumps,
                heat,
            });
        }
        let (drive, closure) = match &bundle.drive {
            DriveBookkeeping::None => (None, false),
            DriveBookkeeping::Commutator { thermo } => (Some(basis.quadratic(thermo, "H_TD")?), false),
            DriveBookkeeping::Closure => (None, true),
        };
        Ok(Self { h, baths, drive, closure })
    }

    pub fn num_modes(&self) -> usize {
        self.h.nrows()
    }

    pub fn bath(&self, id: &str) -> Result<&QuadraticBath> {
        self.baths.iter().find(|b| b.id == id).ok_or_else(|| Error::UnknownBath(id.into()))
    }

    /// Loss and gain matrices `A_ik = Σ γ u_i ū_k`, `B_ik = Σ γ v̄_i v_k`.
    fn loss_gain(&self, bath: &QuadraticBath) -> (Mat<C64>, Mat<C64>) {
        let m = self.num_modes();
        let mut a = Mat::<C64>::zeros(m, m);
        let mut b = Mat::<C64>::zeros(m, m);
        for (g, j) in &bath.jumps {
            for i in 0..m {
                for k in 0..m {
                    a[(i, k)] += *g * j.u[i] * j.u[k].conj();
                    b[(i, k)] += *g * j.v[i].conj() * j.v[k];
                }
            }
        }
        (a, b)
    }

    /// Contribution of one bath to `dM/dt`.
    pub fn bath_rate(&self, bath: &QuadraticBath, state: &MomentState) -> Mat<C64> {
        let (a, b) = self.loss_gain(bath);
        let m = &state.m;
        let am = &a * m;
        let ma = m * &a;
        let bm = &b * m;
        let mb = m * &b;
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
            -0.5 * (am[(i, j)] + ma[(i, j)]) + 0.5 * (bm[(i, j)] + mb[(i, j)]) + b[(i, j)]
        })
    }

    /// Heat current into the system from one bath.
    pub fn heat_current(&self, id: &str, state: &MomentState) -> Result<f64> {
        let bath = self.bath(id)?;
        let m = &state.m;
        let n = self.num_modes();
        match &bath.heat {
            QuadraticHeatRule::Thermo(t) => {
                let g = self.bath_rate(bath, state);
                let mut s = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        let mut c = t[(i, j)];
                        if i == j {
                            c -= bath.chemical_potential;
                        }
                        s += c * g[(i, j)];
                    }
                }
                Ok(s.re)
            }
            QuadraticHeatRule::Symmetrized(terms) => {
                let mut s = C64::new(0.0, 0.0);
                for (em, ab) in terms {
                    for (e1, j1) in em {
                        for (e2, j2) in em {
                            let mut x = C64::new(0.0, 0.0);
                            for k in 0..n {
                                for l in 0..n {
                                    x += j1.u[k].conj() * j2.u[l] * m[(k, l)];
                                }
                            }
                            s -= 0.5 * (e1 + e2) * x;
                        }
                    }
                    for (e1, j1) in ab {
                        for (e2, j2) in ab {
                            let mut x = C64::new(0.0, 0.0);
                            for k in 0..n {
                                for l in 0..n {
                                    let aa = if k == l { m[(l, k)] + 1.0 } else { m[(l, k)] };
                                    x += j1.v[k].conj() * j2.v[l] * aa;
                                }
                            }
                            s += 0.5 * (e1 + e2) * x;
                        }
                    }
                }
                Ok(s.re)
            }
        }
    }

    /// `μ_α d⟨N⟩/dt` restricted to one bath.
    pub fn bath_power(&self, id: &str, state: &MomentState) -> Result<f64> {
        let bath = self.bath(id)?;
        if bath.chemical_potential == 0.0 {
            return Ok(0.0);
        }
        let g = self.bath_rate(bath, state);
        let tr: f64 = (0..self.num_modes()).map(|i| g[(i, i)].re).sum();
        Ok(bath.chemical_potential * tr)
    }

    /// `−i⟨[H_TD, H]⟩`, or `None` when only the steady-state closure applies.
    pub fn external_power(&self, state: &MomentState) -> Option<f64> {
        if self.closure {
            return None;
        }
        let Some(t) = &self.drive else {
            return Some(0.0);
        };
        let c = t * &self.h - &self.h * t;
        let n = self.num_modes();
        let mut s = C64::new(0.0, 0.0);
        for k in 0..n {
            for l in 0..n {
                s += c[(k, l)] * state.m[(k, l)];
            }
        }
        Some((C64::new(0.0, -1.0) * s).re)
    }
}

/// Stationary solution of `X M + M X† + B = 0`, `X = i hᵀ − A/2 + B/2`.
pub fn quadratic_steady_moments(model: &QuadraticModel) -> Result<MomentState> {
    let n = model.num_modes();
    let mut a = Mat::<C64>::zeros(n, n);
    let mut b = Mat::<C64>::zeros(n, n);
    for bath in &model.baths {
        let (ai, bi) = model.loss_gain(bath);
        a += &ai;
        b += &bi;
    }
    let i = C64::new(0.0, 1.0);
    let x = Mat::from_fn(n, n, |r, c| i * model.h[(c, r)] - 0.5 * a[(r, c)] + 0.5 * b[(r, c)]);
    // column-stacked: vec(XM) = (I⊗X) vec M, vec(M X†) = (X̄⊗I) vec M
    let nn = n * n;
    let k = Mat::from_fn(nn, nn, |p, q| {
        let (pi, pj) = (p % n, p / n);
        let (qi, qj) = (q % n, q / n);
        let mut z = C64::new(0.0, 0.0);
        if pj == qj {
            z += x[(pi, qi)];
        }
        if pi == qi {
            z += x[(pj, qj)].conj();
        }
        z
    });
    let rhs = Mat::from_fn(nn, 1, |p, _| -b[(p % n, p / n)]);
    let sol = k.partial_piv_lu().solve(&rhs);
    let m = Mat::from_fn(n, n, |r, c| sol[(r + c * n, 0)]);
    let mut dev = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let z = m[(r, c)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::SingularSystem);
            }
            dev = dev.max((z - m[(c, r)].conj()).norm());
        }
    }
    let scale = (0..n).map(|r| m[(r, r)].norm()).fold(1.0, f64::max);
    if dev > 1e-8 * scale || (0..n).any(|r| m[(r, r)].re < -1e-12 * scale) {
        return Err(Error::SingularSystem);
    }
    let m = Mat::from_fn(n, n, |r, c| 0.5 * (m[(r, c)] + m[(c, r)].conj()));
    Ok(MomentState { m })
}

impl MomentState {
    pub fn occupation(&self, mode: usize) -> f64 {
        self.m[(mode, mode)].re
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::baths::{bose_function, BathSpec};
    use crate::dissipators::{build_unified_preset, BuildOptions, GroupingPreset, SystemSpec};
    use crate::operators::{number_operator, ModeLayout};
    use crate::spectral::CouplingSpec;

    #[test]
    fn decoupled_mode_is_thermal() {
        let l = Arc::new(ModeLayout::new(vec![crate::Mode::Boson { cutoff: 3 }]).unwrap());
        let a = ladder(&l, 0).unwrap();
        let n = number_operator(&l, 0).unwrap();
        let sys = SystemSpec {
            hamiltonian: n.scale_real(1.3),
            number: n,
            couplings: vec![CouplingSpec::new("b", -1, a.clone(), 1), CouplingSpec::new("b", 1, a.adjoint(), -1)],
            baths: vec![BathSpec::bose("b", 0.9, 0.05).unwrap()],
            thermo_candidate: None,
        };
        let bundle = build_unified_preset(&sys, &GroupingPreset::Global, &BuildOptions::default()).unwrap();
        let q = QuadraticModel::from_bundle(&bundle).unwrap();
        let s = quadratic_steady_moments(&q).unwrap();
        assert!((s.occupation(0) - bose_function(1.3 / 0.9)).abs() < 1e-14);
        assert!(q.heat_current("b", &s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn fermions_are_rejected() {
        let l = Arc::new(ModeLayout::fermions(1).unwrap());
        let h = number_operator(&l, 0).unwrap();
        assert!(matches!(ModeBasis::new(&h), Err(Error::NonQuadratic(_))));
    }
}
