use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::{eigh, DensityMatrix, Operator, Superoperator};

#[derive(Debug, Clone, Copy)]
pub struct SteadyOptions {
    /// Bound on `‖L vec(ρ)‖_∞` before Hermitization.
    pub tol_ss: f64,
    /// Negative eigenvalues beyond this are reported as a warning.
    pub tol_pos: f64,
    /// Largest acceptable entry of the raw solution.
    pub max_norm: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self { tol_ss: 1e-10, tol_pos: 1e-8, max_norm: 1e12 }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// `‖L vec(ρ)‖_∞` of the raw solution.
    pub residual: f64,
    /// Total weight of eigenvalues clipped to zero.
    pub clipped: f64,
    pub method: &'static str,
}

pub fn steady_state(l: &Superoperator, tol_ss: f64) -> Result<SteadyStateResult> {
    steady_state_with(l, &SteadyOptions { tol_ss, ..SteadyOptions::default() })
}

/// Stationary state from the bordered system: the row of `⟨0|·|0⟩` is
/// replaced by the trace functional with right-hand side 1.
pub fn steady_state_with(l: &Superoperator, opts: &SteadyOptions) -> Result<SteadyStateResult> {
    let basis = l.basis();
    let n = l.len();
    let r0 = basis.position(0, 0).ok_or_else(|| Error::InvalidParameter("basis lacks the (0,0) entry".into()))?;
    let mut trips: Vec<Triplet<usize, usize, C64>> = l.triplets().into_iter().filter(|t| t.row != r0).collect();
    for p in basis.trace_positions() {
        trips.push(Triplet::new(r0, p, C64::new(1.0, 0.0)));
    }
    let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &trips)
        .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;
    let lu = a.sp_lu().map_err(|_| Error::SingularSystem)?;
    let mut rhs = Mat::<C64>::zeros(n, 1);
    rhs[(r0, 0)] = C64::new(1.0, 0.0);
    let x = lu.solve(&rhs);
    let v: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() > opts.max_norm) {
        return Err(Error::SingularSystem);
    }
    let residual = l.apply_vec(&v).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > opts.tol_ss {
        return Err(Error::ResidualTooLarge { residual, tol: opts.tol_ss });
    }
    let op = basis.unvectorize(l.layout(), &v)?;
    let (rho, clipped) = project_to_states(&op.hermitian_part())?;
    if clipped > opts.tol_pos {
        log::warn!("steady state: clipped negative eigenvalue weight {clipped:.3e}");
    }
    Ok(SteadyStateResult { rho, residual, clipped, method: "bordered-sparse-lu" })
}

/// Clips negative eigenvalues of a Hermitian operator to zero and renormalizes.
pub(crate) fn project_to_states(op: &Operator) -> Result<(DensityMatrix, f64)> {
    let e = eigh(op)?;
    let clipped: f64 = e.values.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    let out = if clipped > 0.0 {
        let vals: Vec<f64> = e.values.iter().map(|&x| x.max(0.0)).collect();
        let m = e.reconstruct(&vals);
        Operator::from_matrix(op.layout().clone(), m)?.hermitian_part()
    } else {
        op.clone()
    };
    let tr = out.trace().re;
    if !(tr > 0.0) {
        return Err(Error::InvalidState(format!("steady state has trace {tr}")));
    }
    Ok((DensityMatrix::new_unchecked(out.scale_real(1.0 / tr)), clipped))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::baths::{bose_function, BathSpec};
    use crate::dissipators::{build_unified_preset, BuildOptions, GroupingPreset, SystemSpec};
    use crate::operators::{ladder, number_operator, ModeLayout, VecBasis};
    use crate::solvers::assemble_liouvillian;
    use crate::spectral::CouplingSpec;

    fn single_mode(cutoff: usize, omega: f64, t: f64, kappa: f64) -> (SystemSpec, Operator) {
        let l = Arc::new(ModeLayout::new(vec![crate::Mode::Boson { cutoff }]).unwrap());
        let a = ladder(&l, 0).unwrap();
        let n = number_operator(&l, 0).unwrap();
        let sys = SystemSpec {
            hamiltonian: n.scale_real(omega),
            number: n.clone(),
            couplings: vec![CouplingSpec::new("b", -1, a.clone(), 1), CouplingSpec::new("b", 1, a.adjoint(), -1)],
            baths: vec![BathSpec::bose("b", t, kappa).unwrap()],
            thermo_candidate: None,
        };
        (sys, n)
    }

    #[test]
    fn thermal_occupation_of_single_mode() {
        let (sys, n) = single_mode(40, 1.0, 0.5, 0.1);
        let b = build_unified_preset(&sys, &GroupingPreset::Global, &BuildOptions::default()).unwrap();
        let l = assemble_liouvillian(&b).unwrap();
        let ss = steady_state(&l, 1e-10).unwrap();
        let occ = ss.rho.expect(&n).unwrap();
        assert!((occ - bose_function(2.0)).abs() < 1e-12, "{occ}");
    }

    #[test]
    fn zero_liouvillian_is_singular() {
        let l = Arc::new(ModeLayout::fermions(1).unwrap());
        let z = Superoperator::zero(&l, &Arc::new(VecBasis::full(2))).unwrap();
        assert!(steady_state(&z, 1e-10).is_err());
    }
}
