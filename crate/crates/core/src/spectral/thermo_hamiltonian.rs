use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::operators::Operator;

use super::bohr::{BohrComponent, Spectrum};
use super::grouping::FrequencyGrouping;

/// Matrix elements below this fraction of a component's largest one do not
/// create constraint edges.
const EDGE_CHOP: f64 = 1e-10;

/// Rescaled eigenvalues `E'` such that `E'_b − E'_a = ω_q` whenever a member
/// component has a nonzero element `⟨a|S_j|b⟩`.
///
/// Each connected component of the constraint graph is anchored at its
/// lowest-energy state, which keeps its `H_S` eigenvalue.
pub fn thermo_levels(
    spectrum: &Spectrum,
    components: &[BohrComponent],
    grouping: &FrequencyGrouping,
    tol_consistency: f64,
) -> Result<Vec<f64>> {
    let eig = spectrum.eigen();
    let d = eig.values.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d];
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for c in components {
        let target = grouping.assign(c)?.frequency;
        let m = eig.to_eigenbasis(c.operator.matrix());
        let mut max = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                max = max.max(m[(i, j)].norm());
            }
        }
        let cut = EDGE_CHOP * max;
        for b in 0..d {
            for a in 0..d {
                if m[(a, b)].norm() > cut && a != b {
                    adj[a].push((b, target));
                    adj[b].push((a, -target));
                    edges.push((a, b, target));
                }
            }
        }
    }

    let levels = &eig.values;
    let mut out = levels.clone();
    let mut seen = vec![false; d];
    // eigenvalues ascend, so the first unseen state is the component's lowest
    for start in 0..d {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for &(b, w) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    out[b] = out[a] + w;
                    queue.push_back(b);
                }
            }
        }
    }

    let mut residual = 0.0f64;
    for &(a, b, w) in &edges {
        residual = residual.max((out[b] - out[a] - w).abs());
    }
    if residual > tol_consistency {
        return Err(Error::InconsistentRescaling { residual });
    }
    Ok(out)
}

/// Thermodynamic Hamiltonian: `H_S` with eigenvalues replaced by
/// [`thermo_levels`], sharing the eigenbasis of `H_S`.
pub fn build_thermo_hamiltonian_with(
    spectrum: &Spectrum,
    components: &[BohrComponent],
    grouping: &FrequencyGrouping,
    tol_consistency: f64,
) -> Result<Operator> {
    let e = thermo_levels(spectrum, components, grouping, tol_consistency)?;
    let m = spectrum.eigen().reconstruct(&e);
    let op = Operator::from_matrix(spectrum.hamiltonian().layout().clone(), m)?;
    Ok(op.hermitian_part())
}

pub fn build_thermo_hamiltonian(
    h: &Operator,
    components: &[BohrComponent],
    grouping: &FrequencyGrouping,
    tol_consistency: f64,
) -> Result<Operator> {
    let spectrum = Spectrum::new(h, super::bohr::TOL_BOHR)?;
    build_thermo_hamiltonian_with(&spectrum, components, grouping, tol_consistency)
}

/// `max_j ‖[S_j, H_TD] − ω_q S_j‖_max` over the given components.
pub fn thermo_residual(h_td: &Operator, components: &[BohrComponent], grouping: &FrequencyGrouping) -> Result<f64> {
    let mut r = 0.0f64;
    for c in components {
        let w = grouping.assign(c)?.frequency;
        let comm = c.operator.commutator(h_td)?;
        r = r.max(comm.max_abs_diff(&c.operator.scale_real(w))?);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::operators::{ladder, ModeLayout};
    use crate::spectral::{CouplingSpec, SetFrequencyPolicy, TOL_BOHR};

    #[test]
    fn infeasible_cycle_is_detected() {
        // three levels 0, 1, 2.1 coupled pairwise
        let l = Arc::new(ModeLayout::new(vec![crate::Mode::Boson { cutoff: 2 }]).unwrap());
        let h = Operator::diagonal_from(&l, |s| [0.0, 1.0, 2.1][s[0] as usize]);
        let mut s = Operator::zeros(&l);
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            s.set(a, b, crate::C64::new(1.0, 0.0));
        }
        let spec = Spectrum::new(&h, TOL_BOHR).unwrap();
        let comps = spec.decompose(&CouplingSpec::new("b", 0, s, 0), false).unwrap();
        let grouping = crate::spectral::group_frequencies(
            &[1.0, 1.1, 2.1],
            0.2,
            0.5,
            &SetFrequencyPolicy::Explicit(vec![1.0, 2.1]),
        )
        .unwrap();
        let err = build_thermo_hamiltonian_with(&spec, &comps, &grouping, 1e-10).unwrap_err();
        assert!(matches!(err, Error::InconsistentRescaling { .. }));
    }

    #[test]
    fn singleton_grouping_keeps_levels() {
        let l = Arc::new(ModeLayout::fermions(2).unwrap());
        let (a, b) = (ladder(&l, 0).unwrap(), ladder(&l, 1).unwrap());
        let h = &(&(0.7 * &(&a.adjoint() * &a)) + &(1.3 * &(&b.adjoint() * &b)))
            + &(0.2 * &(&(&a.adjoint() * &b) + &(&b.adjoint() * &a)));
        let spec = Spectrum::new(&h, TOL_BOHR).unwrap();
        let mut comps = spec.decompose(&CouplingSpec::new("L", -1, a.clone(), 1), false).unwrap();
        comps.extend(spec.decompose(&CouplingSpec::new("R", -1, b.clone(), 1), false).unwrap());
        let grouping = FrequencyGrouping::singletons(&comps);
        let htd = build_thermo_hamiltonian_with(&spec, &comps, &grouping, 1e-10).unwrap();
        assert!(htd.max_abs_diff(&h).unwrap() < 1e-14);
    }
}
