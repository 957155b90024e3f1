//! Liouvillian assembly, steady states, time evolution and the
//! second-moment solver for quadratic bosonic models.

mod cutoff;
mod evolve;
mod moments;
mod steady;

pub use cutoff::{converge_cutoff, CutoffResult, CUTOFF_MAX, CUTOFF_RTOL, CUTOFF_START};
pub use evolve::{evolve, EvolveOptions, Trajectory};
pub use moments::{
    quadratic_steady_moments, LinearJump, MomentState, QuadraticBath, QuadraticHeatRule, QuadraticModel,
};
pub use steady::{steady_state, steady_state_with, SteadyOptions, SteadyStateResult};

use crate::dissipators::GeneratorBundle;
use crate::error::{Error, Result};
use crate::operators::Superoperator;
use num_complex::Complex64 as C64;

/// `−i[H_S, ·] + Σ_α L_α`.
pub fn assemble_liouvillian(bundle: &GeneratorBundle) -> Result<Superoperator> {
    let one = C64::new(1.0, 0.0);
    let mut terms: Vec<(C64, &Superoperator)> = vec![(one, &bundle.hamiltonian_part)];
    for b in &bundle.baths {
        if b.dissipator.basis() != bundle.hamiltonian_part.basis() {
            return Err(Error::LayoutMismatch(format!("dissipator of bath {} uses another basis", b.bath.id)));
        }
        terms.push((one, &b.dissipator));
    }
    Superoperator::linear_combination(&terms)
}
