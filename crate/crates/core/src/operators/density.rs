use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::Rng;

use super::eigen::eigh;
use super::layout::ModeLayout;
use super::operator::Operator;
use crate::error::{Error, Result};

/// Validation tolerances for density matrices.
#[derive(Debug, Clone, Copy)]
pub struct StateTolerances {
    pub herm: f64,
    pub trace: f64,
    pub pos: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        Self { herm: 1e-10, trace: 1e-9, pos: 1e-8 }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tolerances(op, StateTolerances::default())
    }

    pub fn with_tolerances(op: Operator, tol: StateTolerances) -> Result<Self> {
        let dev = op.hermiticity_deviation();
        if dev > tol.herm {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eigh(&op)?.values.first().copied().unwrap_or(0.0);
        if min < -tol.pos {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { op })
    }

    /// Skips validation; for states produced by trusted internal routines.
    pub(crate) fn new_unchecked(op: Operator) -> Self {
        Self { op }
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(layout: &Arc<ModeLayout>, psi: &[C64]) -> Result<Self> {
        let d = layout.total_dim();
        if psi.len() != d {
            return Err(Error::LayoutMismatch(format!("state vector has {} entries, expected {d}", psi.len())));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let m = Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Ok(Self { op: Operator::from_matrix(layout.clone(), m)? })
    }

    /// Projector onto basis state `index`.
    pub fn basis_state(layout: &Arc<ModeLayout>, index: usize) -> Result<Self> {
        let mut psi = vec![C64::new(0.0, 0.0); layout.total_dim()];
        *psi.get_mut(index).ok_or_else(|| Error::InvalidParameter(format!("basis index {index} out of range")))? =
            C64::new(1.0, 0.0);
        Self::pure(layout, &psi)
    }

    pub fn maximally_mixed(layout: &Arc<ModeLayout>) -> Self {
        let d = layout.total_dim() as f64;
        Self { op: Operator::identity(layout).scale_real(1.0 / d) }
    }

    /// Random full-rank state `G G† / Tr(G G†)` with complex Gaussian-like `G`.
    pub fn random<R: Rng + ?Sized>(layout: &Arc<ModeLayout>, rng: &mut R) -> Self {
        let d = layout.total_dim();
        let g = Mat::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let mut m = &g * g.adjoint();
        let tr: f64 = (0..d).map(|i| m[(i, i)].re).sum();
        for j in 0..d {
            for i in 0..d {
                m[(i, j)] /= tr;
            }
        }
        let op = Operator::from_matrix(layout.clone(), m).expect("dimension matches");
        Self { op: op.hermitian_part() }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn layout(&self) -> &Arc<ModeLayout> {
        self.op.layout()
    }

    /// `Re Tr{A ρ}`.
    pub fn expect(&self, a: &Operator) -> Result<f64> {
        Ok(a.trace_product(&self.op)?.re)
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        let diff = self.op.try_sub(&other.op)?.hermitian_part();
        Ok(0.5 * eigh(&diff)?.values.iter().map(|v| v.abs()).sum::<f64>())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigh(&self.op)?.values.first().copied().unwrap_or(0.0))
    }
}
