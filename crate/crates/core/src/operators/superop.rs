//! Superoperators on vectorized density matrices.
//!
//! Convention (used everywhere in the crate): column stacking,
//! `vec(ρ)[i + j·d] = ρ_ij`. With it `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`, so
//! `left_mult(A) = I ⊗ A` and `right_mult(B) = Bᵀ ⊗ I`.
//!
//! A superoperator may be restricted to the charge-diagonal subspace spanned by
//! the pairs `(i, j)` with `N_i = N_j` (see [`VecBasis::charge_sector`]). The
//! restricted basis keeps the column-stacking order of its members.

use std::sync::Arc;

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64 as C64;

use super::layout::ModeLayout;
use super::operator::Operator;
use crate::error::{Error, Result};

const ABSENT: u32 = u32::MAX;
/// Relative size below which operator entries are dropped when lifting.
const CHOP: f64 = 1e-15;
/// Relative leak above which a restricted lift is rejected.
const LEAK_TOL: f64 = 1e-12;

/// Set of matrix positions `(i, j)` that a superoperator acts on.
#[derive(Debug, Clone)]
pub struct VecBasis {
    dim: usize,
    entries: Vec<(u32, u32)>,
    lookup: Option<Vec<u32>>,
}

impl PartialEq for VecBasis {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl VecBasis {
    /// All `d²` positions.
    pub fn full(dim: usize) -> Self {
        let entries = (0..dim).flat_map(|j| (0..dim).map(move |i| (i as u32, j as u32))).collect();
        Self { dim, entries, lookup: None }
    }

    /// Positions `(i, j)` with equal eigenvalues of a diagonal number operator.
    pub fn charge_sector(number: &Operator) -> Result<Self> {
        let d = number.dim();
        for j in 0..d {
            for i in 0..d {
                if i != j && number.get(i, j).norm() != 0.0 {
                    return Err(Error::InvalidParameter("charge sector needs a diagonal number operator".into()));
                }
            }
        }
        let charge: Vec<i64> = (0..d).map(|i| number.get(i, i).re.round() as i64).collect();
        let mut entries = Vec::new();
        let mut lookup = vec![ABSENT; d * d];
        for j in 0..d {
            for i in 0..d {
                if charge[i] == charge[j] {
                    lookup[i + j * d] = entries.len() as u32;
                    entries.push((i as u32, j as u32));
                }
            }
        }
        Ok(Self { dim: d, entries, lookup: Some(lookup) })
    }

    pub fn is_full(&self) -> bool {
        self.lookup.is_none()
    }

    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vectorized coordinates.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, k: usize) -> (usize, usize) {
        let (i, j) = self.entries[k];
        (i as usize, j as usize)
    }

    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        match &self.lookup {
            None => Some(i + j * self.dim),
            Some(l) => {
                let p = l[i + j * self.dim];
                (p != ABSENT).then_some(p as usize)
            }
        }
    }

    /// Coordinates of the diagonal entries, i.e. the trace functional.
    pub fn trace_positions(&self) -> Vec<usize> {
        (0..self.dim).filter_map(|i| self.position(i, i)).collect()
    }

    /// Vectorizes `op`; fails if it has weight outside the basis.
    pub fn vectorize(&self, op: &Operator) -> Result<Vec<C64>> {
        if op.dim() != self.dim {
            return Err(Error::LayoutMismatch("operator dimension differs from basis".into()));
        }
        if self.lookup.is_some() {
            let scale = op.max_abs().max(f64::MIN_POSITIVE);
            let mut leak = 0.0f64;
            for j in 0..self.dim {
                for i in 0..self.dim {
                    if self.position(i, j).is_none() {
                        leak = leak.max(op.get(i, j).norm());
                    }
                }
            }
            if leak > 1e-12 * scale.max(1.0) {
                return Err(Error::SectorNotInvariant { leak });
            }
        }
        Ok(self.entries.iter().map(|&(i, j)| op.get(i as usize, j as usize)).collect())
    }

    pub fn unvectorize(&self, layout: &Arc<ModeLayout>, v: &[C64]) -> Result<Operator> {
        if v.len() != self.len() || layout.total_dim() != self.dim {
            return Err(Error::LayoutMismatch("vector length differs from basis".into()));
        }
        let mut m = Mat::zeros(self.dim, self.dim);
        for (k, &(i, j)) in self.entries.iter().enumerate() {
            m[(i as usize, j as usize)] = v[k];
        }
        Operator::from_matrix(layout.clone(), m)
    }
}

/// Full-space column-stacked vectorization.
pub fn vectorize(op: &Operator) -> Vec<C64> {
    let d = op.dim();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(op.get(i, j));
        }
    }
    v
}

/// Nonzero pattern of a dense operator by column and by row.
struct SparsePattern {
    cols: Vec<Vec<(usize, C64)>>,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparsePattern {
    fn of(op: &Operator) -> Self {
        let d = op.dim();
        let cutoff = CHOP * op.max_abs();
        let mut cols = vec![Vec::new(); d];
        let mut rows = vec![Vec::new(); d];
        for j in 0..d {
            for i in 0..d {
                let z = op.get(i, j);
                if z.norm() > cutoff {
                    cols[j].push((i, z));
                    rows[i].push((j, z));
                }
            }
        }
        Self { cols, rows }
    }

    fn identity(d: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        Self { cols: (0..d).map(|i| vec![(i, one)]).collect(), rows: (0..d).map(|i| vec![(i, one)]).collect() }
    }
}

/// Sparse matrix acting on vectorized operators within a [`VecBasis`].
#[derive(Debug, Clone)]
pub struct Superoperator {
    layout: Arc<ModeLayout>,
    basis: Arc<VecBasis>,
    matrix: SparseColMat<usize, C64>,
}

impl Superoperator {
    fn from_triplets(layout: &Arc<ModeLayout>, basis: &Arc<VecBasis>, trips: &[Triplet<usize, usize, C64>]) -> Self {
        let n = basis.len();
        let matrix = SparseColMat::try_new_from_triplets(n, n, trips).expect("triplet indices are in range");
        Self { layout: layout.clone(), basis: basis.clone(), matrix }
    }

    fn check_layout(layout: &Arc<ModeLayout>, basis: &VecBasis) -> Result<()> {
        if layout.total_dim() != basis.dim() {
            Err(Error::LayoutMismatch("basis dimension differs from layout".into()))
        } else {
            Ok(())
        }
    }

    pub fn zero(layout: &Arc<ModeLayout>, basis: &Arc<VecBasis>) -> Result<Self> {
        Self::check_layout(layout, basis)?;
        Ok(Self::from_triplets(layout, basis, &[]))
    }

    pub fn identity(layout: &Arc<ModeLayout>, basis: &Arc<VecBasis>) -> Result<Self> {
        Self::check_layout(layout, basis)?;
        let one = C64::new(1.0, 0.0);
        let t: Vec<_> = (0..basis.len()).map(|k| Triplet::new(k, k, one)).collect();
        Ok(Self::from_triplets(layout, basis, &t))
    }

    /// `Σ c · (A ρ B)` for a list of `(c, A, B)` triples.
    pub fn from_sandwiches(basis: &Arc<VecBasis>, terms: &[(C64, &Operator, &Operator)]) -> Result<Self> {
        let layout = match terms.first() {
            Some((_, a, _)) => a.layout().clone(),
            None => return Err(Error::InvalidParameter("no terms to lift".into())),
        };
        Self::check_layout(&layout, basis)?;
        let d = basis.dim();
        let mut trips = Vec::new();
        let mut leak = 0.0f64;
        let mut scale = 0.0f64;
        for (c, a, b) in terms {
            if **a.layout() != *layout || **b.layout() != *layout {
                return Err(Error::LayoutMismatch("lifted operators live on different layouts".into()));
            }
            let pa = if is_identity(a) { SparsePattern::identity(d) } else { SparsePattern::of(a) };
            let pb = if is_identity(b) { SparsePattern::identity(d) } else { SparsePattern::of(b) };
            for col in 0..basis.len() {
                let (k, l) = basis.entry(col);
                for &(i, aik) in &pa.cols[k] {
                    for &(j, blj) in &pb.rows[l] {
                        let v = *c * aik * blj;
                        scale = scale.max(v.norm());
                        match basis.position(i, j) {
                            Some(row) => trips.push(Triplet::new(row, col, v)),
                            None => leak = leak.max(v.norm()),
                        }
                    }
                }
            }
        }
        if leak > LEAK_TOL * scale {
            return Err(Error::SectorNotInvariant { leak });
        }
        Ok(Self::from_triplets(&layout, basis, &trips))
    }

    /// `vec(ρ) ↦ vec(Aρ)`.
    pub fn left_mult(a: &Operator, basis: &Arc<VecBasis>) -> Result<Self> {
        let id = Operator::identity(a.layout());
        Self::from_sandwiches(basis, &[(C64::new(1.0, 0.0), a, &id)])
    }

    /// `vec(ρ) ↦ vec(ρB)`.
    pub fn right_mult(b: &Operator, basis: &Arc<VecBasis>) -> Result<Self> {
        let id = Operator::identity(b.layout());
        Self::from_sandwiches(basis, &[(C64::new(1.0, 0.0), &id, b)])
    }

    /// `vec(ρ) ↦ vec(AρB)`.
    pub fn sandwich(a: &Operator, b: &Operator, basis: &Arc<VecBasis>) -> Result<Self> {
        Self::from_sandwiches(basis, &[(C64::new(1.0, 0.0), a, b)])
    }

    /// `−i[H, ·]`.
    pub fn hamiltonian(h: &Operator, basis: &Arc<VecBasis>) -> Result<Self> {
        let id = Operator::identity(h.layout());
        Self::from_sandwiches(basis, &[(C64::new(0.0, -1.0), h, &id), (C64::new(0.0, 1.0), &id, h)])
    }

    pub fn layout(&self) -> &Arc<ModeLayout> {
        &self.layout
    }

    pub fn basis(&self) -> &Arc<VecBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseColMat<usize, C64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.matrix.compute_nnz()
    }

    fn for_each(&self, mut f: impl FnMut(usize, usize, C64)) {
        let sym = self.matrix.symbolic();
        let rows = sym.row_idx();
        let vals = self.matrix.val();
        for j in 0..self.len() {
            for p in sym.col_range(j) {
                f(rows[p], j, vals[p]);
            }
        }
    }

    pub fn triplets(&self) -> Vec<Triplet<usize, usize, C64>> {
        let mut t = Vec::with_capacity(self.nnz());
        self.for_each(|i, j, v| t.push(Triplet::new(i, j, v)));
        t
    }

    fn check_same(&self, other: &Superoperator) -> Result<()> {
        if *self.layout != *other.layout || *self.basis != *other.basis {
            Err(Error::LayoutMismatch("superoperators act on different spaces".into()))
        } else {
            Ok(())
        }
    }

    /// `Σ c_k L_k`.
    pub fn linear_combination(terms: &[(C64, &Superoperator)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?.1;
        let mut trips = Vec::new();
        for (c, s) in terms {
            first.check_same(s)?;
            s.for_each(|i, j, v| trips.push(Triplet::new(i, j, *c * v)));
        }
        Ok(Self::from_triplets(&first.layout, &first.basis, &trips))
    }

    pub fn try_add(&self, other: &Superoperator) -> Result<Self> {
        let one = C64::new(1.0, 0.0);
        Self::linear_combination(&[(one, self), (one, other)])
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::linear_combination(&[(C64::new(c, 0.0), self)]).expect("same space")
    }

    /// Sparse matrix-vector product.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.len()];
        self.apply_vec_into(v, &mut out);
        out
    }

    pub fn apply_vec_into(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let sym = self.matrix.symbolic();
        let rows = sym.row_idx();
        let vals = self.matrix.val();
        for (j, &x) in v.iter().enumerate() {
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for p in sym.col_range(j) {
                out[rows[p]] += vals[p] * x;
            }
        }
    }

    /// `L(ρ)` as an operator.
    pub fn apply(&self, op: &Operator) -> Result<Operator> {
        let v = self.basis.vectorize(op)?;
        self.basis.unvectorize(&self.layout, &self.apply_vec(&v))
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::zeros(self.len(), self.len());
        self.for_each(|i, j, v| m[(i, j)] += v);
        m
    }

    /// `max_c |Σ_i L_{(i,i), c}|`: deviation from trace preservation.
    pub fn trace_preservation_residual(&self) -> f64 {
        let is_diag: Vec<bool> = (0..self.len())
            .map(|k| {
                let (i, j) = self.basis.entry(k);
                i == j
            })
            .collect();
        let mut colsum = vec![C64::new(0.0, 0.0); self.len()];
        self.for_each(|i, j, v| {
            if is_diag[i] {
                colsum[j] += v;
            }
        });
        colsum.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation.
    pub fn max_abs_diff(&self, other: &Superoperator) -> Result<f64> {
        let diff = Self::linear_combination(&[(C64::new(1.0, 0.0), self), (C64::new(-1.0, 0.0), other)])?;
        let mut m = 0.0f64;
        diff.for_each(|_, _, v| m = m.max(v.norm()));
        Ok(m)
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        self.for_each(|_, _, v| m = m.max(v.norm()));
        m
    }
}

fn is_identity(op: &Operator) -> bool {
    let d = op.dim();
    for j in 0..d {
        for i in 0..d {
            let expect = if i == j { 1.0 } else { 0.0 };
            let z = op.get(i, j);
            if z.re != expect || z.im != 0.0 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};

    use super::*;
    use crate::operators::operator::{ladder, total_number};

    fn random_op(layout: &Arc<ModeLayout>, rng: &mut impl Rng) -> Operator {
        let d = layout.total_dim();
        let m = Mat::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        Operator::from_matrix(layout.clone(), m).unwrap()
    }

    #[test]
    fn left_mult_identity_is_identity() {
        let l = Arc::new(ModeLayout::fermions(2).unwrap());
        let basis = Arc::new(VecBasis::full(4));
        let s = Superoperator::left_mult(&Operator::identity(&l), &basis).unwrap();
        let id = Superoperator::identity(&l, &basis).unwrap();
        assert_eq!(s.max_abs_diff(&id).unwrap(), 0.0);
    }

    #[test]
    fn sandwich_matches_matrix_product() {
        let l = Arc::new(ModeLayout::new(vec![crate::Mode::Boson { cutoff: 2 }, crate::Mode::Fermion]).unwrap());
        let basis = Arc::new(VecBasis::full(l.total_dim()));
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let a = random_op(&l, &mut rng);
        let rho = crate::DensityMatrix::basis_state(&l, 0).unwrap();
        let s = Superoperator::sandwich(&a, &a.adjoint(), &basis).unwrap();
        let got = s.apply(rho.op()).unwrap();
        let want = &(&a * rho.op()) * &a.adjoint();
        assert!(got.max_abs_diff(&want).unwrap() < 1e-14);
    }

    #[test]
    fn sandwich_is_left_times_right() {
        let l = Arc::new(ModeLayout::fermions(2).unwrap());
        let basis = Arc::new(VecBasis::full(4));
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let a = random_op(&l, &mut rng);
        let b = random_op(&l, &mut rng);
        let s = Superoperator::sandwich(&a, &b, &basis).unwrap().to_dense();
        let lr = Superoperator::left_mult(&a, &basis).unwrap().to_dense()
            * Superoperator::right_mult(&b, &basis).unwrap().to_dense();
        assert!((&s - &lr).norm_l2() < 1e-13);
    }

    #[test]
    fn trace_functional_matches_trace() {
        let l = Arc::new(ModeLayout::fermions(2).unwrap());
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        let a = random_op(&l, &mut rng);
        let basis = VecBasis::full(4);
        let v = basis.vectorize(&a).unwrap();
        let tr: C64 = basis.trace_positions().iter().map(|&k| v[k]).sum();
        assert!((tr - a.trace()).norm() < 1e-15);
        assert_eq!(v, vectorize(&a));
    }

    #[test]
    fn sector_basis_rejects_charge_mixing() {
        let l = Arc::new(ModeLayout::fermions(2).unwrap());
        let basis = Arc::new(VecBasis::charge_sector(&total_number(&l)).unwrap());
        assert_eq!(basis.len(), 1 + 4 + 1);
        let d = ladder(&l, 0).unwrap();
        assert!(Superoperator::sandwich(&d, &d.adjoint(), &basis).is_ok());
        let x = &d + &d.adjoint();
        assert!(matches!(Superoperator::sandwich(&x, &x, &basis), Err(Error::SectorNotInvariant { .. })));
    }
}
