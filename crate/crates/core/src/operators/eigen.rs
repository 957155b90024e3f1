use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use super::operator::Operator;
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance accepted by [`eigh`].
pub const TOL_HERM: f64 = 1e-10;

/// Eigendecomposition `H = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Mat<C64>,
}

impl Eigen {
    /// `V diag(values) V†` for replacement eigenvalues.
    pub fn reconstruct(&self, values: &[f64]) -> Mat<C64> {
        let d = self.vectors.nrows();
        let scaled = Mat::from_fn(d, d, |i, j| self.vectors[(i, j)] * values[j]);
        &scaled * self.vectors.adjoint()
    }

    /// `V† A V`.
    pub fn to_eigenbasis(&self, a: &Mat<C64>) -> Mat<C64> {
        match self.sparse_columns() {
            Some(cols) => {
                let d = a.nrows();
                // C = A V, then V† C
                let mut c = Mat::<C64>::zeros(d, d);
                for (k, col) in cols.iter().enumerate() {
                    for &(r, v) in col {
                        for i in 0..d {
                            c[(i, k)] += a[(i, r)] * v;
                        }
                    }
                }
                let mut out = Mat::<C64>::zeros(d, d);
                for j in 0..d {
                    for (k, col) in cols.iter().enumerate() {
                        out[(k, j)] = col.iter().map(|&(r, v)| v.conj() * c[(r, j)]).sum();
                    }
                }
                out
            }
            None => self.vectors.adjoint() * a * &self.vectors,
        }
    }

    /// `V A V†`.
    pub fn from_eigenbasis(&self, a: &Mat<C64>) -> Mat<C64> {
        match self.sparse_columns() {
            Some(cols) => {
                let d = a.nrows();
                // C = V A, then C V†
                let mut c = Mat::<C64>::zeros(d, d);
                for j in 0..d {
                    for (k, col) in cols.iter().enumerate() {
                        let akj = a[(k, j)];
                        if akj.re == 0.0 && akj.im == 0.0 {
                            continue;
                        }
                        for &(r, v) in col {
                            c[(r, j)] += v * akj;
                        }
                    }
                }
                let mut out = Mat::<C64>::zeros(d, d);
                for (k, col) in cols.iter().enumerate() {
                    for &(r, v) in col {
                        let w = v.conj();
                        for i in 0..d {
                            out[(i, r)] += c[(i, k)] * w;
                        }
                    }
                }
                out
            }
            None => &self.vectors * a * self.vectors.adjoint(),
        }
    }

    /// Nonzeros of `V` by column, when `V` is sparse enough to benefit.
    fn sparse_columns(&self) -> Option<Vec<Vec<(usize, C64)>>> {
        let d = self.vectors.nrows();
        if d < 64 {
            return None;
        }
        let cols: Vec<Vec<(usize, C64)>> = (0..d)
            .map(|j| {
                (0..d)
                    .filter_map(|i| Some((i, self.vectors[(i, j)])).filter(|(_, z)| z.re != 0.0 || z.im != 0.0))
                    .collect()
            })
            .collect();
        let nnz: usize = cols.iter().map(Vec::len).sum();
        (nnz * 8 < d * d).then_some(cols)
    }
}

/// Hermitian eigendecomposition.
///
/// The matrix is first split into the connected components of its sparsity
/// pattern and each block is diagonalized separately. For number-conserving
/// Hamiltonians this yields eigenvectors with a definite particle number.
pub fn eigh(op: &Operator) -> Result<Eigen> {
    let m = op.matrix();
    let d = m.nrows();
    let scale = op.max_abs().max(1.0);
    let dev = op.hermiticity_deviation();
    if dev > TOL_HERM * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }

    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..d {
        for i in 0..j {
            let z = m[(i, j)];
            if z.re != 0.0 || z.im != 0.0 || m[(j, i)].norm() != 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        if block_of[r] == usize::MAX {
            block_of[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[block_of[r]].push(i);
    }

    let mut pairs: Vec<(f64, usize, Vec<(usize, C64)>)> = Vec::with_capacity(d);
    for block in &blocks {
        let n = block.len();
        if n == 1 {
            let i = block[0];
            pairs.push((m[(i, i)].re, pairs.len(), vec![(i, C64::new(1.0, 0.0))]));
            continue;
        }
        let sub = Mat::from_fn(n, n, |a, b| {
            let (i, j) = (block[a], block[b]);
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        });
        let e = sub
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
        let s = e.S().column_vector();
        let u = e.U();
        for k in 0..n {
            let v: Vec<(usize, C64)> = (0..n).map(|a| (block[a], u[(a, k)])).collect();
            pairs.push((s[k].re, pairs.len(), v));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut vectors = Mat::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (col, (val, _, v)) in pairs.into_iter().enumerate() {
        values.push(val);
        for (row, z) in v {
            vectors[(row, col)] = z;
        }
    }
    Ok(Eigen { values, vectors })
}
