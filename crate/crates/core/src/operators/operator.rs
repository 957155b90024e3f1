use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;

use super::eigen::eigh;
use super::layout::{Mode, ModeLayout};
use crate::error::{Error, Result};

/// Dense operator on the Hilbert space of a [`ModeLayout`].
///
/// The arithmetic operator impls panic on mismatched layouts; the `try_*`
/// methods return an error instead.
#[derive(Debug, Clone)]
pub struct Operator {
    layout: Arc<ModeLayout>,
    matrix: Mat<C64>,
}

impl Operator {
    pub fn from_matrix(layout: Arc<ModeLayout>, matrix: Mat<C64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::LayoutMismatch(format!(
                "matrix is {}x{}, layout dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { layout, matrix })
    }

    pub fn zeros(layout: &Arc<ModeLayout>) -> Self {
        let d = layout.total_dim();
        Self { layout: layout.clone(), matrix: Mat::zeros(d, d) }
    }

    pub fn identity(layout: &Arc<ModeLayout>) -> Self {
        let d = layout.total_dim();
        Self { layout: layout.clone(), matrix: Mat::identity(d, d) }
    }

    /// Diagonal operator with entries `f(occupations)`.
    pub fn diagonal_from(layout: &Arc<ModeLayout>, f: impl Fn(&[u32]) -> f64) -> Self {
        let mut op = Self::zeros(layout);
        for i in 0..layout.total_dim() {
            op.matrix[(i, i)] = C64::new(f(layout.state(i)), 0.0);
        }
        op
    }

    pub fn layout(&self) -> &Arc<ModeLayout> {
        &self.layout
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.matrix[(i, j)] = value;
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if Arc::ptr_eq(&self.layout, &other.layout) || *self.layout == *other.layout {
            Ok(())
        } else {
            Err(Error::LayoutMismatch("operands live on different layouts".into()))
        }
    }

    pub fn try_add(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Self { layout: self.layout.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn try_sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Self { layout: self.layout.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub fn try_mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        let d = self.dim();
        let matrix = match (d >= 64).then(|| self.sparse_columns()).flatten() {
            Some(cols) => {
                let mut out = Mat::<C64>::zeros(d, d);
                for j in 0..d {
                    for (k, col) in cols.iter().enumerate() {
                        let b = other.matrix[(k, j)];
                        if b.re == 0.0 && b.im == 0.0 {
                            continue;
                        }
                        for &(i, a) in col {
                            out[(i, j)] += a * b;
                        }
                    }
                }
                out
            }
            None => &self.matrix * &other.matrix,
        };
        Ok(Self { layout: self.layout.clone(), matrix })
    }

    /// Nonzeros by column if at most one entry in eight is nonzero.
    fn sparse_columns(&self) -> Option<Vec<Vec<(usize, C64)>>> {
        let d = self.dim();
        let mut cols = vec![Vec::new(); d];
        let mut nnz = 0;
        for (j, col) in cols.iter_mut().enumerate() {
            for i in 0..d {
                let z = self.matrix[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    col.push((i, z));
                    nnz += 1;
                    if nnz * 8 >= d * d {
                        return None;
                    }
                }
            }
        }
        Some(cols)
    }

    /// `Σ c_k A_k` over operators sharing one layout.
    pub fn linear_combination(terms: &[(C64, &Operator)]) -> Result<Operator> {
        let first = terms.first().ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let mut out = Operator::zeros(&first.1.layout);
        for (c, op) in terms {
            out.check_same(op)?;
            let d = out.dim();
            for j in 0..d {
                for i in 0..d {
                    out.matrix[(i, j)] += *c * op.matrix[(i, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Operator {
        let d = self.dim();
        Self { layout: self.layout.clone(), matrix: Mat::from_fn(d, d, |i, j| c * self.matrix[(i, j)]) }
    }

    pub fn scale_real(&self, c: f64) -> Operator {
        self.scale(C64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> Operator {
        Self { layout: self.layout.clone(), matrix: self.matrix.adjoint().to_owned() }
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        self.try_mul(other)?.try_add(&other.try_mul(self)?)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// `Tr{A B}` without forming the product.
    pub fn trace_product(&self, other: &Operator) -> Result<C64> {
        self.check_same(other)?;
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..d {
            for k in 0..d {
                acc += self.matrix[(j, k)] * other.matrix[(k, j)];
            }
        }
        Ok(acc)
    }

    pub fn norm_fro(&self) -> f64 {
        self.matrix.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                m = m.max(self.matrix[(i, j)].norm());
            }
        }
        m
    }

    /// Largest entrywise deviation between two operators.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                m = m.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match eigh(self) {
            Ok(e) => e.values.first().is_none_or(|&v| v >= -tol),
            Err(_) => false,
        }
    }

    /// Projects `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Operator {
        let d = self.dim();
        let m = Mat::from_fn(d, d, |i, j| (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * 0.5);
        Self { layout: self.layout.clone(), matrix: m }
    }

    /// `f(A)` for a Hermitian operator through its eigendecomposition.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> f64) -> Result<Operator> {
        let e = eigh(self)?;
        let values: Vec<f64> = e.values.iter().map(|&v| f(v)).collect();
        Ok(Operator { layout: self.layout.clone(), matrix: e.reconstruct(&values) })
    }
}

fn expect<T>(r: Result<T>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => panic!("{e}"),
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        expect(self.try_add(rhs))
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        expect(self.try_sub(rhs))
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        expect(self.try_mul(rhs))
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale_real(self)
    }
}

impl Mul<&Operator> for C64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(self)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

/// Annihilation operator of mode `mode_index`.
///
/// Fermionic operators carry the Jordan–Wigner string `(-1)^(sum of occupations
/// of earlier fermionic modes)`, so operators on different sites anticommute.
pub fn ladder(layout: &Arc<ModeLayout>, mode_index: usize) -> Result<Operator> {
    layout.check_mode(mode_index)?;
    let mut op = Operator::zeros(layout);
    let mut target = vec![0u32; layout.num_modes()];
    for col in 0..layout.total_dim() {
        let s = layout.state(col);
        let n = s[mode_index];
        if n == 0 {
            continue;
        }
        target.copy_from_slice(s);
        target[mode_index] -= 1;
        let row = layout.index_of(&target).expect("lowering stays inside the truncated space");
        let amplitude = match layout.modes()[mode_index] {
            Mode::Boson { .. } => (n as f64).sqrt(),
            Mode::Fermion => {
                let parity: u32 =
                    layout.modes()[..mode_index].iter().zip(s).filter(|(m, _)| m.is_fermion()).map(|(_, &k)| k).sum();
                if parity % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        op.matrix[(row, col)] = C64::new(amplitude, 0.0);
    }
    Ok(op)
}

/// Occupation operator `a†a` of one mode.
pub fn number_operator(layout: &Arc<ModeLayout>, mode_index: usize) -> Result<Operator> {
    layout.check_mode(mode_index)?;
    Ok(Operator::diagonal_from(layout, |s| s[mode_index] as f64))
}

/// Total particle number over all modes.
pub fn total_number(layout: &Arc<ModeLayout>) -> Operator {
    Operator::diagonal_from(layout, |s| s.iter().map(|&n| n as f64).sum())
}
