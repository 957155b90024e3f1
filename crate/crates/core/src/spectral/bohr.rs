use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::{eigh, Eigen, Operator};

/// Default relative tolerance for merging degenerate levels and frequencies.
pub const TOL_BOHR: f64 = 1e-9;
/// Components whose norm is below this fraction of the coupling are dropped.
pub const TOL_DROP: f64 = 1e-12;
/// Matrix elements below this fraction of the largest one are treated as zero.
const ENTRY_CHOP: f64 = 1e-13;
const COMPONENT_CHOP: f64 = 1e-12;

/// One system operator `S_{α,k}` of the system–bath coupling.
#[derive(Debug, Clone)]
pub struct CouplingSpec {
    pub bath_id: String,
    pub channel: i32,
    pub operator: Operator,
    /// Particles removed by `S`: `[S, N] = charge · S`.
    pub charge: i32,
    /// Bath frequency shift of a rotating frame; the lab frequency of a
    /// component is `ω + charge · frame_offset`.
    pub frame_offset: f64,
}

impl CouplingSpec {
    pub fn new(bath_id: impl Into<String>, channel: i32, operator: Operator, charge: i32) -> Self {
        Self { bath_id: bath_id.into(), channel, operator, charge, frame_offset: 0.0 }
    }

    pub fn with_frame_offset(mut self, offset: f64) -> Self {
        self.frame_offset = offset;
        self
    }

    /// `‖[S, N] − nS‖_max`.
    pub fn charge_residual(&self, number: &Operator) -> Result<f64> {
        let comm = self.operator.commutator(number)?;
        comm.max_abs_diff(&self.operator.scale_real(self.charge as f64))
    }

    pub fn check_charge(&self, number: &Operator, tol: f64) -> Result<()> {
        let r = self.charge_residual(number)?;
        if r > tol * self.operator.max_abs().max(1.0) {
            Err(Error::ChargeMismatch { residual: r })
        } else {
            Ok(())
        }
    }
}

/// Fourier component of a coupling operator at one Bohr frequency.
#[derive(Debug, Clone)]
pub struct BohrComponent {
    /// Lab-frame frequency used for rates and bookkeeping.
    pub frequency: f64,
    /// Bohr frequency of the system Hamiltonian itself.
    pub system_frequency: f64,
    pub operator: Operator,
    pub bath_id: String,
    pub channel: i32,
    pub charge: i32,
    /// Particle number of the states the component acts on, when resolved.
    pub sector: Option<i64>,
}

/// Eigendecomposition of `H_S` with degenerate levels merged.
#[derive(Debug, Clone)]
pub struct Spectrum {
    hamiltonian: Operator,
    eigen: Eigen,
    levels: Vec<f64>,
    scale: f64,
    tol_bohr: f64,
    sectors: Option<Vec<i64>>,
}

impl Spectrum {
    pub fn new(h: &Operator, tol_bohr: f64) -> Result<Self> {
        let eigen = eigh(h)?;
        let vals = &eigen.values;
        let mut scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let (Some(a), Some(b)) = (vals.first(), vals.last()) {
            scale = scale.max(b - a);
        }
        if scale == 0.0 {
            scale = 1.0;
        }
        let tol = tol_bohr * scale;
        let mut levels = vals.clone();
        let mut start = 0;
        while start < levels.len() {
            let mut end = start + 1;
            while end < levels.len() && vals[end] - vals[end - 1] <= tol {
                end += 1;
            }
            let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
            levels[start..end].iter_mut().for_each(|v| *v = mean);
            start = end;
        }
        Ok(Self { hamiltonian: h.clone(), eigen, levels, scale, tol_bohr, sectors: None })
    }

    /// Labels each eigenvector by its eigenvalue of the diagonal `number`.
    pub fn with_sectors(mut self, number: &Operator) -> Result<Self> {
        let v = &self.eigen.vectors;
        let d = v.nrows();
        let mut sectors = Vec::with_capacity(d);
        for j in 0..d {
            let mut mean = 0.0;
            for i in 0..d {
                mean += v[(i, j)].norm_sqr() * number.get(i, i).re;
            }
            let n = mean.round();
            let mut dev = 0.0f64;
            for i in 0..d {
                if v[(i, j)].norm() > 1e-12 {
                    dev = dev.max((number.get(i, i).re - n).abs());
                }
            }
            if dev > 1e-9 {
                return Err(Error::InvalidParameter("eigenvectors of H do not have a definite particle number".into()));
            }
            sectors.push(n as i64);
        }
        self.sectors = Some(sectors);
        Ok(self)
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    /// Eigenvalues with exact degeneracies snapped together.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tol_bohr(&self) -> f64 {
        self.tol_bohr
    }

    pub fn sectors(&self) -> Option<&[i64]> {
        self.sectors.as_deref()
    }

    /// Splits a coupling operator into its Bohr components.
    ///
    /// With `sector_resolved` each frequency is further split by the particle
    /// number of the source eigenstate (requires [`Spectrum::with_sectors`]).
    pub fn decompose(&self, coupling: &CouplingSpec, sector_resolved: bool) -> Result<Vec<BohrComponent>> {
        if sector_resolved && self.sectors.is_none() {
            return Err(Error::InvalidParameter("sector-resolved decomposition needs sector labels".into()));
        }
        let s = &coupling.operator;
        if **s.layout() != **self.hamiltonian.layout() {
            return Err(Error::LayoutMismatch("coupling and Hamiltonian live on different layouts".into()));
        }
        let sp = self.eigen.to_eigenbasis(s.matrix());
        let d = sp.nrows();
        let mut max = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                max = max.max(sp[(i, j)].norm());
            }
        }
        if max == 0.0 {
            return Ok(Vec::new());
        }
        let cut = ENTRY_CHOP * max;

        // (i, j, ω) for all significant entries of S in the eigenbasis
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for j in 0..d {
            for i in 0..d {
                if sp[(i, j)].norm() > cut {
                    entries.push((i, j, self.levels[j] - self.levels[i]));
                }
            }
        }
        let mut freqs: Vec<f64> = entries.iter().map(|e| e.2).collect();
        freqs.sort_by(f64::total_cmp);
        let tol = self.tol_bohr * self.scale;
        let mut clusters: Vec<(f64, f64, f64)> = Vec::new(); // (lo, hi, mean)
        let mut start = 0;
        while start < freqs.len() {
            let mut end = start + 1;
            while end < freqs.len() && freqs[end] - freqs[end - 1] <= tol {
                end += 1;
            }
            let mean = freqs[start..end].iter().sum::<f64>() / (end - start) as f64;
            clusters.push((freqs[start], freqs[end - 1], mean));
            start = end;
        }

        let mut masks: BTreeMap<(usize, i64), Mat<C64>> = BTreeMap::new();
        for &(i, j, w) in &entries {
            let c = clusters.partition_point(|cl| cl.1 < w).min(clusters.len() - 1);
            let sector = if sector_resolved { self.sectors.as_ref().unwrap()[j] } else { 0 };
            let m = masks.entry((c, sector)).or_insert_with(|| Mat::zeros(d, d));
            m[(i, j)] = sp[(i, j)];
        }

        let total_norm = s.norm_fro();
        let mut out = Vec::new();
        for ((c, sector), m) in masks {
            let op = Operator::from_matrix(s.layout().clone(), self.eigen.from_eigenbasis(&m))?;
            if op.norm_fro() <= TOL_DROP * total_norm {
                continue;
            }
            let w = clusters[c].2;
            out.push(BohrComponent {
                frequency: w + coupling.charge as f64 * coupling.frame_offset,
                system_frequency: w,
                operator: chop(op),
                bath_id: coupling.bath_id.clone(),
                channel: coupling.channel,
                charge: coupling.charge,
                sector: sector_resolved.then_some(sector),
            });
        }
        Ok(out)
    }
}

/// Zeroes entries at roundoff level relative to the largest entry. The
/// rotation back from the eigenbasis leaves noise around 1e-14 in entries
/// that are zero by symmetry; keeping it fills the Liouvillian.
fn chop(mut op: Operator) -> Operator {
    let cut = COMPONENT_CHOP * op.max_abs();
    let d = op.dim();
    for j in 0..d {
        for i in 0..d {
            let z = op.get(i, j);
            let re = if z.re.abs() <= cut { 0.0 } else { z.re };
            let im = if z.im.abs() <= cut { 0.0 } else { z.im };
            op.set(i, j, C64::new(re, im));
        }
    }
    op
}

/// Bohr components of one coupling operator.
pub fn bohr_decompose(h: &Operator, coupling: &CouplingSpec, tol_bohr: f64) -> Result<Vec<BohrComponent>> {
    Spectrum::new(h, tol_bohr)?.decompose(coupling, false)
}
