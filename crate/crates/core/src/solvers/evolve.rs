use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::{DensityMatrix, Superoperator};

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Per-step error tolerance (mixed absolute/relative).
    pub tol_step: f64,
    pub h_initial: f64,
    pub h_min: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tol_step: 1e-10, h_initial: 1e-3, h_min: 1e-14 }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Largest `|Tr ρ − 1|` at the output times.
    pub trace_drift: f64,
    /// Smallest eigenvalue seen at the output times.
    pub min_eigenvalue: f64,
    pub steps: usize,
}

// Dormand–Prince 5(4) tableau
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `vec(ρ̇) = L vec(ρ)` and records the state at each output time
/// (ascending, starting at or after 0).
pub fn evolve(l: &Superoperator, rho0: &DensityMatrix, times: &[f64], opts: &EvolveOptions) -> Result<Trajectory> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter("output times must be ascending and nonnegative".into()));
    }
    let basis = l.basis();
    let layout = l.layout();
    let n = l.len();
    let mut y = basis.vectorize(rho0.op())?;
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut y5 = vec![C64::new(0.0, 0.0); n];

    let mut t = 0.0;
    let mut h = opts.h_initial;
    let mut steps = 0;
    let mut out =
        Trajectory { times: Vec::new(), states: Vec::new(), trace_drift: 0.0, min_eigenvalue: f64::INFINITY, steps: 0 };
    let record = |t: f64, y: &[C64], out: &mut Trajectory| -> Result<()> {
        let op = basis.unvectorize(layout, y)?;
        out.trace_drift = out.trace_drift.max((op.trace().re - 1.0).abs());
        let rho = DensityMatrix::new_unchecked(op);
        out.min_eigenvalue = out.min_eigenvalue.min(rho.min_eigenvalue()?);
        out.times.push(t);
        out.states.push(rho);
        Ok(())
    };

    l.apply_vec_into(&y, &mut k[0]);
    for &target in times {
        while t < target {
            let h_step = h.min(target - t);
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        if A[s][j] != 0.0 {
                            acc += h_step * A[s][j] * kj[i];
                        }
                    }
                    tmp[i] = acc;
                }
                let (_, rest) = k.split_at_mut(s);
                l.apply_vec_into(&tmp, &mut rest[0]);
            }
            let mut err = 0.0f64;
            for i in 0..n {
                let mut d5 = C64::new(0.0, 0.0);
                let mut d4 = C64::new(0.0, 0.0);
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] = y[i] + h_step * d5;
                let sc = opts.tol_step * (1.0 + y[i].norm().max(y5[i].norm()));
                err = err.max((h_step * (d5 - d4)).norm() / sc);
            }
            if err <= 1.0 {
                t += h_step;
                std::mem::swap(&mut y, &mut y5);
                // first-same-as-last: stage 7 is evaluated at the new point
                let last = k.pop().unwrap();
                k.insert(0, last);
                steps += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // an accepted step shortened to hit an output time keeps `h`
            if !(err <= 1.0 && h_step < h) {
                h = h_step * factor;
            }
            if h < opts.h_min {
                return Err(Error::StepSizeUnderflow { t, h });
            }
        }
        record(target, &y, &mut out)?;
    }
    out.steps = steps;
    Ok(out)
}
