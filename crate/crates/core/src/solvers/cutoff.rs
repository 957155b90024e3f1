use crate::error::{Error, Result};

pub const CUTOFF_START: usize = 8;
pub const CUTOFF_MAX: usize = 64;
pub const CUTOFF_RTOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CutoffResult {
    pub cutoff: usize,
    pub values: Vec<f64>,
    /// Largest relative change between the last two cutoffs.
    pub change: f64,
}

/// Doubles the cutoff from `start` until every scalar returned by `eval`
/// changes by less than `rtol` relative to the largest scalar magnitude.
pub fn converge_cutoff(
    start: usize,
    max_cutoff: usize,
    rtol: f64,
    mut eval: impl FnMut(usize) -> Result<Vec<f64>>,
) -> Result<CutoffResult> {
    let mut cutoff = start.max(1);
    let mut prev = eval(cutoff)?;
    let mut change = f64::INFINITY;
    while cutoff < max_cutoff {
        let next_cutoff = (cutoff * 2).min(max_cutoff);
        let next = eval(next_cutoff)?;
        if next.len() != prev.len() {
            return Err(Error::Numerical("scalar count changed with cutoff".into()));
        }
        let scale = next.iter().chain(&prev).map(|x| x.abs()).fold(0.0, f64::max);
        change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| if scale > 0.0 { (a - b).abs() / scale } else { 0.0 })
            .fold(0.0, f64::max);
        log::debug!("cutoff {cutoff} → {next_cutoff}: relative change {change:.3e}");
        cutoff = next_cutoff;
        prev = next;
        if change < rtol {
            return Ok(CutoffResult { cutoff, values: prev, change });
        }
    }
    Err(Error::CutoffNotConverged { max_cutoff, change })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_geometric_tail() {
        let r = converge_cutoff(8, 64, 1e-6, |n| Ok(vec![1.0 - 0.5f64.powi(n as i32)])).unwrap();
        assert_eq!(r.cutoff, 64);
    }

    #[test]
    fn reports_failure() {
        let r = converge_cutoff(8, 64, 1e-6, |n| Ok(vec![n as f64]));
        assert!(matches!(r, Err(Error::CutoffNotConverged { max_cutoff: 64, .. })));
    }
}
