use std::collections::HashMap;

use crate::error::{Error, Result};

/// A single degree of freedom of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Bosonic mode truncated at `cutoff` quanta (dimension `cutoff + 1`).
    Boson { cutoff: usize },
    /// Fermionic site (dimension 2).
    Fermion,
}

impl Mode {
    pub fn max_occupation(&self) -> usize {
        match *self {
            Mode::Boson { cutoff } => cutoff,
            Mode::Fermion => 1,
        }
    }

    pub fn is_fermion(&self) -> bool {
        matches!(self, Mode::Fermion)
    }
}

/// Ordered list of modes plus the truncation of the joint Fock space.
///
/// Basis states are occupation tuples enumerated lexicographically with mode 0
/// most significant, which is the usual Kronecker ordering. With no total cap
/// the dimension is the product of the per-mode dimensions. An optional cap on
/// the total occupation keeps only states with `sum(n) <= max_total`; for
/// number-conserving Hamiltonians this leaves every particle-number block exact.
#[derive(Debug, Clone)]
pub struct ModeLayout {
    modes: Vec<Mode>,
    max_total: Option<usize>,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl PartialEq for ModeLayout {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.max_total == other.max_total
    }
}

impl ModeLayout {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        Self::build(modes, None)
    }

    /// Layout keeping only states with at most `max_total` quanta in total.
    pub fn with_total_cap(modes: Vec<Mode>, max_total: usize) -> Result<Self> {
        Self::build(modes, Some(max_total))
    }

    /// `count` bosonic modes sharing a total-excitation cap.
    pub fn bosons(count: usize, max_total: usize) -> Result<Self> {
        Self::with_total_cap(vec![Mode::Boson { cutoff: max_total }; count], max_total)
    }

    pub fn fermions(count: usize) -> Result<Self> {
        Self::new(vec![Mode::Fermion; count])
    }

    fn build(modes: Vec<Mode>, max_total: Option<usize>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidParameter("layout needs at least one mode".into()));
        }
        for m in &modes {
            if let Mode::Boson { cutoff } = m {
                if *cutoff < 1 {
                    return Err(Error::InvalidParameter("bosonic cutoff must be >= 1".into()));
                }
            }
        }
        let mut states = Vec::new();
        let mut current = vec![0u32; modes.len()];
        enumerate(&modes, max_total, 0, 0, &mut current, &mut states);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { modes, max_total, states, index })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn max_total(&self) -> Option<usize> {
        self.max_total
    }

    pub fn total_dim(&self) -> usize {
        self.states.len()
    }

    /// Occupation numbers of basis state `i`.
    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn index_of(&self, occupations: &[u32]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes.len() {
            Err(Error::IndexOutOfRange { index: mode, modes: self.modes.len() })
        } else {
            Ok(())
        }
    }

    pub fn has_fermions(&self) -> bool {
        self.modes.iter().any(Mode::is_fermion)
    }

    pub fn has_bosons(&self) -> bool {
        self.modes.iter().any(|m| !m.is_fermion())
    }
}

fn enumerate(
    modes: &[Mode],
    cap: Option<usize>,
    pos: usize,
    used: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if pos == modes.len() {
        out.push(current.clone());
        return;
    }
    let mut top = modes[pos].max_occupation();
    if let Some(c) = cap {
        top = top.min(c - used);
    }
    for n in 0..=top {
        current[pos] = n as u32;
        enumerate(modes, cap, pos + 1, used + n, current, out);
    }
    current[pos] = 0;
}
