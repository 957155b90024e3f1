//! Bohr decomposition, frequency grouping and the thermodynamic Hamiltonian.

mod bohr;
mod grouping;
mod thermo_hamiltonian;

pub use bohr::{bohr_decompose, BohrComponent, CouplingSpec, Spectrum, TOL_BOHR, TOL_DROP};
pub use grouping::{
    build_grouped_jumps, group_frequencies, FrequencyGrouping, FrequencySet, GroupedJump, SetAssignment,
    SetFrequencyPolicy, Transition,
};
pub use thermo_hamiltonian::{build_thermo_hamiltonian, build_thermo_hamiltonian_with, thermo_levels, thermo_residual};
