//! Thermodynamically consistent Markovian master equations.
//!
//! Bohr frequencies of the system–bath coupling are grouped into sets that
//! share a bath rate; the resulting GKLS generator comes with a thermodynamic
//! Hamiltonian for energy bookkeeping. The crate covers construction
//! ([`spectral`], [`dissipators`]), solution ([`solvers`]), bookkeeping
//! ([`thermo`]), Landauer oracles ([`transmission`]) and four benchmark
//! systems ([`models`]).

pub mod baths;
pub mod dissipators;
pub mod error;
pub mod models;
pub mod operators;
pub mod solvers;
pub mod spectral;
pub mod thermo;
pub mod transmission;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use operators::{
    eigh, ladder, number_operator, total_number, DensityMatrix, Eigen, Mode, ModeLayout, Operator, Superoperator,
    VecBasis,
};
