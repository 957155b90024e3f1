//! Operator algebra on truncated Fock spaces and its lift to superoperators.

mod density;
mod eigen;
mod layout;
mod operator;
mod superop;

pub use density::{DensityMatrix, StateTolerances};
pub use eigen::{eigh, Eigen, TOL_HERM};
pub use layout::{Mode, ModeLayout};
pub use operator::{ladder, number_operator, total_number, Operator};
pub use superop::{vectorize, Superoperator, VecBasis};
