//! Entropy, Markov-property and separability checks for finite systems of
//! fermionic modes represented on Fock space.

pub mod car;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod separability;
pub mod states;
pub mod tol;

pub use car::{build_fock, FockRep, Region, Subalgebra};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use states::{StateDensity, StateKind, Triple};
