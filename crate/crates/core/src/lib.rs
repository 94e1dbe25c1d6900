//! Grand and small Lebesgue norms and bilinear Fourier multipliers on finite
//! abelian groups, with certified norm computations and an executable suite
//! of the identities and inequalities relating them.

// `!(x > 0.0)` style guards reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod group;
pub mod multipliers;
pub mod norms;
pub mod opnorm;
pub mod rng;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use group::{Automorphism, GroupElement, GroupSpec};
pub use multipliers::{MultiplierParams, Symbol};
pub use spectral::{AtomicMeasure, DualFunction, GFunction};
