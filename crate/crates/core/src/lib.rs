//! Averaged CM-values of higher Green's functions on the modular curve and the
//! factorization of the algebraic numbers they determine.

pub mod arith;
pub mod cli;
pub mod error;
pub mod factor;
pub mod finquad;
pub mod greens;
pub mod mforms;
pub mod qfield;
pub mod real;
pub mod thetacoef;

pub use error::{Error, Result};
