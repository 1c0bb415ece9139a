//! Finite-dimensional sections of Schreier, Tsirelson and twisted Hilbert
//! sequence spaces, with a verification harness.

pub mod ackermann;
pub mod centralizer;
pub mod coverage;
pub mod error;
pub mod estimates;
pub mod harness;
pub mod spaces;
pub mod vector;

pub use error::{Error, Result};
pub use vector::RealVector;
