//! Doubles of modules on `X x X`, fibers of the projectivized analytic
//! spectrum of their Rees algebras, and the truncated Puiseux limit engine
//! that computes them.

pub mod curvefibers;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod moddouble;
pub mod problem;
pub mod projan;
pub mod symcore;

pub use error::{Error, Result};
