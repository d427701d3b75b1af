//! Numerics for generalized hypergeometric series, their Meijer G kernel
//! representations, and the order conditions that certify two-sided bounds
//! and complete monotonicity.
//!
//! The crate is organized around one pipeline: parameter predicates
//! ([`params`]) decide which integral representation applies, kernels
//! ([`gkernel`]) and quadrature ([`quad`]) evaluate those representations,
//! and the certificate modules ([`bounds`], [`monotone`]) turn the
//! structural conditions into checked numeric statements.

mod dd;
pub mod error;
pub mod gamma;
pub mod gkernel;
mod jet;
pub mod params;
pub mod quad;
pub mod bounds;
pub mod monotone;
pub mod representations;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use params::ParamVec;
pub use report::Status;
pub use series::{EvalResult, HyperSpec};
