//! Verification laboratory for the cosine-sine functional-equation system
//!
//! ```text
//! f(xy) = f(x)g1(y) + g1(x)f(y) + l1^2 h(x)h(y)
//! h(xy) = h(x)g2(y) + g2(x)h(y) + l2^2 f(x)f(y)
//! ```
//!
//! on semigroups: carriers, function spaces, residual laws, the catalog of
//! closed-form solution families, a template classifier and brute-force
//! oracles for the supporting lemmas.

pub mod carrier;
pub mod classify;
pub mod error;
pub mod funcspace;
pub mod scalar;

pub use error::{Error, Result};

/// Version tag written into every JSON report.
pub const SCHEMA_VERSION: &str = "cslab/1";
pub mod families;
pub mod laws;
pub mod linalg;
pub mod oracles;
pub mod poly;
