//! Numerical verification, term by term, of the Weil explicit formula for ζ
//! and Dirichlet L-functions, of its equality with the continuous-spectral
//! term of the Selberg trace formula, of the truncated spectral expression
//! with its T-dependent lower bound, and of the scalar Maaß–Selberg relation.

pub mod characters;
pub mod error;
pub mod explicit;
pub mod quad;
pub mod special;
pub mod spectral;
pub mod testfn;
pub mod zeros;

pub use error::{Error, Result};
