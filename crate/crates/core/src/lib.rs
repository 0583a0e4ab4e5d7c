//! Direct and inverse scattering for the half-line matrix Schrödinger
//! equation `-ψ'' + V(x)ψ = k²ψ` with selfadjoint boundary conditions.

pub mod characterize;
pub mod cli;
pub mod direct;
pub mod error;
pub mod fixtures;
pub mod inverse;
pub mod io;
pub mod linalg;
pub mod ode;
pub mod oracles;
pub mod quadrature;
pub mod roundtrip;
pub mod types;

pub use error::{Result, ScatterError};
pub use types::*;
