//! Fourier-space solver and decay-rate verification for the strongly damped
//! wave equation u_tt − Δu − Δu_t = 0 on R^n.

pub mod analysis;
pub mod data;
pub mod error;
pub mod kirchhoff;
pub mod oracle;
pub mod quadrature;
pub mod symbol;

pub use error::{Error, Result};
