//! Deterministic numerical integration.

mod adaptive;
mod gauss_legendre;
mod radial;

pub use adaptive::{gk15, integrate, AdaptiveOptions, Estimate};
pub use gauss_legendre::GaussLegendre;
pub use radial::{
    gamma_half, gaussian_moment, ln_gamma_half, radial_integral, sphere_area, RadialIntegralSpec,
    TailBound, Upper,
};
