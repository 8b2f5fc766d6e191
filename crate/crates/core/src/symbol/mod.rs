//! Fourier-side scalar functions of (t, r = |ξ|).

mod decomposition;
mod majorants;
mod multipliers;
mod roots;

pub use decomposition::{
    decomposition_residual, hf_energy, k_terms_explicit, low_freq_error_integrand, FrequencySample,
    KTerms,
};
pub use majorants::{k_majorants, KTermMajorants, MajorantInputs, DEFAULT_DELTA0};
pub use multipliers::{
    exponential_multipliers, mode_multipliers, mode_multipliers_with, profile_multipliers, sinc,
    ExponentialMultipliers, ModeMultipliers, ProfileMultipliers, SINC_THRESHOLD,
};
pub use roots::{dispersion_roots, DispersionRoots, Frequency, Regime, CONFLUENCE_ETA};
