//! Initial data: families, moments, spectra and oscillatory parts.

mod datum;
mod lemma22;

pub use datum::{
    noncentral_chi_mean, sample_on_grid, Family, GridSamples, InitialDatumSpec, Moments,
    OscillatoryParts, Symmetry,
};
pub use lemma22::{lemma22_check, lemma22_constants, MomentConstants};
