//! Warped convolution: the exact spectral sum, the regularized oscillatory
//! integral, and the deformed scattering states and operator.

pub mod deformation;
pub mod scattering;

pub use deformation::{
    commutant_trend, deformed_commutant_check, minkowski, momentum_vector, warp_oscillatory,
    warp_spectral, CommutantSweep, CommutantTrend, DeformationMatrix, DeformedElement, Mollifier,
    OscillatoryWarp, WarpSettings,
};
pub use scattering::{
    deformed_in_state, deformed_out_state, deformed_scattering_operator, DeformedPipeline,
    DeformedScattering, DeformedState, PairPhase,
};
