//! Light-ray time averages, asymptotic fields, two-wave scattering states
//! and the scattering operator.

pub mod chiral;
pub mod fields;
pub mod kernel;
pub mod states;

pub use chiral::{
    asymptotic_triple_generators, chiral_asymptotic_field, intertwiner_w, AsymptoticGenerators,
    AsymptoticSpace, AsymptoticTripleReport, Intertwiner,
};
pub use fields::{
    asymptotic_field, asymptotic_field_direct, smear_along_ray, AsymptoticField, AsymptoticKind,
    ConvergenceTrace, LightconeSpectrum, LimitPlan, LimitSettings, ProbeSet, RaySign, Smeared,
    SmearingPlan, TracePoint,
};
pub use kernel::{AveragingKernel, BaseProfile, KernelTransform, QuadratureSettings};
pub use states::{
    basis_pairs, build_scattering_state, check_clustering, exact_chiral_state, scattering_operator,
    Dictionary, DictionarySpec, Direction, ScatteringEngine, ScatteringOperator, ScatteringState,
    StateTrace,
};

#[cfg(test)]
mod tests;
