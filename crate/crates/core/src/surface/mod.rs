//! Marginally trapped spherical graphs in `R⁴₁` built from a scalar field.

pub mod export;
pub mod immersion;
pub mod lorentz;
pub mod shadow;

pub use immersion::{
    build_immersion, build_immersion_with, conformality_check, induced_metric,
    mean_curvature_residual, mt_residual, support_roundtrip, ConformalityReport, Immersion,
    ImmersionSample, MetricReport, ResidualField, SupportRoundtrip, DEGENERACY_THRESHOLD,
};
pub use lorentz::LorentzVec4;
pub use shadow::{shadow_surface, ShadowSurface};
