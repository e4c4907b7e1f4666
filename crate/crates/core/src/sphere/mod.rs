//! Calculus on geodesic caps of the unit sphere.

pub mod chart;
pub mod field;
pub mod grid;
pub mod modal;
pub mod ops;
pub mod quadrature;

pub use chart::{
    conformal_factor, sigma_grad, sphere_to_stereo, stereo_to_sphere, tangent_frame, ChartPoint,
    SpherePoint,
};
pub use field::ScalarField;
pub use grid::{gauss_points, BoundaryNode, CapDomain, ChartDerivs, Grid, Node, Partials};
pub use modal::{Modal, ModeCoeffs};
pub use ops::{
    boundary_trace, covariant_hessian, el_operator, gradient_s2, hat_laplacian, integrate_boundary,
    integrate_bulk, monge_ampere, shifted_laplacian, BoundaryTrace, HessianSample,
};
