//! Area functionals, the clamped Euler–Lagrange solver, the buckling
//! eigenvalue and the minimality checks built on them.

pub mod area;
pub mod checks;
pub mod eigen;
pub mod galerkin;

pub use area::{
    area, boundary_integrand, clamped_bump, dirichlet_energy, gradient_energy, gradient_gap,
    integrate_nodal, laplacian_energy, AreaBreakdown,
};
pub use checks::{
    dirichlet_principle_check, theorem1_check, DirichletReport, Theorem1Report, Tolerances,
};
pub use eigen::{buckling_eigenvalue, EigenResult};
pub use galerkin::{
    solve_el_clamped, ClampedBoundaryData, ClampedSpace, ElSolution, ModeEigen, MAX_CONDITION,
};
