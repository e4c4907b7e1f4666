//! Exact solutions and eigenvalue oracles used to validate the solvers.

pub mod buckling;
pub mod holomorphic;
pub mod rational;

pub use buckling::{
    bessel_j1, cap_buckling_shooting, flat_disk_buckling, j1_first_zero, legendre_series,
};
pub use holomorphic::{
    q_from_holomorphic, ExactSolution, HolomorphicPoly, IdentityResiduals, Part,
};
pub use rational::Rational;
