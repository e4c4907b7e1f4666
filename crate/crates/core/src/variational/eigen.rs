//! First buckling eigenvalue `β₁ = min ∫(Δ̂u)² / ∫|Du|²` over the discrete
//! clamped space.

use super::area::{gradient_energy, laplacian_energy};
use super::galerkin::ClampedSpace;
use crate::error::Result;
use crate::oracle::cap_buckling_shooting;
use crate::sphere::{boundary_trace, Grid, ScalarField};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub beta1: f64,
    /// Angular mode of the minimiser.
    pub mode: usize,
    /// Minimiser, normalised to `∫|Du|² = 1` with its first nonzero
    /// coefficient positive.
    pub eigenfield: ScalarField,
    /// `|R[u] − β₁| / β₁` with `R` evaluated by grid quadrature.
    pub rayleigh_residual: f64,
    /// Largest boundary value or normal derivative of the eigenfield.
    pub clamp_residual: f64,
    /// Axisymmetric shooting value, when the shooting bracket succeeds.
    pub oracle_value: Option<f64>,
    /// Smallest eigenvalue in each angular mode.
    pub per_mode: Vec<f64>,
    pub iterations: usize,
}

pub fn buckling_eigenvalue(grid: &Arc<Grid>) -> Result<EigenResult> {
    let space = ClampedSpace::new(grid);
    let mut modes = Vec::with_capacity(space.max_mode() + 1);
    for m in 0..=space.max_mode() {
        modes.push(space.mode_eigen(m)?);
    }
    let best = modes
        .iter()
        .min_by(|a, b| a.beta.total_cmp(&b.beta))
        .expect("at least one mode")
        .clone();
    let eigenfield = space.field(best.m, &best.coeffs, &[]);
    let rayleigh = laplacian_energy(&eigenfield) / gradient_energy(&eigenfield);
    let trace = boundary_trace(&eigenfield);
    let clamp_residual = trace
        .value
        .iter()
        .chain(&trace.normal)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(EigenResult {
        beta1: best.beta,
        mode: best.m,
        rayleigh_residual: (rayleigh - best.beta).abs() / best.beta,
        clamp_residual,
        eigenfield,
        oracle_value: cap_buckling_shooting(grid.domain().theta0()).ok(),
        per_mode: modes.iter().map(|e| e.beta).collect(),
        iterations: modes.iter().map(|e| e.iterations).sum(),
    })
}
