//! Area of the immersion built from `f`, in bulk-plus-boundary form and in
//! Monge–Ampère form, and the energies entering the minimality estimates.

use crate::error::Result;
use crate::sphere::{
    boundary_trace, covariant_hessian, gradient_s2, hat_laplacian, integrate_boundary,
    integrate_bulk, shifted_laplacian, Grid, ScalarField,
};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaBreakdown {
    /// `¼∫ Δ̂f (Δ̂+2)f dω`.
    pub bulk: f64,
    /// `½∮ ½∂_n|Df|² − (Δ̂+1)f ∂_n f ds`.
    pub boundary: f64,
    pub total: f64,
    /// `¼∫ (Δ̂f)² − 4M[f] dω`.
    pub ma_total: f64,
    pub discrepancy: f64,
}

impl AreaBreakdown {
    /// `discrepancy / (1 + ma_total)`.
    pub fn relative_discrepancy(&self) -> f64 {
        self.discrepancy / (1.0 + self.ma_total.abs())
    }
}

/// Pointwise boundary integrand `½∂_n|Df|² − (Δ̂+1)f ∂_n f` on the grid's
/// boundary nodes.
///
/// With `|Df|² = h (f_r² + f_φ²/r²)`, `h = e^{-σ} = (1+r²)²/4` and
/// `∂_n = √h ∂_r`.
pub fn boundary_integrand(f: &ScalarField) -> Vec<f64> {
    let grid = f.grid();
    let r = grid.radius();
    let h = 0.25 * (1.0 + r * r).powi(2);
    let dh = r * (1.0 + r * r);
    let sqrt_h = h.sqrt();
    let trace = boundary_trace(f);
    let lap = grid.boundary_partials_of(&f.modal().hat_laplacian());
    trace
        .partials
        .iter()
        .zip(&lap)
        .map(|(p, l)| {
            let grad_sq = p.fr * p.fr + p.ft * p.ft / (r * r);
            let d_grad_sq =
                2.0 * p.fr * p.frr + 2.0 * p.ft * p.frt / (r * r) - 2.0 * p.ft * p.ft / (r * r * r);
            let dn_norm = sqrt_h * (dh * grad_sq + h * d_grad_sq);
            let dn_f = sqrt_h * p.fr;
            0.5 * dn_norm - (l.f + p.f) * dn_f
        })
        .collect()
}

pub fn area(f: &ScalarField) -> AreaBreakdown {
    let bulk = 0.25 * dirichlet_energy(f);
    let boundary = 0.5 * integrate_boundary(f.grid(), &boundary_integrand(f));
    let total = bulk + boundary;
    let density: Vec<f64> = covariant_hessian(f)
        .iter()
        .map(|h| 0.25 * h.gap_sq())
        .collect();
    let ma_total = integrate_nodal(f.grid(), &density);
    AreaBreakdown {
        bulk,
        boundary,
        total,
        ma_total,
        discrepancy: (total - ma_total).abs(),
    }
}

/// `∫ Σ values · weight` over the grid's bulk nodes.
pub fn integrate_nodal(grid: &Grid, values: &[f64]) -> f64 {
    values
        .iter()
        .zip(grid.nodes())
        .map(|(v, n)| v * n.weight)
        .sum()
}

/// `∫ Δ̂f (Δ̂+2)f dω`.
pub fn dirichlet_energy(f: &ScalarField) -> f64 {
    let lap = hat_laplacian(f);
    let shifted = shifted_laplacian(f);
    let prod: Vec<f64> = lap
        .values()
        .iter()
        .zip(shifted.values())
        .map(|(a, b)| a * b)
        .collect();
    integrate_nodal(f.grid(), &prod)
}

/// `∫ |Df|² dω`.
pub fn gradient_energy(f: &ScalarField) -> f64 {
    let sq: Vec<f64> = gradient_s2(f)
        .iter()
        .map(|g| g[0] * g[0] + g[1] * g[1] + g[2] * g[2])
        .collect();
    integrate_nodal(f.grid(), &sq)
}

/// `∫ (Δ̂f)² dω`.
pub fn laplacian_energy(f: &ScalarField) -> f64 {
    let lap = hat_laplacian(f);
    integrate_bulk(&lap.zip_with(&lap, |a, b| a * b).expect("same grid"))
}

/// `∫ |Df − Dq|² dω`.
pub fn gradient_gap(f: &ScalarField, q: &ScalarField) -> Result<f64> {
    Ok(gradient_energy(&f.axpy(-1.0, q)?))
}

/// Clamped bump `(1 − r²/R²)³ · p(ν)`; value and normal derivative vanish
/// on the boundary.
pub fn clamped_bump(grid: &Arc<Grid>, modulation: impl Fn([f64; 3]) -> f64) -> ScalarField {
    let r2 = grid.radius().powi(2);
    ScalarField::from_fn(grid, |n| {
        (1.0 - n.r * n.r / r2).powi(3) * modulation(n.sphere.nu)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{CapDomain, Grid};
    use std::f64::consts::PI;

    fn hemi(nr: usize, nt: usize) -> Arc<Grid> {
        Grid::shared(CapDomain::hemisphere(), nr, nt).unwrap()
    }

    #[test]
    fn point_maps_have_zero_area() {
        let g = hemi(16, 32);
        for f in [
            ScalarField::constant(&g, 2.5),
            ScalarField::linear(&g, [0.3, -1.0, 0.7]),
        ] {
            let a = area(&f);
            assert!(a.total.abs() < 1e-12, "{a:?}");
            assert!(a.ma_total.abs() < 1e-12, "{a:?}");
            assert!(dirichlet_energy(&f).abs() < 1e-12);
        }
    }

    #[test]
    fn lichnerowicz_identity_for_quadratic_harmonic() {
        let g = hemi(24, 48);
        let f = ScalarField::nu_poly(&g, |nu| nu[0].mul_nu(1));
        let a = area(&f);
        assert!(a.relative_discrepancy() < 1e-10, "{a:?}");
        // Dense quadrature of the pointwise density ¼(σ₁−σ₂)² on a finer grid.
        let fine = hemi(64, 128);
        let dense = area(&ScalarField::nu_poly(&fine, |nu| nu[0].mul_nu(1)));
        assert!((a.ma_total - dense.ma_total).abs() < 1e-10 * dense.ma_total);
        assert!(a.ma_total > 0.0);
    }

    #[test]
    fn lichnerowicz_identity_on_other_caps() {
        for theta0 in [0.4, 1.1, 2.3] {
            let g = Grid::shared(CapDomain::new(theta0).unwrap(), 24, 48).unwrap();
            let f = ScalarField::from_fn(&g, |n| (n.sphere.nu[0] + 0.3 * n.sphere.nu[2]).exp());
            let a = area(&f);
            assert!(a.relative_discrepancy() < 1e-8, "theta0 {theta0}: {a:?}");
        }
    }

    #[test]
    fn clamped_bump_energy_matches_dense_quadrature() {
        let g = hemi(24, 48);
        let bump = clamped_bump(&g, |_| 1.0);
        let e = dirichlet_energy(&bump);
        // Axisymmetric oracle: u(z) = 8z³/(1+z)³ on [0, 1] (z0 = 0), with
        // Δ̂u = ((1−z²)u')' and dω = 2π dz; integrate by composite Simpson.
        let u = |z: f64| 8.0 * z.powi(3) / (1.0 + z).powi(3);
        let du = |z: f64| 24.0 * z * z / (1.0 + z).powi(4);
        let ddu = |z: f64| 48.0 * z * (1.0 - z) / (1.0 + z).powi(5);
        let lap = |z: f64| (1.0 - z * z) * ddu(z) - 2.0 * z * du(z);
        let n = 20_000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let z = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * lap(z) * (lap(z) + 2.0 * u(z));
        }
        let oracle = 2.0 * PI * s * h / 3.0;
        assert!(((e - oracle) / oracle).abs() < 1e-6, "{e} vs {oracle}");
    }

    #[test]
    fn bump_is_clamped() {
        let g = hemi(24, 48);
        let bump = clamped_bump(&g, |nu| 1.0 + nu[0] - 0.5 * nu[1] * nu[2]);
        let t = boundary_trace(&bump);
        // Traces are extrapolated from interior nodes, so clamping holds to
        // the fit accuracy rather than to rounding.
        let worst = t
            .value
            .iter()
            .chain(&t.normal)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-9, "{worst:e}");
    }
}
