//! Differential operators and integrals on spherical caps.

use super::chart::{conformal_factor, sigma_grad, tangent_frame, ChartPoint};
use super::field::ScalarField;
use super::grid::{ChartDerivs, Grid, Partials};

/// Covariant Hessian `D²f` of a field at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianSample {
    /// Chart components `H_ij`, i.e. `∂_i∂_j f − Γ^k_ij ∂_k f`.
    pub chart: [[f64; 2]; 2],
    /// Eigenvalues relative to the sphere metric, `sigma1 >= sigma2`.
    pub sigma1: f64,
    pub sigma2: f64,
    pub trace: f64,
    /// Trace-free part `H − ½ trace · g` (chart components).
    pub deviator: [[f64; 2]; 2],
}

impl HessianSample {
    pub fn from_derivs(d: &ChartDerivs, p: ChartPoint) -> Self {
        let [su, sv] = sigma_grad(p);
        let huu = d.fuu - 0.5 * su * d.fu + 0.5 * sv * d.fv;
        let hvv = d.fvv + 0.5 * su * d.fu - 0.5 * sv * d.fv;
        let huv = d.fuv - 0.5 * sv * d.fu - 0.5 * su * d.fv;
        let ef = conformal_factor(p);
        // The metric is conformally flat, so g⁻¹H = e^{-σ}H is symmetric.
        let (a, b, c) = (huu / ef, huv / ef, hvv / ef);
        let trace = a + c;
        let half_gap = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let mean = 0.5 * trace;
        let dev_uu = huu - 0.5 * trace * ef;
        let dev_vv = hvv - 0.5 * trace * ef;
        Self {
            chart: [[huu, huv], [huv, hvv]],
            sigma1: mean + half_gap,
            sigma2: mean - half_gap,
            trace,
            deviator: [[dev_uu, huv], [huv, dev_vv]],
        }
    }

    /// `σ₁σ₂`, the determinant relative to the sphere metric.
    pub fn monge_ampere(&self) -> f64 {
        self.sigma1 * self.sigma2
    }

    /// `(σ₁ − σ₂)²`.
    pub fn gap_sq(&self) -> f64 {
        let g = self.sigma1 - self.sigma2;
        g * g
    }
}

/// Gradient of `d` at `p`, embedded in R³.
pub fn gradient_at(d: &ChartDerivs, p: ChartPoint) -> [f64; 3] {
    let [tu, tv] = tangent_frame(p);
    let inv = 1.0 / conformal_factor(p);
    [
        inv * (d.fu * tu[0] + d.fv * tv[0]),
        inv * (d.fu * tu[1] + d.fv * tv[1]),
        inv * (d.fu * tu[2] + d.fv * tv[2]),
    ]
}

pub fn hat_laplacian_at(d: &ChartDerivs, p: ChartPoint) -> f64 {
    (d.fuu + d.fvv) / conformal_factor(p)
}

pub fn gradient_s2(f: &ScalarField) -> Vec<[f64; 3]> {
    let grid = f.grid();
    grid.chart_derivs_of(f.modal())
        .iter()
        .zip(grid.nodes())
        .map(|(d, n)| gradient_at(d, n.chart))
        .collect()
}

/// `Δ̂f = e^{-σ}(f_uu + f_vv)`, applied to the modal coefficients.
pub fn hat_laplacian(f: &ScalarField) -> ScalarField {
    ScalarField::from_modal(f.grid(), f.modal().hat_laplacian())
}

/// `(Δ̂ + 2) f`.
pub fn shifted_laplacian(f: &ScalarField) -> ScalarField {
    ScalarField::from_modal(f.grid(), f.modal().shifted_laplacian())
}

/// `Δ̂(Δ̂ + 2) f`, the Euler–Lagrange operator.
pub fn el_operator(f: &ScalarField) -> ScalarField {
    ScalarField::from_modal(f.grid(), f.modal().shifted_laplacian().hat_laplacian())
}

pub fn covariant_hessian(f: &ScalarField) -> Vec<HessianSample> {
    let grid = f.grid();
    grid.chart_derivs_of(f.modal())
        .iter()
        .zip(grid.nodes())
        .map(|(d, n)| HessianSample::from_derivs(d, n.chart))
        .collect()
}

pub fn monge_ampere(f: &ScalarField) -> ScalarField {
    let values = covariant_hessian(f)
        .iter()
        .map(HessianSample::monge_ampere)
        .collect();
    ScalarField::new(f.grid().clone(), values).expect("same grid")
}

/// `∫_Ω g dω`, summed in node order.
pub fn integrate_bulk(g: &ScalarField) -> f64 {
    g.values()
        .iter()
        .zip(g.grid().nodes())
        .map(|(v, n)| v * n.weight)
        .sum()
}

/// `∮_∂Ω g ds` for samples on the grid's boundary nodes.
pub fn integrate_boundary(grid: &Grid, values: &[f64]) -> f64 {
    assert_eq!(values.len(), grid.boundary().len());
    values
        .iter()
        .zip(grid.boundary())
        .map(|(v, b)| v * b.weight)
        .sum()
}

/// Traces of a field on `∂Ω`: value, outward normal derivative, and the
/// polar partials they came from.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub value: Vec<f64>,
    pub normal: Vec<f64>,
    pub partials: Vec<Partials>,
}

pub fn boundary_trace(f: &ScalarField) -> BoundaryTrace {
    let grid = f.grid();
    let partials = grid.boundary_partials_of(f.modal());
    let scale = 1.0 / conformal_factor(ChartPoint::new(grid.radius(), 0.0)).sqrt();
    BoundaryTrace {
        value: partials.iter().map(|p| p.f).collect(),
        normal: partials.iter().map(|p| p.fr * scale).collect(),
        partials,
    }
}
