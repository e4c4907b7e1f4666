//! Numerical checks of the Dirichlet principle and of area minimality for
//! zero mean curvature graphs.

use super::area::{area, boundary_integrand, dirichlet_energy, gradient_energy, AreaBreakdown};
use super::galerkin::ClampedSpace;
use crate::error::{Error, Result};
use crate::sphere::{boundary_trace, ScalarField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative tolerance of quadrature identities.
    pub quadrature: f64,
    /// Absolute tolerance on inequality slacks.
    pub slack: f64,
    /// Boundary trace mismatch allowed for clamped differences, relative
    /// to `1 + max|trace|`.
    pub clamp: f64,
    /// Normalised weak Euler–Lagrange residual.
    pub el: f64,
    /// Pointwise agreement of boundary integrands.
    pub boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: 1e-6,
            slack: 1e-8,
            clamp: 1e-8,
            el: 1e-6,
            boundary: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirichletReport {
    pub beta1: f64,
    pub energy_q: f64,
    pub energy_f: f64,
    /// `∫|Df − Dq|² dω`.
    pub gradient_gap: f64,
    /// `(β₁−2)∫|Df−Dq|² + E(q)`.
    pub lhs: f64,
    /// `E(f)`.
    pub rhs: f64,
    pub slack: f64,
    /// `E(f−q) − (β₁−2)∫|D(f−q)|²`, the slack once the cross terms cancel.
    pub predicted_slack: f64,
    /// `|slack − predicted_slack| / max(|predicted_slack|, E(f−q))`.
    pub prediction_error: f64,
    pub el_residual: f64,
    pub value_gap: f64,
    pub normal_gap: f64,
}

impl DirichletReport {
    pub fn passed(&self, tol: &Tolerances) -> bool {
        self.slack >= -tol.slack && self.prediction_error <= tol.quadrature
    }
}

struct Preconditions {
    el_residual: f64,
    value_gap: f64,
    normal_gap: f64,
}

fn preconditions(q: &ScalarField, f: &ScalarField, tol: &Tolerances) -> Result<Preconditions> {
    if !q.same_grid(f) {
        return Err(Error::GridMismatch);
    }
    let el_residual = ClampedSpace::new(q.grid()).weak_el_residual(q)?;
    if !(el_residual <= tol.el) {
        return Err(Error::NotElSolution {
            residual: el_residual,
            tolerance: tol.el,
        });
    }
    let tq = boundary_trace(q);
    let tf = boundary_trace(f);
    let scale = 1.0
        + tq.value
            .iter()
            .chain(&tq.normal)
            .fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale
    };
    let value_gap = gap(&tf.value, &tq.value);
    let normal_gap = gap(&tf.normal, &tq.normal);
    if !(value_gap <= tol.clamp && normal_gap <= tol.clamp) {
        return Err(Error::NotClamped {
            value_gap,
            normal_gap,
            tolerance: tol.clamp,
        });
    }
    Ok(Preconditions {
        el_residual,
        value_gap,
        normal_gap,
    })
}

/// `(β₁−2)∫|Df−Dq|² + E(q) ≤ E(f)` with `E(u) = ∫Δ̂u(Δ̂+2)u`, for `q`
/// solving the Euler–Lagrange equation and `f − q` clamped.
pub fn dirichlet_principle_check(
    q: &ScalarField,
    f: &ScalarField,
    beta1: f64,
    tol: &Tolerances,
) -> Result<DirichletReport> {
    let pre = preconditions(q, f, tol)?;
    let phi = f.axpy(-1.0, q)?;
    let energy_q = dirichlet_energy(q);
    let energy_f = dirichlet_energy(f);
    let energy_phi = dirichlet_energy(&phi);
    let gradient_gap = gradient_energy(&phi);
    let lhs = (beta1 - 2.0) * gradient_gap + energy_q;
    let slack = energy_f - lhs;
    let predicted_slack = energy_phi - (beta1 - 2.0) * gradient_gap;
    let denom = predicted_slack.abs().max(energy_phi.abs());
    let prediction_error = if denom == 0.0 {
        (slack - predicted_slack).abs()
    } else {
        (slack - predicted_slack).abs() / denom
    };
    Ok(DirichletReport {
        beta1,
        energy_q,
        energy_f,
        gradient_gap,
        lhs,
        rhs: energy_f,
        slack,
        predicted_slack,
        prediction_error,
        el_residual: pre.el_residual,
        value_gap: pre.value_gap,
        normal_gap: pre.normal_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub beta1: f64,
    pub area_x: AreaBreakdown,
    pub area_y: AreaBreakdown,
    /// `Area[Y] − Area[X]`.
    pub gap: f64,
    /// `¼ E(f − q)`, the gap predicted by the quadratic expansion.
    pub quarter_energy: f64,
    /// `|gap − quarter_energy| / max(|quarter_energy|, tiny)`.
    pub gap_law_error: f64,
    /// `∫|Df − Dq|² dω`.
    pub gradient_gap: f64,
    /// `(β₁−2)∫|Df−Dq|²`.
    pub est_term: f64,
    /// `Area[Y] − Area[X] − (β₁−2)∫|Df−Dq|²`.
    pub est_slack: f64,
    /// `Area[Y] − Area[X] − ¼(β₁−2)∫|Df−Dq|²`, the bound that follows from
    /// the Dirichlet principle and the ¼ in the area formula.
    pub est_slack_quarter: f64,
    /// Largest pointwise difference of the boundary integrands of `f` and `q`.
    pub boundary_integrand_gap: f64,
    pub el_residual: f64,
}

impl Theorem1Report {
    pub fn minimality_holds(&self, tol: &Tolerances) -> bool {
        self.area_x.total <= self.area_y.total + tol.slack
    }

    pub fn estimate_holds(&self, tol: &Tolerances) -> bool {
        self.est_slack >= -tol.slack
    }

    pub fn gap_law_holds(&self, tol: &Tolerances) -> bool {
        self.gap_law_error <= tol.quadrature
    }

    pub fn boundary_agrees(&self, tol: &Tolerances) -> bool {
        self.boundary_integrand_gap <= tol.boundary
    }
}

/// Compare the zero mean curvature graph built from `q` against the
/// marginally trapped graph built from `f` with the same clamped data.
pub fn theorem1_check(
    q: &ScalarField,
    f: &ScalarField,
    beta1: f64,
    tol: &Tolerances,
) -> Result<Theorem1Report> {
    let pre = preconditions(q, f, tol)?;
    let phi = f.axpy(-1.0, q)?;
    let area_x = area(q);
    let area_y = area(f);
    let gap = area_y.total - area_x.total;
    let quarter_energy = 0.25 * dirichlet_energy(&phi);
    let gap_law_error = (gap - quarter_energy).abs() / quarter_energy.abs().max(1e-300);
    let gradient_gap = gradient_energy(&phi);
    let est_term = (beta1 - 2.0) * gradient_gap;
    let bq = boundary_integrand(q);
    let bf = boundary_integrand(f);
    let boundary_integrand_gap = bq
        .iter()
        .zip(&bf)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(Theorem1Report {
        beta1,
        area_x,
        area_y,
        gap,
        quarter_energy,
        gap_law_error: if gap == quarter_energy {
            0.0
        } else {
            gap_law_error
        },
        gradient_gap,
        est_term,
        est_slack: gap - est_term,
        est_slack_quarter: gap - 0.25 * est_term,
        boundary_integrand_gap,
        el_residual: pre.el_residual,
    })
}
