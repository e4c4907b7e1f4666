use super::grid::{Grid, Node};
use super::modal::Modal;
use crate::error::{Error, Result};
use std::sync::Arc;

/// A real function on a [`Grid`]: nodal samples plus the modal
/// representation used for differentiation.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    modal: Modal,
}

impl ScalarField {
    /// Field from nodal samples; the modal representation is fitted.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite nodal value".into()));
        }
        let modal = grid.fit(&values);
        Ok(Self {
            grid,
            values,
            modal,
        })
    }

    /// Field given exactly by its modal representation.
    pub fn from_modal(grid: &Arc<Grid>, modal: Modal) -> Self {
        let values = grid.evaluate(&modal);
        Self {
            grid: Arc::clone(grid),
            values,
            modal,
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&Node) -> f64) -> Self {
        let values: Vec<f64> = grid.nodes().iter().map(f).collect();
        let modal = grid.fit(&values);
        Self {
            grid: Arc::clone(grid),
            values,
            modal,
        }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        let mut modal = Modal::zeros(grid.domain().theta0().cos());
        modal.set_mode(0, vec![c], Vec::new());
        Self::from_modal(grid, modal)
    }

    /// Restriction of the linear function `x ↦ a·x` to the sphere.
    pub fn linear(grid: &Arc<Grid>, a: [f64; 3]) -> Self {
        Self::nu_poly(grid, |nu| {
            nu[0].scale(a[0]).axpy(a[1], &nu[1]).axpy(a[2], &nu[2])
        })
    }

    /// Field built exactly from the coordinate functions `ν₁, ν₂, ν₃`.
    pub fn nu_poly(grid: &Arc<Grid>, build: impl Fn(&[Modal; 3]) -> Modal) -> Self {
        let mut one = Modal::zeros(grid.domain().theta0().cos());
        one.set_mode(0, vec![1.0], Vec::new());
        let nu = [one.mul_nu(0), one.mul_nu(1), one.mul_nu(2)];
        Self::from_modal(grid, build(&nu))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn modal(&self) -> &Modal {
        &self.modal
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    /// Largest deviation between the modal evaluation and the nodal samples.
    pub fn fit_error(&self) -> f64 {
        self.grid
            .evaluate(&self.modal)
            .iter()
            .zip(&self.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self.values.iter().map(|&v| f(v)).collect();
        Self::new(Arc::clone(&self.grid), values).expect("same grid")
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(Arc::clone(&self.grid), values)
    }

    /// `self + t·other`, exact on the modal representation.
    pub fn axpy(&self, t: f64, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + t * b)
                .collect(),
            modal: self.modal.axpy(t, &other.modal),
        })
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * t).collect(),
            modal: self.modal.scale(t),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
