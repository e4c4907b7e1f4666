use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// A vector `(x₁, x₂, x₃, x₄)` of `R⁴₁` with signature `(+, +, +, −)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LorentzVec4(pub [f64; 4]);

impl LorentzVec4 {
    pub fn new(spatial: [f64; 3], time: f64) -> Self {
        Self([spatial[0], spatial[1], spatial[2], time])
    }

    /// The null section `ξ = (ν, 1)`.
    pub fn null_section(nu: [f64; 3]) -> Self {
        Self::new(nu, 1.0)
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn time(&self) -> f64 {
        self.0[3]
    }

    /// Lorentz inner product `x₁y₁ + x₂y₂ + x₃y₃ − x₄y₄`.
    pub fn dot(&self, o: &Self) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2] - self.0[3] * o.0[3]
    }

    /// Euclidean length in `R⁴`, used for residual sizes since null vectors
    /// have zero Lorentz norm.
    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Add for LorentzVec4 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for LorentzVec4 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for LorentzVec4 {
    type Output = Self;
    fn mul(self, t: f64) -> Self {
        Self(self.0.map(|x| x * t))
    }
}
