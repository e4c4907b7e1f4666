//! Stereographic chart of the unit sphere centred at the north pole.
//!
//! The round metric pulls back to `e^σ |dw|²` with `e^σ = 4 / (1 + |w|²)²`,
//! `w = u + i v`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub u: f64,
    pub v: f64,
    pub r2: f64,
}

impl ChartPoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self {
            u,
            v,
            r2: u * u + v * v,
        }
    }

    pub fn polar(r: f64, phi: f64) -> Self {
        Self::new(r * phi.cos(), r * phi.sin())
    }

    pub fn w(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub nu: [f64; 3],
}

impl SpherePoint {
    pub fn dot(&self, a: [f64; 3]) -> f64 {
        self.nu[0] * a[0] + self.nu[1] * a[1] + self.nu[2] * a[2]
    }
}

pub fn stereo_to_sphere(p: ChartPoint) -> SpherePoint {
    let d = 1.0 + p.r2;
    SpherePoint {
        nu: [2.0 * p.u / d, 2.0 * p.v / d, (1.0 - p.r2) / d],
    }
}

/// Inverse chart; undefined at the south pole.
pub fn sphere_to_stereo(s: SpherePoint) -> ChartPoint {
    let d = 1.0 + s.nu[2];
    ChartPoint::new(s.nu[0] / d, s.nu[1] / d)
}

/// `e^σ = 4 / (1 + r²)²`.
pub fn conformal_factor(p: ChartPoint) -> f64 {
    let d = 1.0 + p.r2;
    4.0 / (d * d)
}

/// `σ_w = -2 w̄ / (1 + |w|²)`.
pub fn sigma_w(p: ChartPoint) -> Complex64 {
    -2.0 * p.w().conj() / (1.0 + p.r2)
}

/// Real gradient `(σ_u, σ_v)` of the log conformal factor.
pub fn sigma_grad(p: ChartPoint) -> [f64; 2] {
    let d = 1.0 + p.r2;
    [-4.0 * p.u / d, -4.0 * p.v / d]
}

/// Chart tangent vectors `(∂_u ν, ∂_v ν)` embedded in R³.
pub fn tangent_frame(p: ChartPoint) -> [[f64; 3]; 2] {
    let d = 1.0 + p.r2;
    let d2 = d * d;
    let (u, v) = (p.u, p.v);
    [
        [2.0 / d - 4.0 * u * u / d2, -4.0 * u * v / d2, -4.0 * u / d2],
        [-4.0 * u * v / d2, 2.0 / d - 4.0 * v * v / d2, -4.0 * v / d2],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_points_of_the_chart() {
        let n = stereo_to_sphere(ChartPoint::new(0.0, 0.0));
        assert_eq!(n.nu, [0.0, 0.0, 1.0]);
        let e = stereo_to_sphere(ChartPoint::new(1.0, 0.0));
        assert!((e.nu[0] - 1.0).abs() < 1e-15 && e.nu[1].abs() < 1e-15 && e.nu[2].abs() < 1e-15);
        assert_eq!(conformal_factor(ChartPoint::new(0.0, 0.0)), 4.0);
        assert_eq!(conformal_factor(ChartPoint::new(1.0, 0.0)), 1.0);
    }

    #[test]
    fn gauss_equation_of_the_chart() {
        // σ_{w w̄} = ¼ Δσ must equal -e^σ / 2.
        let h = 1e-4;
        let sigma = |u: f64, v: f64| conformal_factor(ChartPoint::new(u, v)).ln();
        for &(u, v) in &[(0.1, 0.2), (-0.7, 0.4), (1.3, -0.9), (0.0, 0.0)] {
            let lap = (sigma(u + h, v) + sigma(u - h, v) + sigma(u, v + h) + sigma(u, v - h)
                - 4.0 * sigma(u, v))
                / (h * h);
            let expected = -0.5 * conformal_factor(ChartPoint::new(u, v));
            assert!((0.25 * lap - expected).abs() < 1e-6, "{u},{v}");
        }
    }

    #[test]
    fn sigma_w_matches_real_gradient() {
        let p = ChartPoint::new(0.3, -0.8);
        let [su, sv] = sigma_grad(p);
        let sw = sigma_w(p);
        assert!((sw.re - 0.5 * su).abs() < 1e-15);
        assert!((sw.im + 0.5 * sv).abs() < 1e-15);
    }

    #[test]
    fn tangent_frame_is_conformal() {
        let p = ChartPoint::new(0.4, 1.1);
        let [a, b] = tangent_frame(p);
        let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let ef = conformal_factor(p);
        assert!((dot(a, a) - ef).abs() < 1e-14);
        assert!((dot(b, b) - ef).abs() < 1e-14);
        assert!(dot(a, b).abs() < 1e-15);
        let n = stereo_to_sphere(p);
        assert!(n.dot(a).abs() < 1e-15 && n.dot(b).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn chart_round_trip(u in -20.0f64..20.0, v in -20.0f64..20.0) {
            let p = ChartPoint::new(u, v);
            let s = stereo_to_sphere(p);
            let norm = s.nu.iter().map(|x| x * x).sum::<f64>();
            prop_assert!((norm - 1.0).abs() < 1e-12);
            let q = sphere_to_stereo(s);
            prop_assert!((q.u - u).abs() < 1e-12 * (1.0 + p.r2));
            prop_assert!((q.v - v).abs() < 1e-12 * (1.0 + p.r2));
        }
    }
}
