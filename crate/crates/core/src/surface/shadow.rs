use crate::sphere::{gradient_s2, ScalarField};
use serde::Serialize;

/// The R³ surface `X̄ = Df + f ν` with Gauss map `ν`.
#[derive(Debug, Clone, Serialize)]
pub struct ShadowSurface {
    pub points: Vec<[f64; 3]>,
    /// `max |X̄·ν − f|`.
    pub support_gap: f64,
    /// `max |X̄ − (X̄·ν)ν − Df|`.
    pub tangential_gap: f64,
}

pub fn shadow_surface(f: &ScalarField) -> ShadowSurface {
    let grad = gradient_s2(f);
    let mut support_gap = 0.0f64;
    let mut tangential_gap = 0.0f64;
    let points = f
        .grid()
        .nodes()
        .iter()
        .zip(&grad)
        .zip(f.values())
        .map(|((node, df), &fv)| {
            let nu = node.sphere.nu;
            let x: [f64; 3] = std::array::from_fn(|i| df[i] + fv * nu[i]);
            let normal = node.sphere.dot(x);
            support_gap = support_gap.max((normal - fv).abs());
            let t: f64 = (0..3)
                .map(|i| (x[i] - normal * nu[i] - df[i]).powi(2))
                .sum::<f64>()
                .sqrt();
            tangential_gap = tangential_gap.max(t);
            x
        })
        .collect();
    ShadowSurface {
        points,
        support_gap,
        tangential_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{CapDomain, Grid};

    #[test]
    fn shadow_of_simple_fields() {
        let g = Grid::shared(CapDomain::hemisphere(), 16, 32).unwrap();
        let a = [1.0, -2.0, 0.5];
        let s = shadow_surface(&ScalarField::linear(&g, a));
        for p in &s.points {
            for i in 0..3 {
                assert!((p[i] - a[i]).abs() < 1e-12);
            }
        }
        let s = shadow_surface(&ScalarField::constant(&g, -2.0));
        for (p, n) in s.points.iter().zip(g.nodes()) {
            for i in 0..3 {
                assert!((p[i] + 2.0 * n.sphere.nu[i]).abs() < 1e-13);
            }
        }
        let f = ScalarField::from_fn(&g, |n| n.sphere.nu[0] * n.sphere.nu[1]);
        let s = shadow_surface(&f);
        assert!(s.support_gap < 1e-10 && s.tangential_gap < 1e-12);
    }
}
