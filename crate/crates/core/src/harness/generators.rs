//! Fields used by the experiments: configured generators, random
//! polynomial fields and random clamped bumps.

use super::config::{ExperimentConfig, GeneratorKind, Harmonic};
use crate::error::Result;
use crate::oracle::{q_from_holomorphic, ExactSolution, HolomorphicPoly};
use crate::sphere::{CapDomain, Grid, Modal, ScalarField};
use crate::variational::clamped_bump;
use num_complex::Complex64;
use rand::Rng;
use std::sync::Arc;

/// A configured field, with its closed form when it comes from the
/// holomorphic construction.
pub struct Generated {
    pub field: ScalarField,
    pub exact: Option<ExactSolution>,
    pub label: String,
}

pub fn grid_for(cfg: &ExperimentConfig) -> Result<Arc<Grid>> {
    Grid::shared(CapDomain::new(cfg.theta0)?, cfg.nr, cfg.ntheta)
}

pub fn holomorphic_poly(cfg: &ExperimentConfig) -> Result<HolomorphicPoly> {
    HolomorphicPoly::new(cfg.poly.iter().map(|c| Complex64::new(c[0], c[1])).collect())
}

pub fn generate(cfg: &ExperimentConfig, grid: &Arc<Grid>, rng: &mut impl Rng) -> Result<Generated> {
    match cfg.generator {
        GeneratorKind::Holomorphic => {
            let poly = holomorphic_poly(cfg)?;
            let exact = q_from_holomorphic(&poly, cfg.part, grid.domain())?;
            Ok(Generated {
                field: exact.field(grid),
                label: format!("{:?}(Q) for p(w) = {:?}", cfg.part, cfg.poly),
                exact: Some(exact),
            })
        }
        GeneratorKind::Harmonic => {
            let field = match cfg.harmonic {
                Harmonic::One => ScalarField::constant(grid, 1.0),
                Harmonic::Nu1 => ScalarField::linear(grid, [1.0, 0.0, 0.0]),
                Harmonic::Nu2 => ScalarField::linear(grid, [0.0, 1.0, 0.0]),
                Harmonic::Nu3 => ScalarField::linear(grid, [0.0, 0.0, 1.0]),
                Harmonic::Nu1nu2 => ScalarField::nu_poly(grid, |nu| nu[0].mul_nu(1)),
                Harmonic::Random => random_polynomial_field(grid, cfg.harmonic_degree, rng),
            };
            Ok(Generated {
                field,
                exact: None,
                label: format!("{:?}", cfg.harmonic).to_lowercase(),
            })
        }
    }
}

/// `Σ c_abc ν₁^a ν₂^b ν₃^c` over `a + b + c ≤ degree` with coefficients
/// uniform in `[−1, 1]`, built exactly in modal form. On the sphere these
/// span the spherical harmonics of degree `≤ degree`.
pub fn random_polynomial_field(grid: &Arc<Grid>, degree: usize, rng: &mut impl Rng) -> ScalarField {
    let mut terms = Vec::new();
    for a in 0..=degree {
        for b in 0..=degree - a {
            for c in 0..=degree - a - b {
                terms.push(([a, b, c], rng.gen_range(-1.0..=1.0)));
            }
        }
    }
    ScalarField::nu_poly(grid, |nu| {
        let z0 = nu[0].z0();
        let mut acc = Modal::zeros(z0);
        for (powers, coeff) in &terms {
            let mut mono = ScalarField::constant(grid, 1.0).modal().clone();
            for (axis, &p) in powers.iter().enumerate() {
                for _ in 0..p {
                    mono = mono.mul_nu(axis);
                }
            }
            acc = acc.axpy(*coeff, &mono);
        }
        acc
    })
}

pub fn bump(grid: &Arc<Grid>, c: [f64; 4]) -> ScalarField {
    clamped_bump(grid, |nu| c[0] + c[1] * nu[0] + c[2] * nu[1] + c[3] * nu[2])
}

/// Clamped bump with modulation `c₀ + c·ν`, `c₀ ∈ [0.5, 1.5]`,
/// `c ∈ [−1, 1]³`.
pub fn random_bump(grid: &Arc<Grid>, rng: &mut impl Rng) -> (ScalarField, [f64; 4]) {
    let c = [
        rng.gen_range(0.5..=1.5),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    ];
    (bump(grid, c), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_fields_are_reproducible_and_exact() {
        let g = Grid::shared(CapDomain::hemisphere(), 16, 32).unwrap();
        let a = random_polynomial_field(&g, 4, &mut ChaCha8Rng::seed_from_u64(7));
        let b = random_polynomial_field(&g, 4, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a.values(), b.values());
        // Refitting the nodal values reproduces the exact modal field.
        assert!(a.fit_error() < 1e-13);
    }

    #[test]
    fn generators_follow_config() {
        let cfg = ExperimentConfig::default();
        let g = grid_for(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let q = generate(&cfg, &g, &mut rng).unwrap();
        assert!(q.exact.is_some());
        let harmonic = ExperimentConfig {
            generator: GeneratorKind::Harmonic,
            harmonic: Harmonic::Nu3,
            ..cfg
        };
        let f = generate(&harmonic, &g, &mut rng).unwrap();
        let nu3: Vec<f64> = g.nodes().iter().map(|n| n.sphere.nu[2]).collect();
        assert!(f.field.values().iter().zip(&nu3).all(|(a, b)| (a - b).abs() < 1e-14));
    }
}
