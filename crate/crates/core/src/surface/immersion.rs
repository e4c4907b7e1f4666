//! The immersion `Y = (Df − ½Δ̂f ν, −½(Δ̂ + 2)f)` of a spherical graph and its
//! induced geometry.
//!
//! Besides the pointwise formula, each component is kept as an exact modal
//! field through `Y_i = ½(Δ̂ + 2)(f ν_i) − ν_i Δ̂f`, so `dY` and `Δ̂Y` are
//! obtained without refitting.

use super::lorentz::LorentzVec4;
use crate::sphere::{
    conformal_factor, covariant_hessian, gradient_s2, hat_laplacian, tangent_frame, HessianSample,
    Modal, ScalarField,
};
use serde::Serialize;

/// Nodes with `(σ₁ − σ₂)² < DEGENERACY_THRESHOLD · (1 + ‖D²f‖∞²)` are flagged.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ImmersionSample {
    pub y: LorentzVec4,
    pub xi: LorentzVec4,
    /// `(∂_u Y, ∂_v Y)`.
    pub dy: [LorentzVec4; 2],
    /// `(∂_u ξ, ∂_v ξ)`.
    pub dxi: [LorentzVec4; 2],
    /// Induced metric `dY · dY` in chart components.
    pub metric: [[f64; 2]; 2],
    /// Area element relative to `dω`.
    pub density: f64,
    /// `Δ̂Y`, componentwise.
    pub lap_y: LorentzVec4,
    #[serde(skip)]
    pub hessian: HessianSample,
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct Immersion {
    field: ScalarField,
    samples: Vec<ImmersionSample>,
    components: [Modal; 4],
    alt_gap: f64,
    modal_gap: f64,
    hessian_max: f64,
    scale: f64,
}

pub fn build_immersion(f: &ScalarField) -> Immersion {
    build_immersion_with(f, DEGENERACY_THRESHOLD)
}

pub fn build_immersion_with(f: &ScalarField, threshold: f64) -> Immersion {
    let grid = f.grid();
    let m = f.modal();
    let lap = m.hat_laplacian();
    let components = [
        m.mul_nu(0)
            .shifted_laplacian()
            .scale(0.5)
            .axpy(-1.0, &lap.mul_nu(0)),
        m.mul_nu(1)
            .shifted_laplacian()
            .scale(0.5)
            .axpy(-1.0, &lap.mul_nu(1)),
        m.mul_nu(2)
            .shifted_laplacian()
            .scale(0.5)
            .axpy(-1.0, &lap.mul_nu(2)),
        m.shifted_laplacian().scale(-0.5),
    ];
    let derivs: Vec<_> = components.iter().map(|c| grid.chart_derivs_of(c)).collect();
    let laps: Vec<_> = components
        .iter()
        .map(|c| grid.evaluate(&c.hat_laplacian()))
        .collect();

    let grad = gradient_s2(f);
    let lap_f = hat_laplacian(f);
    let hess = covariant_hessian(f);
    let hessian_max = hess
        .iter()
        .fold(0.0f64, |acc, h| acc.max(h.sigma1.abs()).max(h.sigma2.abs()));
    let cutoff = threshold * (1.0 + hessian_max * hessian_max);

    let mut alt_gap = 0.0f64;
    let mut modal_gap = 0.0f64;
    let mut samples = Vec::with_capacity(grid.len());
    for (n, node) in grid.nodes().iter().enumerate() {
        let nu = node.sphere.nu;
        let (fv, lf, df) = (f.values()[n], lap_f.values()[n], grad[n]);
        let y = LorentzVec4::new(
            [
                df[0] - 0.5 * lf * nu[0],
                df[1] - 0.5 * lf * nu[1],
                df[2] - 0.5 * lf * nu[2],
            ],
            -0.5 * (lf + 2.0 * fv),
        );
        let alt = LorentzVec4::new(
            [df[0] + fv * nu[0], df[1] + fv * nu[1], df[2] + fv * nu[2]],
            0.0,
        ) - LorentzVec4::null_section(nu) * (0.5 * (lf + 2.0 * fv));
        alt_gap = alt_gap.max((y - alt).euclid_norm());
        let from_modal = LorentzVec4(std::array::from_fn(|c| derivs[c][n].f));
        modal_gap = modal_gap.max((y - from_modal).euclid_norm());

        let dy = [
            LorentzVec4(std::array::from_fn(|c| derivs[c][n].fu)),
            LorentzVec4(std::array::from_fn(|c| derivs[c][n].fv)),
        ];
        let [tu, tv] = tangent_frame(node.chart);
        let dxi = [LorentzVec4::new(tu, 0.0), LorentzVec4::new(tv, 0.0)];
        let g = [
            [dy[0].dot(&dy[0]), dy[0].dot(&dy[1])],
            [dy[1].dot(&dy[0]), dy[1].dot(&dy[1])],
        ];
        let det = (g[0][0] * g[1][1] - g[0][1] * g[1][0]).max(0.0);
        let density = det.sqrt() / conformal_factor(node.chart);
        let h = hess[n];
        samples.push(ImmersionSample {
            y,
            xi: LorentzVec4::null_section(nu),
            dy,
            dxi,
            metric: g,
            density,
            lap_y: LorentzVec4(std::array::from_fn(|c| laps[c][n])),
            hessian: h,
            degenerate: h.gap_sq() < cutoff,
        });
    }
    let scale = samples
        .iter()
        .zip(grid.nodes())
        .map(|(s, node)| {
            let ef = conformal_factor(node.chart);
            ((s.dy[0].euclid_norm().powi(2) + s.dy[1].euclid_norm().powi(2)) / ef).sqrt()
        })
        .fold(0.0f64, f64::max);

    Immersion {
        field: f.clone(),
        samples,
        components,
        alt_gap,
        modal_gap,
        hessian_max,
        scale,
    }
}

impl Immersion {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn samples(&self) -> &[ImmersionSample] {
        &self.samples
    }

    /// Modal fields of `Y₁ … Y₄`.
    pub fn components(&self) -> &[Modal; 4] {
        &self.components
    }

    /// Largest difference between the two pointwise forms of `Y`.
    pub fn alt_gap(&self) -> f64 {
        self.alt_gap
    }

    /// Largest difference between pointwise `Y` and its modal form at nodes.
    pub fn modal_gap(&self) -> f64 {
        self.modal_gap
    }

    /// `Y` at an arbitrary polar chart position, from the modal components.
    pub fn y_at(&self, r: f64, phi: f64) -> LorentzVec4 {
        LorentzVec4(std::array::from_fn(|c| self.components[c].eval(r, phi)))
    }

    pub fn hessian_max(&self) -> f64 {
        self.hessian_max
    }

    /// Metric scale `max √(e^{-σ}(|Y_u|² + |Y_v|²))`, Euclidean lengths.
    pub fn metric_scale(&self) -> f64 {
        self.scale
    }

    pub fn degenerate_count(&self) -> usize {
        self.samples.iter().filter(|s| s.degenerate).count()
    }

    pub fn is_fully_degenerate(&self) -> bool {
        self.samples.iter().all(|s| s.degenerate)
    }
}

/// A per-node residual with degenerate nodes skipped.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualField {
    pub values: Vec<Option<f64>>,
    pub max: Option<f64>,
    pub skipped: usize,
}

impl ResidualField {
    fn collect(imm: &Immersion, raw: impl Fn(usize, &ImmersionSample) -> f64) -> Self {
        let scale = imm.scale;
        let values: Vec<Option<f64>> = imm
            .samples
            .iter()
            .enumerate()
            .map(|(n, s)| {
                if s.degenerate || scale == 0.0 {
                    None
                } else {
                    Some(raw(n, s) / scale)
                }
            })
            .collect();
        let skipped = values.iter().filter(|v| v.is_none()).count();
        let max = values.iter().flatten().copied().reduce(f64::max);
        Self {
            values,
            max,
            skipped,
        }
    }
}

/// `trace(dY · dξ)` relative to the sphere metric, normalized by the global
/// metric scale times `|dξ| = √2 e^{σ/2}`.
pub fn mt_residual(imm: &Immersion) -> ResidualField {
    let grid = imm.field.grid().clone();
    ResidualField::collect(imm, |n, s| {
        let ef = conformal_factor(grid.nodes()[n].chart);
        let tr = (s.dy[0].dot(&s.dxi[0]) + s.dy[1].dot(&s.dxi[1])) / ef;
        tr.abs() / 2f64.sqrt()
    })
}

/// `‖Δ̂Y‖` (Euclidean in `R⁴`) normalized by the metric scale.
pub fn mean_curvature_residual(imm: &Immersion) -> ResidualField {
    ResidualField::collect(imm, |_, s| s.lap_y.euclid_norm())
}

/// Induced metric compared with the square of the trace-free Hessian.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    /// `‖g − T e^{-σ} T‖∞ / ‖g‖∞` with `T` the trace-free Hessian.
    pub hessian_gap: f64,
    /// `max |density − ¼(σ₁ − σ₂)²|`.
    pub density_gap: f64,
    pub min_eigenvalue: f64,
    pub degenerate: usize,
}

pub fn induced_metric(imm: &Immersion) -> MetricReport {
    let grid = imm.field.grid();
    let mut gap = 0.0f64;
    let mut gmax = 0.0f64;
    let mut density_gap = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for (s, node) in imm.samples.iter().zip(grid.nodes()) {
        let inv = 1.0 / conformal_factor(node.chart);
        let t = s.hessian.deviator;
        for a in 0..2 {
            for b in 0..2 {
                let tt = inv * (t[a][0] * t[0][b] + t[a][1] * t[1][b]);
                gap = gap.max((s.metric[a][b] - tt).abs());
                gmax = gmax.max(s.metric[a][b].abs());
            }
        }
        density_gap = density_gap.max((s.density - 0.25 * s.hessian.gap_sq()).abs());
        let g = s.metric;
        let mean = 0.5 * (g[0][0] + g[1][1]);
        let rad = (0.25 * (g[0][0] - g[1][1]).powi(2) + g[0][1] * g[1][0]).sqrt();
        min_eig = min_eig.min(mean - rad);
    }
    MetricReport {
        hessian_gap: if gmax > 0.0 { gap / gmax } else { gap },
        density_gap,
        min_eigenvalue: min_eig,
        degenerate: imm.degenerate_count(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalityReport {
    /// `½|σ₁ − σ₂|` on nondegenerate nodes.
    pub lambda: Vec<Option<f64>>,
    /// `max (|g_uu − g_vv| + 2|g_uv|) / (g_uu + g_vv)` over checked nodes.
    pub max_ratio: Option<f64>,
    /// `max |g_uu + g_vv − 2λ² e^σ| / (g_uu + g_vv)`.
    pub max_factor_gap: Option<f64>,
    pub checked: usize,
}

pub fn conformality_check(imm: &Immersion) -> ConformalityReport {
    let grid = imm.field.grid();
    let mut ratio: Option<f64> = None;
    let mut factor: Option<f64> = None;
    let mut checked = 0;
    let lambda = imm
        .samples
        .iter()
        .zip(grid.nodes())
        .map(|(s, node)| {
            if s.degenerate {
                return None;
            }
            checked += 1;
            let g = s.metric;
            let tr = g[0][0] + g[1][1];
            let r = ((g[0][0] - g[1][1]).abs() + 2.0 * g[0][1].abs()) / tr;
            ratio = Some(ratio.map_or(r, |m| m.max(r)));
            let lam = 0.5 * (s.hessian.sigma1 - s.hessian.sigma2).abs();
            let fg = (tr - 2.0 * lam * lam * conformal_factor(node.chart)).abs() / tr;
            factor = Some(factor.map_or(fg, |m| m.max(fg)));
            Some(lam)
        })
        .collect();
    ConformalityReport {
        lambda,
        max_ratio: ratio,
        max_factor_gap: factor,
        checked,
    }
}

/// `max |Y·ξ − f|` and `max |(Δ̂ + 2)f − 2 Y·(0,0,0,1)|`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupportRoundtrip {
    pub support: f64,
    pub height: f64,
}

pub fn support_roundtrip(imm: &Immersion, f: &ScalarField) -> SupportRoundtrip {
    let shifted = crate::sphere::shifted_laplacian(f);
    let e4 = LorentzVec4::new([0.0; 3], 1.0);
    let mut out = SupportRoundtrip {
        support: 0.0,
        height: 0.0,
    };
    for (n, s) in imm.samples.iter().enumerate() {
        out.support = out.support.max((s.y.dot(&s.xi) - f.values()[n]).abs());
        out.height = out
            .height
            .max((shifted.values()[n] - 2.0 * s.y.dot(&e4)).abs());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{CapDomain, Grid};
    use std::sync::Arc;

    fn hemi() -> Arc<Grid> {
        Grid::shared(CapDomain::hemisphere(), 24, 48).unwrap()
    }

    #[test]
    fn constants_and_linear_functions_are_point_maps() {
        let g = hemi();
        let imm = build_immersion(&ScalarField::constant(&g, 1.5));
        assert!(imm.is_fully_degenerate());
        for s in imm.samples() {
            assert!((s.y.0[3] + 1.5).abs() < 1e-14);
            assert!(s.y.spatial().iter().all(|x| x.abs() < 1e-13));
        }
        let a = [0.3, -0.2, 0.9];
        let imm = build_immersion(&ScalarField::linear(&g, a));
        assert!(imm.is_fully_degenerate());
        for s in imm.samples() {
            for i in 0..3 {
                assert!((s.y.0[i] - a[i]).abs() < 1e-12);
            }
            assert!(s.y.0[3].abs() < 1e-12);
        }
        assert!(mt_residual(&imm).max.is_none());
        assert_eq!(conformality_check(&imm).checked, 0);
    }

    #[test]
    fn quadratic_harmonic_surface() {
        let g = hemi();
        let f = ScalarField::nu_poly(&g, |nu| nu[0].mul_nu(1));
        let imm = build_immersion(&f);
        assert!(imm.alt_gap() < 1e-13);
        assert!(imm.modal_gap() < 1e-12);
        assert!(mt_residual(&imm).max.unwrap() < 1e-12);
        // Δ̂(Δ̂ + 2)(ν₁ν₂) = 24 ν₁ν₂ ≠ 0, so H does not vanish.
        assert!(mean_curvature_residual(&imm).max.unwrap() > 1e-2);
        let conf = conformality_check(&imm);
        assert!(conf.max_ratio.unwrap() < 1e-8);
        assert!(conf.max_factor_gap.unwrap() < 1e-8);
        let rt = support_roundtrip(&imm, &f);
        assert!(rt.support < 1e-12 && rt.height < 1e-12);
        let m = induced_metric(&imm);
        assert!(m.hessian_gap < 1e-10 && m.density_gap < 1e-10);
        assert!(m.min_eigenvalue > -1e-12);
        assert!(imm.y_at(0.0, 0.0).euclid_norm() < 1e-14);
    }
}
