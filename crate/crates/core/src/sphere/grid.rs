//! Polar tensor grids on the stereographic image of a geodesic cap.
//!
//! The cap of geodesic radius `θ₀` about the north pole is the chart disk
//! `r < R = tan(θ₀/2)`. Radial nodes are Gauss–Legendre nodes in
//! `z = cos θ` on `[cos θ₀, 1]`, so none sits on the pole, and the bulk rule
//! integrates spherical polynomials exactly. Derivatives are taken from the
//! modal fit in [`super::modal`].

use super::chart::{conformal_factor, stereo_to_sphere, tangent_frame, ChartPoint, SpherePoint};
use super::modal::{cheb_eval, Modal};
use super::quadrature::gauss_legendre_on;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Geodesic cap about the north pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapDomain {
    theta0: f64,
}

impl CapDomain {
    pub fn new(theta0: f64) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 < PI) {
            return Err(Error::InvalidDomain(theta0));
        }
        Ok(Self { theta0 })
    }

    pub fn hemisphere() -> Self {
        Self { theta0: PI / 2.0 }
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Radius of the chart disk, `tan(θ₀/2)`.
    pub fn stereo_radius(&self) -> f64 {
        (0.5 * self.theta0).tan()
    }

    pub fn area(&self) -> f64 {
        2.0 * PI * (1.0 - self.theta0.cos())
    }

    pub fn boundary_length(&self) -> f64 {
        2.0 * PI * self.theta0.sin()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Node {
    pub chart: ChartPoint,
    pub sphere: SpherePoint,
    pub r: f64,
    pub phi: f64,
    /// Quadrature weight for `dω`.
    pub weight: f64,
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryNode {
    pub chart: ChartPoint,
    pub sphere: SpherePoint,
    pub phi: f64,
    /// Arclength weight for `ds`.
    pub weight: f64,
    /// Outward unit normal (sphere metric), embedded in R³.
    pub normal: [f64; 3],
}

/// Polar derivatives of a field at one point: `f, f_r, f_φ, f_rr, f_rφ, f_φφ`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Partials {
    pub f: f64,
    pub fr: f64,
    pub ft: f64,
    pub frr: f64,
    pub frt: f64,
    pub ftt: f64,
}

/// Cartesian chart derivatives `f, f_u, f_v, f_uu, f_uv, f_vv`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChartDerivs {
    pub f: f64,
    pub fu: f64,
    pub fv: f64,
    pub fuu: f64,
    pub fuv: f64,
    pub fvv: f64,
}

impl Partials {
    pub fn to_chart(&self, r: f64, phi: f64) -> ChartDerivs {
        let (s, c) = phi.sin_cos();
        let (ir, ir2) = (1.0 / r, 1.0 / (r * r));
        let radial = self.fr * ir + self.ftt * ir2;
        let mixed = self.frt * ir - self.ft * ir2;
        ChartDerivs {
            f: self.f,
            fu: c * self.fr - s * self.ft * ir,
            fv: s * self.fr + c * self.ft * ir,
            fuu: c * c * self.frr + s * s * radial - 2.0 * c * s * mixed,
            fvv: s * s * self.frr + c * c * radial + 2.0 * c * s * mixed,
            fuv: c * s * (self.frr - radial) + (c * c - s * s) * mixed,
        }
    }
}

/// Chart points on `nr` Gauss rings in `z` times `ntheta` equispaced angles.
pub fn gauss_points(domain: CapDomain, nr: usize, ntheta: usize) -> Vec<ChartPoint> {
    let (zs, _) = gauss_legendre_on(domain.theta0().cos(), 1.0, nr);
    let mut out = Vec::with_capacity(nr * ntheta);
    for z in zs {
        let r = ((1.0 - z) / (1.0 + z)).sqrt();
        for k in 0..ntheta {
            out.push(ChartPoint::polar(r, 2.0 * PI * k as f64 / ntheta as f64));
        }
    }
    out
}

#[derive(Debug)]
pub struct Grid {
    domain: CapDomain,
    nr: usize,
    ntheta: usize,
    radius: f64,
    radii: Vec<f64>,
    phis: Vec<f64>,
    nodes: Vec<Node>,
    boundary: Vec<BoundaryNode>,
    // Per angular mode: the design matrix S_j^m T_k(x_j) and its thin QR
    // factors; empty where the mode is not representable.
    fits: Vec<ModeFit>,
}

#[derive(Debug)]
struct ModeFit {
    design: DMatrix<f64>,
    qt: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl ModeFit {
    /// Least-squares coefficients using the fewest leading basis functions
    /// that reproduce `b` to within `tol`. Stopping at the rounding level
    /// keeps noise out of high-degree coefficients, where repeated
    /// differentiation would amplify it.
    fn solve(&self, b: &DVector<f64>, tol: f64) -> Vec<f64> {
        let kmax = self.design.ncols();
        let y = &self.qt * b;
        let mut best = Vec::new();
        for k in 1..=kmax {
            let rk = self.r.view((0, 0), (k, k));
            let yk = y.rows(0, k).into_owned();
            let c = rk
                .solve_upper_triangular(&yk)
                .expect("full-rank design matrix");
            let resid = (b - self.design.columns(0, k) * &c).amax();
            best = c.as_slice().to_vec();
            if resid <= tol {
                break;
            }
        }
        best
    }
}

/// Relative amplitude below which a fitted angular mode is treated as noise.
const MODE_FLOOR: f64 = 1e-14;
/// Target nodal residual of the per-mode fit, relative to the field maximum.
const FIT_TOL: f64 = 1e-14;

impl Grid {
    pub fn new(domain: CapDomain, nr: usize, ntheta: usize) -> Result<Self> {
        if nr < 4 || ntheta < 8 || ntheta % 2 != 0 {
            return Err(Error::Resolution { nr, ntheta });
        }
        let radius = domain.stereo_radius();
        let z0 = domain.theta0().cos();
        // Gauss nodes in z = cos θ make the bulk rule exact for polynomials
        // in z; ordered so that r increases with j.
        let (zs, wz) = gauss_legendre_on(z0, 1.0, nr);
        let mut order: Vec<usize> = (0..nr).collect();
        order.sort_by(|&a, &b| zs[b].total_cmp(&zs[a]));
        let zs: Vec<f64> = order.iter().map(|&i| zs[i]).collect();
        let wz: Vec<f64> = order.iter().map(|&i| wz[i]).collect();
        let radii: Vec<f64> = zs.iter().map(|z| ((1.0 - z) / (1.0 + z)).sqrt()).collect();

        let dphi = 2.0 * PI / ntheta as f64;
        let phis: Vec<f64> = (0..ntheta).map(|k| k as f64 * dphi).collect();

        let mut nodes = Vec::with_capacity(nr * ntheta);
        for (j, &r) in radii.iter().enumerate() {
            for &phi in &phis {
                let chart = ChartPoint::polar(r, phi);
                nodes.push(Node {
                    chart,
                    sphere: stereo_to_sphere(chart),
                    r,
                    phi,
                    weight: wz[j] * dphi,
                    boundary: false,
                });
            }
        }

        let edge_chart = ChartPoint::new(radius, 0.0);
        let half_factor = conformal_factor(edge_chart).sqrt();
        let boundary = phis
            .iter()
            .map(|&phi| {
                let chart = ChartPoint::polar(radius, phi);
                let [tu, tv] = tangent_frame(chart);
                let (s, c) = phi.sin_cos();
                let normal = [
                    (c * tu[0] + s * tv[0]) / half_factor,
                    (c * tu[1] + s * tv[1]) / half_factor,
                    (c * tu[2] + s * tv[2]) / half_factor,
                ];
                BoundaryNode {
                    chart,
                    sphere: stereo_to_sphere(chart),
                    phi,
                    weight: radius * dphi * half_factor,
                    normal,
                }
            })
            .collect();

        let probe = Modal::zeros(z0);
        let xs: Vec<f64> = zs.iter().map(|&z| probe.to_x(z)).collect();
        let sines: Vec<f64> = zs.iter().map(|z| (1.0 - z * z).max(0.0).sqrt()).collect();
        let fits = (0..=ntheta / 2)
            .map(|m| {
                let k = nr.saturating_sub(m);
                let design = DMatrix::from_fn(nr, k, |j, i| {
                    let mut t = vec![0.0; i + 1];
                    t[i] = 1.0;
                    sines[j].powi(m as i32) * cheb_eval(&t, xs[j])
                });
                let qr = design.clone().qr();
                ModeFit {
                    qt: qr.q().transpose(),
                    r: qr.r(),
                    design,
                }
            })
            .collect();

        Ok(Self {
            domain,
            nr,
            ntheta,
            radius,
            radii,
            phis,
            nodes,
            boundary,
            fits,
        })
    }

    pub fn shared(domain: CapDomain, nr: usize, ntheta: usize) -> Result<Arc<Self>> {
        Self::new(domain, nr, ntheta).map(Arc::new)
    }

    pub fn domain(&self) -> CapDomain {
        self.domain
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn boundary(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.ntheta + k
    }

    /// Fit the modal representation to nodal samples: a DFT along each
    /// ring followed by a per-mode least-squares fit in `z`.
    pub fn fit(&self, values: &[f64]) -> Modal {
        assert_eq!(values.len(), self.len());
        let (nr, nt) = (self.nr, self.ntheta);
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut modal = Modal::zeros(self.domain.theta0().cos());
        if scale == 0.0 {
            return modal;
        }
        let nyquist = nt / 2;
        let tol = FIT_TOL * scale;
        for (m, fit) in self.fits.iter().enumerate() {
            if fit.design.ncols() == 0 {
                continue;
            }
            let mut ca = DVector::zeros(nr);
            let mut sa = DVector::zeros(nr);
            for j in 0..nr {
                let ring = &values[j * nt..(j + 1) * nt];
                let (mut c, mut s) = (0.0, 0.0);
                for (k, v) in ring.iter().enumerate() {
                    let arg = (m * k % nt) as f64 * 2.0 * PI / nt as f64;
                    c += v * arg.cos();
                    s += v * arg.sin();
                }
                let norm = if m == 0 || m == nyquist { 1.0 } else { 2.0 } / nt as f64;
                ca[j] = c * norm;
                sa[j] = if m == 0 || m == nyquist {
                    0.0
                } else {
                    s * norm
                };
            }
            let amp = ca.amax().max(sa.amax());
            if amp <= MODE_FLOOR * scale {
                continue;
            }
            let cc = fit.solve(&ca, tol);
            let sc = if m == 0 {
                Vec::new()
            } else {
                fit.solve(&sa, tol)
            };
            modal.set_mode(m, cc, sc);
        }
        modal
    }

    /// Nodal values of a modal field.
    pub fn evaluate(&self, modal: &Modal) -> Vec<f64> {
        self.partials_of(modal).into_iter().map(|p| p.f).collect()
    }

    /// Polar partials of a modal field at every interior node.
    pub fn partials_of(&self, modal: &Modal) -> Vec<Partials> {
        modal.partials_on(&self.radii, &self.phis)
    }

    /// Polar partials of a modal field on the boundary circle `r = R`.
    pub fn boundary_partials_of(&self, modal: &Modal) -> Vec<Partials> {
        modal.partials_on(&[self.radius], &self.phis)
    }

    /// Cartesian chart derivatives of a modal field at every interior node.
    pub fn chart_derivs_of(&self, modal: &Modal) -> Vec<ChartDerivs> {
        self.partials_of(modal)
            .iter()
            .zip(&self.nodes)
            .map(|(p, n)| p.to_chart(n.r, n.phi))
            .collect()
    }

    /// Polar partials of nodal `values` at every interior node.
    pub fn partials(&self, values: &[f64]) -> Vec<Partials> {
        self.partials_of(&self.fit(values))
    }

    pub fn boundary_partials(&self, values: &[f64]) -> Vec<Partials> {
        self.boundary_partials_of(&self.fit(values))
    }

    pub fn chart_derivs(&self, values: &[f64]) -> Vec<ChartDerivs> {
        self.chart_derivs_of(&self.fit(values))
    }

    pub fn sum_bulk_weights(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn sum_boundary_weights(&self) -> f64 {
        self.boundary.iter().map(|b| b.weight).sum()
    }
}
