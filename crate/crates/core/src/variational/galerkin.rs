//! Discrete clamped space and the Euler–Lagrange solve.
//!
//! Each angular mode `m` carries the radial basis `S^m (z − z0)² T_k(x)`,
//! whose value and normal derivative vanish on `z = z0`. The bilinear forms
//! are rotation invariant, so they decouple by mode and by cos/sin parity,
//! and every radial integral is a polynomial integrated exactly by Gauss
//! quadrature in `z`.

use crate::error::{Error, Result};
use crate::oracle::ExactSolution;
use crate::sphere::modal::cheb_eval;
use crate::sphere::quadrature::gauss_legendre_on;
use crate::sphere::{boundary_trace, integrate_bulk, shifted_laplacian, Grid, Modal, ScalarField};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Condition number above which a clamped system is reported as singular.
pub const MAX_CONDITION: f64 = 1e14;
/// Radial bases are cut back until the scaled stiffness matrix has at most
/// this condition number; at high `m` the `S^m` weight makes trailing
/// Chebyshev functions numerically dependent.
const BASIS_CONDITION: f64 = 1e12;
/// Boundary Fourier amplitudes below this fraction of the data scale are
/// treated as absent.
const DATA_FLOOR: f64 = 1e-14;

/// Value and outward normal-derivative traces on the grid's boundary nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClampedBoundaryData {
    pub g0: Vec<f64>,
    pub g1: Vec<f64>,
}

impl ClampedBoundaryData {
    pub fn new(grid: &Grid, g0: Vec<f64>, g1: Vec<f64>) -> Result<Self> {
        let n = grid.boundary().len();
        if g0.len() != n || g1.len() != n {
            return Err(Error::GridMismatch);
        }
        if g0.iter().chain(&g1).any(|v| !v.is_finite()) {
            return Err(Error::Config("boundary data must be finite".into()));
        }
        Ok(Self { g0, g1 })
    }

    pub fn from_field(f: &ScalarField) -> Self {
        let t = boundary_trace(f);
        Self {
            g0: t.value,
            g1: t.normal,
        }
    }

    pub fn from_exact(sol: &ExactSolution, grid: &Grid) -> Self {
        let (g0, g1) = sol.boundary_traces(grid);
        Self { g0, g1 }
    }

    fn scale(&self) -> f64 {
        self.g0
            .iter()
            .chain(&self.g1)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// `Δ̂` restricted to one angular mode, on Chebyshev coefficients.
fn mode_laplacian(z0: f64, m: usize, c: &[f64]) -> Vec<f64> {
    let mut modal = Modal::zeros(z0);
    modal.set_mode(m, c.to_vec(), Vec::new());
    modal
        .hat_laplacian()
        .modes()
        .get(m)
        .map(|md| md.cos.clone())
        .unwrap_or_default()
}

#[derive(Debug, Clone)]
struct ModeBlock {
    m: usize,
    /// Chebyshev coefficients of the radial factors `g_k`.
    basis: Vec<Vec<f64>>,
    /// `S^m L_m[g_k]` and `S^m g_k` at the quadrature nodes, scaled by
    /// `√w_q`.
    lap_vals: DMatrix<f64>,
    /// `∫ Δ̂φ_k Δ̂φ_l dω`.
    a: DMatrix<f64>,
    /// `∫ Dφ_k · Dφ_l dω`.
    b: DMatrix<f64>,
}

impl ModeBlock {
    fn truncated(self, k: usize) -> Self {
        if k == self.basis.len() {
            return self;
        }
        Self {
            m: self.m,
            basis: self.basis[..k].to_vec(),
            lap_vals: self.lap_vals.columns(0, k).into_owned(),
            a: self.a.view((0, 0), (k, k)).into_owned(),
            b: self.b.view((0, 0), (k, k)).into_owned(),
        }
    }
}

/// Per-mode solution of the smallest generalized eigenpair.
#[derive(Debug, Clone)]
pub struct ModeEigen {
    pub m: usize,
    pub beta: f64,
    pub coeffs: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ClampedSpace {
    grid: Arc<Grid>,
    z0: f64,
    zs: Vec<f64>,
    ws: Vec<f64>,
    xs: Vec<f64>,
    sines: Vec<f64>,
    blocks: Vec<ModeBlock>,
}

/// `∫ cos² mφ dφ` (equal to the sine integral for `m > 0`).
fn angular_norm(m: usize) -> f64 {
    if m == 0 {
        2.0 * PI
    } else {
        PI
    }
}

impl ClampedSpace {
    /// Modes `m ≤ min(Nθ/2 − 1, Nr − 3)` with `Nr − m − 2` radial functions
    /// each, mirroring the triangular truncation of the grid fit, cut back
    /// where the basis loses numerical independence.
    pub fn new(grid: &Arc<Grid>) -> Self {
        let (nr, nt) = (grid.nr(), grid.ntheta());
        let z0 = grid.domain().theta0().cos();
        let probe = Modal::zeros(z0);
        let (zs, ws) = gauss_legendre_on(z0, 1.0, 2 * nr + nt / 2 + 4);
        let xs: Vec<f64> = zs.iter().map(|&z| probe.to_x(z)).collect();
        let sines: Vec<f64> = zs.iter().map(|z| (1.0 - z * z).max(0.0).sqrt()).collect();
        let mut space = Self {
            grid: grid.clone(),
            z0,
            zs,
            ws,
            xs,
            sines,
            blocks: Vec::new(),
        };
        let max_mode = (nt / 2 - 1).min(nr - 3);
        for m in 0..=max_mode {
            let mut k = nr - m - 2;
            let block = space.assemble(m, k);
            while k > 1
                && !(Self::condition(&Self::jacobi(&block.a.view((0, 0), (k, k)).into_owned()).0)
                    < BASIS_CONDITION)
            {
                k -= 1;
            }
            space.blocks.push(block.truncated(k));
        }
        space
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn max_mode(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Number of real basis functions (cos and sin blocks counted apart).
    pub fn dim(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| if b.m == 0 { 1 } else { 2 } * b.basis.len())
            .sum()
    }

    /// `S^m · cheb(c)` at each quadrature node, times `√w`.
    fn sample(&self, m: usize, c: &[f64]) -> DVector<f64> {
        DVector::from_fn(self.zs.len(), |q, _| {
            self.ws[q].sqrt() * self.sines[q].powi(m as i32) * cheb_eval(c, self.xs[q])
        })
    }

    fn assemble(&self, m: usize, k: usize) -> ModeBlock {
        // (z − z0)² = half²(1 + x)²; the constant is dropped, (1 + x)²/4
        // keeps the basis of unit size.
        let basis: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut t = vec![0.0; i + 1];
                t[i] = 1.0;
                let mut c = t.clone();
                for _ in 0..2 {
                    let xc = crate::sphere::modal::cheb_mul_x(&c);
                    let mut next = c.clone();
                    next.resize(xc.len(), 0.0);
                    for (n, v) in next.iter_mut().zip(&xc) {
                        *n += v;
                    }
                    c = next;
                }
                c.iter().map(|v| 0.25 * v).collect()
            })
            .collect();
        let nq = self.zs.len();
        let mut vals = DMatrix::zeros(nq, k);
        let mut lap_vals = DMatrix::zeros(nq, k);
        for (i, g) in basis.iter().enumerate() {
            vals.set_column(i, &self.sample(m, g));
            lap_vals.set_column(i, &self.sample(m, &mode_laplacian(self.z0, m, g)));
        }
        let norm = angular_norm(m);
        let a = lap_vals.transpose() * &lap_vals * norm;
        let b_raw = -(vals.transpose() * &lap_vals) * norm;
        let b = (&b_raw + b_raw.transpose()) * 0.5;
        ModeBlock {
            m,
            basis,
            lap_vals,
            a,
            b,
        }
    }

    /// Radial Chebyshev profile `Σ c_k g_k` of mode `m`.
    fn profile(&self, m: usize, coeffs: &[f64]) -> Vec<f64> {
        let block = &self.blocks[m];
        let mut out = vec![0.0; block.basis.last().map_or(0, Vec::len)];
        for (c, g) in coeffs.iter().zip(&block.basis) {
            for (o, v) in out.iter_mut().zip(g) {
                *o += c * v;
            }
        }
        out
    }

    /// Field of a combination of mode-`m` basis functions.
    pub fn field(&self, m: usize, cos: &[f64], sin: &[f64]) -> ScalarField {
        let mut modal = Modal::zeros(self.z0);
        modal.set_mode(m, self.profile(m, cos), self.profile(m, sin));
        ScalarField::from_modal(&self.grid, modal)
    }

    /// Radial basis size kept in mode `m`.
    pub fn mode_dim(&self, m: usize) -> usize {
        self.blocks[m].basis.len()
    }

    pub fn stiffness(&self, m: usize) -> &DMatrix<f64> {
        &self.blocks[m].a
    }

    pub fn mass(&self, m: usize) -> &DMatrix<f64> {
        &self.blocks[m].b
    }

    /// Symmetric Jacobi scaling `D M D` with `D = diag(M)^{-1/2}`.
    fn jacobi(mat: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let d = DVector::from_fn(mat.nrows(), |i, _| 1.0 / mat[(i, i)].abs().sqrt());
        let scaled = DMatrix::from_fn(mat.nrows(), mat.ncols(), |i, j| d[i] * mat[(i, j)] * d[j]);
        (scaled, d)
    }

    /// Condition number of the Jacobi-scaled symmetric matrix, infinite
    /// when it is not positive definite.
    fn condition(scaled: &DMatrix<f64>) -> f64 {
        let eig = SymmetricEigen::new(scaled.clone()).eigenvalues;
        let lo = eig.min();
        let hi = eig.max();
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// `∫ Δ̂φ_k (Δ̂+2)q dω` for the mode-`m` basis against one parity of
    /// the radial profile `h` of `(Δ̂+2)q`.
    fn load(&self, m: usize, h: &[f64]) -> DVector<f64> {
        let block = &self.blocks[m];
        block.lap_vals.transpose() * self.sample(m, h) * angular_norm(m)
    }

    /// Galerkin residual of `Δ̂(Δ̂+2)q` against the clamped test space,
    /// each entry normalised by `‖Δ̂φ_k‖ ‖(Δ̂+2)q‖` so the result lies in
    /// `[0, 1]`.
    pub fn weak_el_residual(&self, q: &ScalarField) -> Result<f64> {
        let g = q.grid();
        if g.domain() != self.grid.domain()
            || g.nr() != self.grid.nr()
            || g.ntheta() != self.grid.ntheta()
        {
            return Err(Error::GridMismatch);
        }
        let shifted = shifted_laplacian(q);
        let norm = integrate_bulk(&shifted.zip_with(&shifted, |a, b| a * b)?)
            .max(0.0)
            .sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let mut worst = 0.0f64;
        for block in &self.blocks {
            let Some(md) = shifted.modal().modes().get(block.m) else {
                continue;
            };
            for h in [&md.cos, &md.sin] {
                if h.is_empty() {
                    continue;
                }
                let r = self.load(block.m, h);
                for (k, v) in r.iter().enumerate() {
                    worst = worst.max(v.abs() / (block.a[(k, k)].sqrt() * norm));
                }
            }
        }
        Ok(worst)
    }

    /// Solve `Δ̂(Δ̂+2)q = 0` with clamped data: a radial lift per mode plus
    /// the Galerkin correction in the clamped space.
    pub fn solve_el(&self, bc: &ClampedBoundaryData) -> Result<ElSolution> {
        let grid = &self.grid;
        if bc.g0.len() != grid.boundary().len() || bc.g1.len() != grid.boundary().len() {
            return Err(Error::GridMismatch);
        }
        let nt = grid.ntheta();
        let s0 = grid.domain().theta0().sin();
        let half = 0.5 * (1.0 - self.z0);
        let scale = bc.scale();
        let mut modal = Modal::zeros(self.z0);
        let mut condition = 1.0f64;
        if scale == 0.0 {
            return Ok(ElSolution {
                field: ScalarField::from_modal(grid, modal),
                condition,
            });
        }
        for m in 0..nt / 2 {
            let (a0, b0) = fourier_pair(&bc.g0, m);
            let (a1, b1) = fourier_pair(&bc.g1, m);
            if [a0, b0, a1, b1]
                .iter()
                .all(|v| v.abs() <= DATA_FLOOR * scale)
            {
                continue;
            }
            // f = S^m (α + β(z − z0)): f = S0^m α and
            // ∂_n f = ∂_θ f = S0^{m−1}(m z0 α − S0² β) at the boundary.
            let lift = |val: f64, dn: f64| -> Vec<f64> {
                let sm = s0.powi(m as i32);
                let alpha = val / sm;
                let beta = (m as f64 * self.z0 * alpha - dn * s0 / sm) / (s0 * s0);
                vec![alpha + beta * half, beta * half]
            };
            let mut profiles = [lift(a0, a1), lift(b0, b1)];
            if let Some(block) = self.blocks.get(m) {
                let mat = &block.a - &block.b * 2.0;
                let (scaled, d) = Self::jacobi(&mat);
                let cond = Self::condition(&scaled);
                condition = condition.max(cond);
                if !(cond < MAX_CONDITION) {
                    return Err(Error::SolverFailure {
                        mode: m,
                        condition: cond,
                    });
                }
                let chol = scaled.cholesky().ok_or(Error::SolverFailure {
                    mode: m,
                    condition: cond,
                })?;
                for profile in profiles.iter_mut().take(if m == 0 { 1 } else { 2 }) {
                    let mut shifted = mode_laplacian(self.z0, m, profile);
                    for (s, p) in shifted.iter_mut().zip(profile.iter()) {
                        *s += 2.0 * p;
                    }
                    let rhs = -self.load(m, &shifted);
                    let y = chol.solve(&rhs.component_mul(&d));
                    let c = y.component_mul(&d);
                    let corr = self.profile(m, c.as_slice());
                    if profile.len() < corr.len() {
                        profile.resize(corr.len(), 0.0);
                    }
                    for (p, v) in profile.iter_mut().zip(&corr) {
                        *p += v;
                    }
                }
            }
            let [cos, sin] = profiles;
            modal.set_mode(m, cos, sin);
        }
        Ok(ElSolution {
            field: ScalarField::from_modal(grid, modal),
            condition,
        })
    }

    /// Smallest generalized eigenpair of `A c = β B c` in mode `m` by
    /// inverse iteration; stops when successive Rayleigh quotients agree
    /// to `1e-10` relative.
    pub fn mode_eigen(&self, m: usize) -> Result<ModeEigen> {
        const MAX_ITER: usize = 2000;
        let block = &self.blocks[m];
        let (a, d) = Self::jacobi(&block.a);
        let b = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| d[i] * block.b[(i, j)] * d[j]);
        let chol = a.clone().cholesky().ok_or(Error::SolverFailure {
            mode: m,
            condition: Self::condition(&a),
        })?;
        let mut x = DVector::from_element(a.nrows(), 1.0);
        let mut rho = f64::INFINITY;
        for it in 1..=MAX_ITER {
            let y = chol.solve(&(&b * &x));
            let by = (&b * &y).dot(&y);
            let next = (&a * &y).dot(&y) / by;
            x = y / by.sqrt();
            if (next - rho).abs() < 1e-10 * next.abs() {
                return Ok(self.normalised(m, next, x.component_mul(&d), it));
            }
            rho = next;
        }
        Err(Error::EigenNoConvergence {
            mode: m,
            iterations: MAX_ITER,
        })
    }

    /// Scale to `cᵀBc = 1` with the first nonzero coefficient positive.
    fn normalised(&self, m: usize, beta: f64, c: DVector<f64>, iterations: usize) -> ModeEigen {
        let b = &self.blocks[m].b;
        let norm = (&(b * &c)).dot(&c).sqrt();
        let mut c = c / norm;
        let big = c.amax();
        if let Some(first) = c.iter().find(|v| v.abs() > 1e-12 * big) {
            if *first < 0.0 {
                c = -c;
            }
        }
        ModeEigen {
            m,
            beta,
            coeffs: c.as_slice().to_vec(),
            iterations,
        }
    }
}

/// Fourier coefficients `(a_m, b_m)` of equispaced samples with the same
/// normalisation as the grid fit.
fn fourier_pair(samples: &[f64], m: usize) -> (f64, f64) {
    let nt = samples.len();
    let (mut c, mut s) = (0.0, 0.0);
    for (k, v) in samples.iter().enumerate() {
        let arg = (m * k % nt) as f64 * 2.0 * PI / nt as f64;
        c += v * arg.cos();
        s += v * arg.sin();
    }
    let norm = if m == 0 { 1.0 } else { 2.0 } / nt as f64;
    (c * norm, if m == 0 { 0.0 } else { s * norm })
}

#[derive(Debug, Clone)]
pub struct ElSolution {
    pub field: ScalarField,
    /// Largest Jacobi-scaled condition number over the solved modes.
    pub condition: f64,
}

/// Clamped solve of `Δ̂(Δ̂+2)q = 0` on `grid` with boundary data `bc`.
pub fn solve_el_clamped(grid: &Arc<Grid>, bc: &ClampedBoundaryData) -> Result<ElSolution> {
    ClampedSpace::new(grid).solve_el(bc)
}
