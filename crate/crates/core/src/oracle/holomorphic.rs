//! Exact solutions of `Δ̂(Δ̂ + 2)Q = 0` generated by holomorphic polynomials
//! through `Q = −½ σ_w f = w̄ f(w) / (1 + |w|²)`.

use super::rational::Rational;
use crate::error::{Error, Result};
use crate::sphere::{gauss_points, CapDomain, ChartDerivs, ChartPoint, Grid, ScalarField};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// `f(w) = Σ c_k w^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicPoly {
    coeffs: Vec<Complex64>,
}

impl HolomorphicPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config(
                "holomorphic polynomial needs a coefficient".into(),
            ));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::Config("non-finite holomorphic coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    /// `w^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    /// Random coefficients with real and imaginary parts in `[-1, 1]`.
    pub fn random(degree: usize, rng: &mut impl Rng) -> Self {
        let coeffs = (0..=degree)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self {
                coeffs: vec![Complex64::new(0.0, 0.0)],
            };
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        }
    }

    fn as_rational(&self) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (k, &c)| {
                acc.add(&Rational::monomial(c, k as u32, 0, 0))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

impl Part {
    pub fn take(self, z: Complex64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }
}

const MAX_ORDER: usize = 4;

/// Largest pointwise residuals of the identities checked on construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `|Δ̂Q − (f_w + σ_w f)|`.
    pub laplacian: f64,
    /// `|(Δ̂ + 2)(f_w + σ_w f)|`.
    pub shifted: f64,
    /// `|Δ̂(Δ̂ + 2)Q|` from the closed-form chart partials.
    pub el: f64,
}

/// `Re Q` or `Im Q` with closed-form derivatives.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    poly: HolomorphicPoly,
    part: Part,
    domain: CapDomain,
    // ∂_w^a ∂_w̄^b Q for a + b ≤ 4, indexed [a][b].
    table: Vec<Vec<Rational>>,
    g: Rational,
    residuals: IdentityResiduals,
}

/// Tolerance for the construction-time identity checks.
pub const IDENTITY_TOL: f64 = 1e-9;

pub fn q_from_holomorphic(
    poly: &HolomorphicPoly,
    part: Part,
    domain: CapDomain,
) -> Result<ExactSolution> {
    ExactSolution::new(poly.clone(), part, domain)
}

impl ExactSolution {
    pub fn new(poly: HolomorphicPoly, part: Part, domain: CapDomain) -> Result<Self> {
        let q = poly
            .coeffs
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (k, &c)| {
                acc.add(&Rational::monomial(c, k as u32, 1, 1))
            });
        let mut table: Vec<Vec<Rational>> = Vec::with_capacity(MAX_ORDER + 1);
        for a in 0..=MAX_ORDER {
            let base = if a == 0 {
                q.clone()
            } else {
                table[a - 1][0].d_w()
            };
            let mut row = vec![base];
            for b in 1..=(MAX_ORDER - a) {
                let next = row[b - 1].d_wbar();
                row.push(next);
            }
            table.push(row);
        }
        // f_w + σ_w f = f' − 2 w̄ f / (1 + w w̄)
        let g = poly
            .derivative()
            .as_rational()
            .add(&q.scale(Complex64::new(-2.0, 0.0)));
        let mut out = Self {
            poly,
            part,
            domain,
            table,
            g,
            residuals: IdentityResiduals::default(),
        };
        out.residuals = out.check_identities();
        let worst = out
            .residuals
            .laplacian
            .max(out.residuals.shifted)
            .max(out.residuals.el);
        if worst > IDENTITY_TOL * out.scale() {
            return Err(Error::NotElSolution {
                residual: worst,
                tolerance: IDENTITY_TOL,
            });
        }
        Ok(out)
    }

    fn q(&self) -> &Rational {
        &self.table[0][0]
    }

    pub fn poly(&self) -> &HolomorphicPoly {
        &self.poly
    }

    pub fn part(&self) -> Part {
        self.part
    }

    pub fn domain(&self) -> CapDomain {
        self.domain
    }

    pub fn residuals(&self) -> IdentityResiduals {
        self.residuals
    }

    /// Size of the solution's derivatives on the cap, for relative checks.
    fn scale(&self) -> f64 {
        let r = self.domain.stereo_radius();
        let c: f64 = self.poly.coeffs.iter().map(|c| c.norm()).sum();
        c * (1.0 + r).powi(self.poly.degree() as i32 + 4)
    }

    fn check_identities(&self) -> IdentityResiduals {
        let lap_q = self.q().hat_laplacian();
        let shifted_g = self
            .g
            .hat_laplacian()
            .add(&self.g.scale(Complex64::new(2.0, 0.0)));
        let mut res = IdentityResiduals::default();
        for p in gauss_points(self.domain, 8, 16) {
            let w = p.w();
            res.laplacian = res.laplacian.max((lap_q.eval(w) - self.g.eval(w)).norm());
            res.shifted = res.shifted.max(shifted_g.eval(w).norm());
            res.el = res.el.max(self.el_from_partials(p).abs());
        }
        res
    }

    /// `∂_u^i ∂_v^j` of the complex `Q`, from `∂_u = ∂_w + ∂_w̄`,
    /// `∂_v = i(∂_w − ∂_w̄)`.
    fn complex_partial(&self, p: ChartPoint, i: usize, j: usize) -> Complex64 {
        assert!(i + j <= MAX_ORDER, "derivative order above {MAX_ORDER}");
        // Coefficients of W^a B^b in (W + B)^i (iW − iB)^j.
        let mut poly = vec![vec![Complex64::new(0.0, 0.0); i + j + 1]; i + j + 1];
        poly[0][0] = Complex64::new(1.0, 0.0);
        let step = |poly: &Vec<Vec<Complex64>>, cw: Complex64, cb: Complex64| {
            let mut next = vec![vec![Complex64::new(0.0, 0.0); i + j + 1]; i + j + 1];
            for a in 0..=i + j {
                for b in 0..=i + j - a {
                    let c = poly[a][b];
                    if c.norm() == 0.0 {
                        continue;
                    }
                    next[a + 1][b] += c * cw;
                    next[a][b + 1] += c * cb;
                }
            }
            next
        };
        let one = Complex64::new(1.0, 0.0);
        let im = Complex64::new(0.0, 1.0);
        for _ in 0..i {
            poly = step(&poly, one, one);
        }
        for _ in 0..j {
            poly = step(&poly, im, -im);
        }
        let w = p.w();
        let mut total = Complex64::new(0.0, 0.0);
        for (a, row) in poly.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if c.norm() != 0.0 {
                    total += c * self.table[a][b].eval(w);
                }
            }
        }
        total
    }

    /// `∂_u^i ∂_v^j` of the chosen real part, `i + j ≤ 4`.
    pub fn partial(&self, p: ChartPoint, i: usize, j: usize) -> f64 {
        self.part.take(self.complex_partial(p, i, j))
    }

    pub fn value(&self, p: ChartPoint) -> f64 {
        self.part.take(self.q().eval(p.w()))
    }

    pub fn chart_derivs(&self, p: ChartPoint) -> ChartDerivs {
        ChartDerivs {
            f: self.partial(p, 0, 0),
            fu: self.partial(p, 1, 0),
            fv: self.partial(p, 0, 1),
            fuu: self.partial(p, 2, 0),
            fuv: self.partial(p, 1, 1),
            fvv: self.partial(p, 0, 2),
        }
    }

    /// `Δ̂Q` in closed form.
    pub fn hat_laplacian(&self, p: ChartPoint) -> f64 {
        let h = 0.25 * (1.0 + p.r2).powi(2);
        h * (self.partial(p, 2, 0) + self.partial(p, 0, 2))
    }

    /// `Δ̂(Δ̂ + 2)Q` from chart partials up to order four, with
    /// `Δ̂ = h Δ`, `h = (1 + r²)²/4`.
    pub fn el_from_partials(&self, p: ChartPoint) -> f64 {
        let h = 0.25 * (1.0 + p.r2).powi(2);
        let hu = (1.0 + p.r2) * p.u;
        let hv = (1.0 + p.r2) * p.v;
        let lap_h = 2.0 + 4.0 * p.r2;
        let l = self.partial(p, 2, 0) + self.partial(p, 0, 2);
        let lu = self.partial(p, 3, 0) + self.partial(p, 1, 2);
        let lv = self.partial(p, 2, 1) + self.partial(p, 0, 3);
        let ll = self.partial(p, 4, 0) + 2.0 * self.partial(p, 2, 2) + self.partial(p, 0, 4);
        h * (h * ll + 2.0 * (hu * lu + hv * lv) + l * lap_h) + 2.0 * h * l
    }

    /// Outward normal derivative `e^{-σ/2} ∂_r` at a chart point.
    pub fn normal_derivative(&self, p: ChartPoint) -> f64 {
        let r = p.r2.sqrt();
        let (c, s) = if r > 0.0 {
            (p.u / r, p.v / r)
        } else {
            (1.0, 0.0)
        };
        let dr = c * self.partial(p, 1, 0) + s * self.partial(p, 0, 1);
        0.5 * (1.0 + p.r2) * dr
    }

    /// Nodal samples on a grid of the same cap.
    pub fn field(&self, grid: &Arc<Grid>) -> ScalarField {
        ScalarField::from_fn(grid, |n| self.value(n.chart))
    }

    /// Exact value and normal-derivative traces on the grid's boundary.
    pub fn boundary_traces(&self, grid: &Grid) -> (Vec<f64>, Vec<f64>) {
        grid.boundary()
            .iter()
            .map(|b| (self.value(b.chart), self.normal_derivative(b.chart)))
            .unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::stereo_to_sphere;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hemi() -> CapDomain {
        CapDomain::hemisphere()
    }

    #[test]
    fn constant_generator_gives_half_nu1() {
        let q = q_from_holomorphic(&HolomorphicPoly::monomial(0), Part::Re, hemi()).unwrap();
        for p in [ChartPoint::new(0.3, 0.2), ChartPoint::new(-0.5, 0.9)] {
            let nu = stereo_to_sphere(p).nu;
            assert!((q.value(p) - 0.5 * nu[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_generator_gives_height_shift() {
        let q = q_from_holomorphic(&HolomorphicPoly::monomial(1), Part::Re, hemi()).unwrap();
        for p in [ChartPoint::new(0.3, 0.2), ChartPoint::new(-0.5, 0.9)] {
            let nu = stereo_to_sphere(p).nu;
            assert!((q.value(p) - 0.5 * (1.0 - nu[2])).abs() < 1e-15);
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let q = q_from_holomorphic(&HolomorphicPoly::monomial(3), Part::Im, hemi()).unwrap();
        let p = ChartPoint::new(0.35, -0.2);
        let h = 1e-4;
        let at = |du: f64, dv: f64| q.partial(ChartPoint::new(p.u + du, p.v + dv), 2, 1);
        let fd = (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h);
        assert!((q.partial(p, 3, 1) - fd).abs() < 1e-6);
        let fd = (at(0.0, h) - at(0.0, -h)) / (2.0 * h);
        assert!((q.partial(p, 2, 2) - fd).abs() < 1e-6);
    }

    #[test]
    fn identities_hold_for_random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for degree in 0..=4 {
            for part in [Part::Re, Part::Im] {
                let poly = HolomorphicPoly::random(degree, &mut rng);
                let q = q_from_holomorphic(&poly, part, CapDomain::new(2.0).unwrap()).unwrap();
                let r = q.residuals();
                assert!(
                    r.laplacian < 1e-12 && r.shifted < 1e-12 && r.el < 1e-9,
                    "{r:?}"
                );
            }
        }
    }

    #[test]
    fn laplacian_agrees_with_intermediate_identity() {
        let poly = HolomorphicPoly::monomial(2);
        let q = q_from_holomorphic(&poly, Part::Re, hemi()).unwrap();
        let p = ChartPoint::new(0.4, 0.1);
        let w = p.w();
        let g = poly.derivative().eval(w) - 2.0 * w.conj() * poly.eval(w) / (1.0 + p.r2);
        assert!((q.hat_laplacian(p) - g.re).abs() < 1e-13);
    }

    #[test]
    fn rejects_empty_coefficients() {
        assert!(HolomorphicPoly::new(vec![]).is_err());
        assert!(HolomorphicPoly::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
    }
}
