//! Spectral representation of fields on a cap as spherical polynomials.
//!
//! A field is stored as
//!
//! ```text
//! f = Σ_m sin^m θ · ( C_m(z) cos mφ + S_m(z) sin mφ ),   z = cos θ,
//! ```
//!
//! with `C_m`, `S_m` Chebyshev series in `x ∈ [-1, 1]`, `z = mid + half·x`
//! mapping onto `[cos θ₀, 1]`. Every term is the restriction of a polynomial
//! in `(ν₁, ν₂, ν₃)`, so the representation is smooth at the pole. The sphere
//! Laplacian and multiplication by `ν_i` act exactly on coefficients.

use super::grid::Partials;

/// Clenshaw evaluation of a Chebyshev series.
pub fn cheb_eval(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Coefficients of `d/dx` of a Chebyshev series.
pub fn cheb_deriv(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// Coefficients of `x · p(x)`.
pub fn cheb_mul_x(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; c.len() + 1];
    for (k, &ck) in c.iter().enumerate() {
        if k == 0 {
            out[1] += ck;
        } else {
            out[k - 1] += 0.5 * ck;
            out[k + 1] += 0.5 * ck;
        }
    }
    out
}

fn add_into(dst: &mut Vec<f64>, src: &[f64], t: f64) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0.0);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += t * s;
    }
}

fn trim(c: &mut Vec<f64>) {
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
}

/// Chebyshev data for the radial factor of one angular mode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModeCoeffs {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Modal {
    z0: f64,
    modes: Vec<ModeCoeffs>,
}

/// `(S^m, d/dr S^m, d²/dr² S^m)`-style radial profile helpers at one radius.
#[derive(Debug, Clone, Copy)]
struct RadialFrame {
    s: f64,
    z: f64,
    ds: f64,
    dz: f64,
    dds: f64,
    ddz: f64,
}

impl RadialFrame {
    fn at(r: f64) -> Self {
        let d = 1.0 + r * r;
        let s = 2.0 * r / d;
        let z = (1.0 - r * r) / d;
        Self {
            s,
            z,
            ds: 2.0 * z / d,
            dz: -2.0 * s / d,
            dds: -4.0 * (s + r * z) / (d * d),
            ddz: 4.0 * (r * s - z) / (d * d),
        }
    }
}

impl Modal {
    pub fn zeros(z0: f64) -> Self {
        Self {
            z0,
            modes: Vec::new(),
        }
    }

    pub fn from_modes(z0: f64, modes: Vec<ModeCoeffs>) -> Self {
        Self { z0, modes }
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn modes(&self) -> &[ModeCoeffs] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    fn mid(&self) -> f64 {
        0.5 * (1.0 + self.z0)
    }

    fn half(&self) -> f64 {
        0.5 * (1.0 - self.z0)
    }

    /// Map `z` to the Chebyshev variable.
    pub fn to_x(&self, z: f64) -> f64 {
        (z - self.mid()) / self.half()
    }

    fn dz(&self, c: &[f64]) -> Vec<f64> {
        let inv = 1.0 / self.half();
        cheb_deriv(c).into_iter().map(|v| v * inv).collect()
    }

    fn mul_z(&self, c: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = c.iter().map(|v| v * self.mid()).collect();
        add_into(&mut out, &cheb_mul_x(c), self.half());
        out
    }

    fn one_minus_z2(&self, c: &[f64]) -> Vec<f64> {
        let mut out = c.to_vec();
        add_into(&mut out, &self.mul_z(&self.mul_z(c)), -1.0);
        out
    }

    fn mode_mut(&mut self, m: usize) -> &mut ModeCoeffs {
        if self.modes.len() <= m {
            self.modes.resize(m + 1, ModeCoeffs::default());
        }
        &mut self.modes[m]
    }

    pub fn set_mode(&mut self, m: usize, cos: Vec<f64>, sin: Vec<f64>) {
        let slot = self.mode_mut(m);
        slot.cos = cos;
        slot.sin = if m == 0 { Vec::new() } else { sin };
    }

    pub fn scale(&self, t: f64) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|md| ModeCoeffs {
                cos: md.cos.iter().map(|v| v * t).collect(),
                sin: md.sin.iter().map(|v| v * t).collect(),
            })
            .collect();
        Self { z0: self.z0, modes }
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: f64, other: &Self) -> Self {
        debug_assert!((self.z0 - other.z0).abs() < 1e-15);
        let mut out = self.clone();
        for (m, md) in other.modes.iter().enumerate() {
            let slot = out.mode_mut(m);
            add_into(&mut slot.cos, &md.cos, t);
            add_into(&mut slot.sin, &md.sin, t);
        }
        out
    }

    /// Sphere Laplacian, exact on coefficients:
    /// `Δ̂(S^m g) = S^m [(1 − z²) g'' − 2(m+1) z g' − m(m+1) g]`.
    pub fn hat_laplacian(&self) -> Self {
        let mut out = Self::zeros(self.z0);
        for (m, md) in self.modes.iter().enumerate() {
            let apply = |g: &[f64]| -> Vec<f64> {
                if g.is_empty() {
                    return Vec::new();
                }
                let g1 = self.dz(g);
                let g2 = self.dz(&g1);
                let mut res = self.one_minus_z2(&g2);
                add_into(&mut res, &self.mul_z(&g1), -2.0 * (m as f64 + 1.0));
                add_into(&mut res, g, -((m * (m + 1)) as f64));
                trim(&mut res);
                res
            };
            out.set_mode(m, apply(&md.cos), apply(&md.sin));
        }
        out
    }

    /// `(Δ̂ + 2)`.
    pub fn shifted_laplacian(&self) -> Self {
        self.hat_laplacian().axpy(2.0, self)
    }

    /// Multiplication by the coordinate function `ν_axis` (0, 1 or 2).
    pub fn mul_nu(&self, axis: usize) -> Self {
        let mut out = Self::zeros(self.z0);
        match axis {
            2 => {
                for (m, md) in self.modes.iter().enumerate() {
                    out.set_mode(m, self.mul_z(&md.cos), self.mul_z(&md.sin));
                }
            }
            0 | 1 => {
                for (m, md) in self.modes.iter().enumerate() {
                    self.shift_mode(&mut out, m, md, axis);
                }
            }
            _ => panic!("axis must be 0, 1 or 2"),
        }
        out
    }

    // sin θ·e^{±iφ} moves mode m to m ± 1; lowering picks up (1 − z²).
    fn shift_mode(&self, out: &mut Self, m: usize, md: &ModeCoeffs, axis: usize) {
        let (c, s) = (&md.cos, &md.sin);
        if m == 0 {
            let up = out.mode_mut(1);
            if axis == 0 {
                add_into(&mut up.cos, c, 1.0);
            } else {
                add_into(&mut up.sin, c, 1.0);
            }
            return;
        }
        let lc = self.one_minus_z2(c);
        let ls = self.one_minus_z2(s);
        {
            let up = out.mode_mut(m + 1);
            if axis == 0 {
                // cos mφ cos φ = ½cos(m+1)φ + ½cos(m−1)φ, sin mφ cos φ = ½sin(m+1)φ + ½sin(m−1)φ
                add_into(&mut up.cos, c, 0.5);
                add_into(&mut up.sin, s, 0.5);
            } else {
                // cos mφ sin φ = ½sin(m+1)φ − ½sin(m−1)φ, sin mφ sin φ = ½cos(m−1)φ − ½cos(m+1)φ
                add_into(&mut up.sin, c, 0.5);
                add_into(&mut up.cos, s, -0.5);
            }
        }
        let down = out.mode_mut(m - 1);
        if axis == 0 {
            add_into(&mut down.cos, &lc, 0.5);
            if m > 1 {
                add_into(&mut down.sin, &ls, 0.5);
            }
        } else {
            if m > 1 {
                add_into(&mut down.sin, &lc, -0.5);
            }
            add_into(&mut down.cos, &ls, 0.5);
        }
    }

    /// Radial profile `(F, F_r, F_rr)` of one coefficient series of mode `m`
    /// at stereographic radius `r`.
    fn radial_profile(
        &self,
        m: usize,
        g: &[f64],
        derivs: &[Vec<f64>; 2],
        fr: &RadialFrame,
    ) -> [f64; 3] {
        if g.is_empty() {
            return [0.0; 3];
        }
        let x = self.to_x(fr.z);
        let g0 = cheb_eval(g, x);
        let g1 = cheb_eval(&derivs[0], x);
        let g2 = cheb_eval(&derivs[1], x);
        let mf = m as f64;
        let sm = fr.s.powi(m as i32);
        let sm1 = if m >= 1 { fr.s.powi(m as i32 - 1) } else { 0.0 };
        let sm2 = if m >= 2 { fr.s.powi(m as i32 - 2) } else { 0.0 };
        let f = sm * g0;
        let f_r = mf * sm1 * fr.ds * g0 + sm * g1 * fr.dz;
        let f_rr = mf * (mf - 1.0) * sm2 * fr.ds * fr.ds * g0
            + mf * sm1 * fr.dds * g0
            + 2.0 * mf * sm1 * fr.ds * fr.dz * g1
            + sm * (fr.dz * fr.dz * g2 + fr.ddz * g1);
        [f, f_r, f_rr]
    }

    fn derivative_series(&self) -> Vec<[[Vec<f64>; 2]; 2]> {
        self.modes
            .iter()
            .map(|md| {
                let d = |g: &[f64]| {
                    let g1 = self.dz(g);
                    let g2 = self.dz(&g1);
                    [g1, g2]
                };
                [d(&md.cos), d(&md.sin)]
            })
            .collect()
    }

    /// Polar partials at the given radii × angles, row-major by radius.
    pub fn partials_on(&self, radii: &[f64], phis: &[f64]) -> Vec<Partials> {
        let series = self.derivative_series();
        let nt = phis.len();
        let mut out = vec![Partials::default(); radii.len() * nt];
        for (j, &r) in radii.iter().enumerate() {
            let frame = RadialFrame::at(r);
            for (m, md) in self.modes.iter().enumerate() {
                let pc = self.radial_profile(m, &md.cos, &series[m][0], &frame);
                let ps = self.radial_profile(m, &md.sin, &series[m][1], &frame);
                if pc == [0.0; 3] && ps == [0.0; 3] {
                    continue;
                }
                let mf = m as f64;
                for (k, &phi) in phis.iter().enumerate() {
                    let (sn, cs) = (mf * phi).sin_cos();
                    let p = &mut out[j * nt + k];
                    p.f += pc[0] * cs + ps[0] * sn;
                    p.fr += pc[1] * cs + ps[1] * sn;
                    p.frr += pc[2] * cs + ps[2] * sn;
                    p.ft += mf * (ps[0] * cs - pc[0] * sn);
                    p.frt += mf * (ps[1] * cs - pc[1] * sn);
                    p.ftt -= mf * mf * (pc[0] * cs + ps[0] * sn);
                }
            }
        }
        out
    }

    pub fn eval(&self, r: f64, phi: f64) -> f64 {
        self.partials_on(&[r], &[phi])[0].f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::chart::{stereo_to_sphere, ChartPoint};

    #[test]
    fn chebyshev_algebra() {
        // p = 1 + 2x + 3 T_2
        let c = [1.0, 2.0, 3.0];
        let x = 0.37;
        let p = 1.0 + 2.0 * x + 3.0 * (2.0 * x * x - 1.0);
        assert!((cheb_eval(&c, x) - p).abs() < 1e-15);
        assert!((cheb_eval(&cheb_deriv(&c), x) - (2.0 + 12.0 * x)).abs() < 1e-14);
        assert!((cheb_eval(&cheb_mul_x(&c), x) - x * p).abs() < 1e-15);
    }

    fn sphere_poly(z0: f64) -> Modal {
        // f = 1 + ν₃ + ν₁ (mode 1 cos) + ν₂ν₃ (mode 1 sin, g = z)
        let mut m = Modal::zeros(z0);
        let half = 0.5 * (1.0 - z0);
        let mid = 0.5 * (1.0 + z0);
        m.set_mode(0, vec![1.0 + mid, half], Vec::new());
        m.set_mode(1, vec![1.0], vec![mid, half]);
        m
    }

    fn exact(nu: [f64; 3]) -> f64 {
        1.0 + nu[2] + nu[0] + nu[1] * nu[2]
    }

    #[test]
    fn evaluation_matches_polynomial() {
        let m = sphere_poly(0.2);
        for &(r, phi) in &[(0.1, 0.3), (0.5, 2.0), (0.8, -1.0)] {
            let nu = stereo_to_sphere(ChartPoint::polar(r, phi)).nu;
            assert!((m.eval(r, phi) - exact(nu)).abs() < 1e-14);
        }
    }

    #[test]
    fn laplacian_and_multiplication_are_exact() {
        let m = sphere_poly(-0.3);
        // Δ̂(1 + ν₃ + ν₁ + ν₂ν₃) = −2ν₃ − 2ν₁ − 6ν₂ν₃
        let lap = m.hat_laplacian();
        for i in 0..3 {
            let (r, phi) = (0.2 + 0.3 * i as f64, 0.7 * i as f64);
            let nu = stereo_to_sphere(ChartPoint::polar(r, phi)).nu;
            let expected = -2.0 * nu[2] - 2.0 * nu[0] - 6.0 * nu[1] * nu[2];
            assert!((lap.eval(r, phi) - expected).abs() < 1e-13);
            for axis in 0..3 {
                let prod = m.mul_nu(axis);
                assert!((prod.eval(r, phi) - nu[axis] * exact(nu)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn radial_derivatives_match_finite_differences() {
        let m = sphere_poly(0.0).mul_nu(0).mul_nu(1);
        let (r, phi) = (0.45, 0.9);
        let h = 1e-5;
        let p = m.partials_on(&[r], &[phi])[0];
        let fr = (m.eval(r + h, phi) - m.eval(r - h, phi)) / (2.0 * h);
        let frr = (m.eval(r + h, phi) - 2.0 * m.eval(r, phi) + m.eval(r - h, phi)) / (h * h);
        let ft = (m.eval(r, phi + h) - m.eval(r, phi - h)) / (2.0 * h);
        let frt = (m.eval(r + h, phi + h) - m.eval(r + h, phi - h) - m.eval(r - h, phi + h)
            + m.eval(r - h, phi - h))
            / (4.0 * h * h);
        assert!((p.fr - fr).abs() < 1e-8);
        assert!((p.frr - frr).abs() < 1e-4);
        assert!((p.ft - ft).abs() < 1e-8);
        assert!((p.frt - frt).abs() < 1e-4);
    }
}
