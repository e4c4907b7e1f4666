//! Independent oracles for the first clamped buckling eigenvalue: the flat
//! disk via the first zero of `J₁`, and axisymmetric caps via shooting on the
//! Legendre equation.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// `J₁(x)` by its power series; accurate to rounding for `|x| ≲ 10`.
pub fn bessel_j1(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo * fhi > 0.0 {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: {flo:e}, {fhi:e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < tol * mid.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First positive zero of `J₁`, `j₁,₁ ≈ 3.8317`.
pub fn j1_first_zero() -> f64 {
    bisect(3.0, 4.5, bessel_j1, 1e-15).expect("J₁ changes sign on [3, 4.5]")
}

/// Clamped flat-disk buckling eigenvalue `j₁,₁² / radius²`.
pub fn flat_disk_buckling(radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Config(format!(
            "disk radius must be positive, got {radius}"
        )));
    }
    let j = j1_first_zero();
    Ok(j * j / (radius * radius))
}

/// `P_ν(cos θ)` and its θ-derivative by the hypergeometric series
/// `₂F₁(−ν, ν+1; 1; sin²(θ/2))`. Converges for `θ < π`; used for starting
/// values near the pole and for cross-checks.
pub fn legendre_series(nu: f64, theta: f64) -> (f64, f64) {
    let x = (0.5 * theta).sin().powi(2);
    let dx = 0.5 * theta.sin();
    // a_{k+1} = a_k (k − ν)(k + ν + 1) / (k + 1)²
    let (mut a, mut xk) = (1.0, 1.0);
    let (mut sum, mut dsum) = (1.0, 0.0);
    for k in 0..1_000_000 {
        let kf = k as f64;
        a *= (kf - nu) * (kf + nu + 1.0) / ((kf + 1.0) * (kf + 1.0));
        let dterm = (kf + 1.0) * a * xk;
        xk *= x;
        let term = a * xk;
        sum += term;
        dsum += dterm;
        if kf > nu
            && term.abs() < 1e-17 * sum.abs().max(1e-300)
            && dterm.abs() < 1e-17 * dsum.abs().max(1e-300)
        {
            break;
        }
    }
    (sum, dsum * dx)
}

#[derive(Debug, Clone, Copy)]
struct State {
    y: f64,
    dy: f64,
}

/// Integrate `y'' + cot θ y' + λ y = 0` from `t0` to `t1` with an adaptive
/// Dormand–Prince 5(4) pair.
fn integrate_legendre(lambda: f64, t0: f64, t1: f64, init: State, tol: f64) -> State {
    let rhs = |t: f64, s: [f64; 2]| [s[1], -s[1] * t.cos() / t.sin() - lambda * s[0]];
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut t = t0;
    let mut s = [init.y, init.dy];
    let mut h = (t1 - t0) / 64.0;
    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        let mut k = [[0.0; 2]; 7];
        for i in 0..7 {
            let mut si = s;
            for (j, kj) in k.iter().enumerate().take(i) {
                si[0] += h * A[i][j] * kj[0];
                si[1] += h * A[i][j] * kj[1];
            }
            k[i] = rhs(t + C[i] * h, si);
        }
        let mut hi = s;
        let mut lo = s;
        for i in 0..7 {
            hi[0] += h * B5[i] * k[i][0];
            hi[1] += h * B5[i] * k[i][1];
            lo[0] += h * B4[i] * k[i][0];
            lo[1] += h * B4[i] * k[i][1];
        }
        let scale0 = tol * (1.0 + s[0].abs().max(hi[0].abs()));
        let scale1 = tol * (1.0 + s[1].abs().max(hi[1].abs()));
        let err = (((hi[0] - lo[0]) / scale0).powi(2) + ((hi[1] - lo[1]) / scale1).powi(2)).sqrt()
            / 2f64.sqrt();
        if err <= 1.0 {
            t += h;
            s = hi;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    State { y: s[0], dy: s[1] }
}

/// `d/dθ P_ν(cos θ)` at `theta`, by series near the pole and ODE
/// integration beyond.
pub fn legendre_dtheta(nu: f64, theta: f64) -> f64 {
    let start = theta.min(0.05 / (1.0 + nu));
    let (y, dy) = legendre_series(nu, start);
    if start >= theta {
        return dy;
    }
    integrate_legendre(nu * (nu + 1.0), start, theta, State { y, dy }, 1e-12).dy
}

/// Smallest axisymmetric clamped buckling eigenvalue of the cap `θ < θ₀`.
///
/// Regular axisymmetric solutions of `Δ̂(Δ̂ + β)u = 0` are
/// `c₁ + c₂ P_ν(cos θ)` with `ν(ν+1) = β`; clamping at `θ₀` leaves
/// `∂_θ P_ν(cos θ₀) = 0`, whose smallest positive root is located by a scan
/// in `ν` and refined by bisection.
pub fn cap_buckling_shooting(theta0: f64) -> Result<f64> {
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(Error::InvalidDomain(theta0));
    }
    let g = |nu: f64| legendre_dtheta(nu, theta0);
    let step = 0.1;
    let mut lo = 0.05;
    let mut glo = g(lo);
    // The first root sits near j₁,₁/θ₀ for small caps.
    let limit = 10.0 * (1.0 + 4.0 / theta0);
    while lo < limit {
        let hi = lo + step;
        let ghi = g(hi);
        if glo * ghi <= 0.0 {
            let nu = bisect(lo, hi, g, 1e-14)?;
            return Ok(nu * (nu + 1.0));
        }
        lo = hi;
        glo = ghi;
    }
    Err(Error::Bracket(format!(
        "no root of the clamped condition for ν < {limit} at θ₀ = {theta0}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_zero_of_j1() {
        assert!((j1_first_zero() - 3.831_705_970_207_512).abs() < 1e-12);
        assert!(bessel_j1(0.0) == 0.0);
    }

    #[test]
    fn flat_disk_scaling() {
        let b1 = flat_disk_buckling(1.0).unwrap();
        assert!((b1 - 14.681_970_642_123_89).abs() < 1e-9);
        assert!((flat_disk_buckling(2.0).unwrap() - b1 / 4.0).abs() < 1e-12);
        assert!((flat_disk_buckling(0.1).unwrap() - 1468.197).abs() < 1e-2);
        assert!(flat_disk_buckling(0.0).is_err());
    }

    #[test]
    fn legendre_integer_degrees() {
        // P₂(cos θ) = (3cos²θ − 1)/2, derivative −3 cos θ sin θ.
        for theta in [0.3, 1.2, 2.4] {
            let (p, dp) = legendre_series(2.0, theta);
            assert!((p - 0.5 * (3.0 * theta.cos().powi(2) - 1.0)).abs() < 1e-14);
            assert!((dp + 3.0 * theta.cos() * theta.sin()).abs() < 1e-14);
            assert!((legendre_dtheta(2.0, theta) + 3.0 * theta.cos() * theta.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn ode_matches_series_for_fractional_degree() {
        let nu = 3.7;
        for theta in [0.5, 1.5, 2.5] {
            let (_, ds) = legendre_series(nu, theta);
            assert!((legendre_dtheta(nu, theta) - ds).abs() < 1e-9 * (1.0 + ds.abs()));
        }
    }

    #[test]
    fn shooting_limits() {
        let small = cap_buckling_shooting(0.1).unwrap();
        let flat = flat_disk_buckling(0.1).unwrap();
        assert!(((small - flat) / flat).abs() < 1e-2);
        let hemi = cap_buckling_shooting(PI / 2.0).unwrap();
        // ∂_θ P_ν(cos θ) vanishes at the equator for ν = 2 (β = 6).
        assert!((hemi - 6.0).abs() < 1e-9);
        let big = cap_buckling_shooting(3.0).unwrap();
        assert!(big >= 2.0 && big < 2.1);
        assert!(cap_buckling_shooting(PI).is_err());
    }
}
