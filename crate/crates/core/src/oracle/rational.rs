//! Rational functions `N(w, w̄) / (1 + w w̄)^k` with complex polynomial
//! numerators, closed under `∂_w`, `∂_w̄` and the sphere Laplacian.

use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    /// `(a, b) ↦ c` for the monomial `c w^a w̄^b`.
    num: BTreeMap<(u32, u32), Complex64>,
    power: u32,
}

impl Rational {
    pub fn zero() -> Self {
        Self {
            num: BTreeMap::new(),
            power: 0,
        }
    }

    pub fn monomial(c: Complex64, a: u32, b: u32, power: u32) -> Self {
        let mut num = BTreeMap::new();
        num.insert((a, b), c);
        Self { num, power }.pruned()
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn pruned(mut self) -> Self {
        self.num.retain(|_, c| c.norm() != 0.0);
        self
    }

    fn add_term(num: &mut BTreeMap<(u32, u32), Complex64>, key: (u32, u32), c: Complex64) {
        *num.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    /// Same function written over `(1 + w w̄)^(power + 1)`.
    fn raised(&self) -> Self {
        let mut num = BTreeMap::new();
        for (&(a, b), &c) in &self.num {
            Self::add_term(&mut num, (a, b), c);
            Self::add_term(&mut num, (a + 1, b + 1), c);
        }
        Self {
            num,
            power: self.power + 1,
        }
    }

    fn raised_to(&self, power: u32) -> Self {
        let mut out = self.clone();
        while out.power < power {
            out = out.raised();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.power.max(other.power);
        let mut lhs = self.raised_to(p);
        for (&k, &c) in &other.raised_to(p).num {
            Self::add_term(&mut lhs.num, k, c);
        }
        lhs.pruned()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            num: self.num.iter().map(|(&k, &c)| (k, c * s)).collect(),
            power: self.power,
        }
        .pruned()
    }

    /// `∂_w`: `(N_w (1 + w w̄) − k w̄ N) / (1 + w w̄)^(k+1)`.
    pub fn d_w(&self) -> Self {
        let k = self.power as f64;
        let mut num = BTreeMap::new();
        for (&(a, b), &c) in &self.num {
            if a > 0 {
                let ca = c * a as f64;
                Self::add_term(&mut num, (a - 1, b), ca);
                Self::add_term(&mut num, (a, b + 1), ca);
            }
            Self::add_term(&mut num, (a, b + 1), -k * c);
        }
        Self {
            num,
            power: self.power + 1,
        }
        .pruned()
    }

    /// `∂_w̄`: `(N_w̄ (1 + w w̄) − k w N) / (1 + w w̄)^(k+1)`.
    pub fn d_wbar(&self) -> Self {
        let k = self.power as f64;
        let mut num = BTreeMap::new();
        for (&(a, b), &c) in &self.num {
            if b > 0 {
                let cb = c * b as f64;
                Self::add_term(&mut num, (a, b - 1), cb);
                Self::add_term(&mut num, (a + 1, b), cb);
            }
            Self::add_term(&mut num, (a + 1, b), -k * c);
        }
        Self {
            num,
            power: self.power + 1,
        }
        .pruned()
    }

    /// Multiply by `(1 + w w̄)^2`, i.e. lower the denominator power by two
    /// when possible.
    fn times_conformal_inverse(&self) -> Self {
        if self.power >= 2 {
            Self {
                num: self.num.clone(),
                power: self.power - 2,
            }
        } else {
            let mut out = self.clone();
            for _ in self.power..2 {
                let mut num = BTreeMap::new();
                for (&(a, b), &c) in &out.num {
                    Self::add_term(&mut num, (a, b), c);
                    Self::add_term(&mut num, (a + 1, b + 1), c);
                }
                out.num = num;
            }
            out.power = 0;
            out.pruned()
        }
    }

    /// `Δ̂ = 4 e^{-σ} ∂_w ∂_w̄ = (1 + w w̄)^2 ∂_w ∂_w̄`.
    pub fn hat_laplacian(&self) -> Self {
        self.d_w().d_wbar().times_conformal_inverse()
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        let wb = w.conj();
        let d = 1.0 + w.norm_sqr();
        let n: Complex64 = self
            .num
            .iter()
            .map(|(&(a, b), &c)| c * w.powu(a) * wb.powu(b))
            .sum();
        n / d.powi(self.power as i32)
    }
}
