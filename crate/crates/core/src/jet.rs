//! First-order Wirtinger jets.
//!
//! A [`Jet1`] carries a complex value together with its two Wirtinger
//! derivatives with respect to a complex parameter `ν`:
//! `d = ∂/∂ν` and `dbar = ∂/∂ν̄`. Conjugation swaps and conjugates the
//! derivatives, which is what makes non-holomorphic expressions work.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as Complex;

/// A complex value with its `∂` and `∂̄` derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub value: Complex,
    pub d: Complex,
    pub dbar: Complex,
}

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

impl Jet1 {
    pub const fn new(value: Complex, d: Complex, dbar: Complex) -> Self {
        Self { value, d, dbar }
    }

    /// A constant: both derivatives vanish.
    pub const fn constant(value: Complex) -> Self {
        Self { value, d: ZERO, dbar: ZERO }
    }

    pub const fn real(value: f64) -> Self {
        Self::constant(Complex::new(value, 0.0))
    }

    /// The identity parameter `ν ↦ ν` seeded at `value`.
    pub const fn variable(value: Complex) -> Self {
        Self { value, d: ONE, dbar: ZERO }
    }

    pub fn conj(self) -> Self {
        Self {
            value: self.value.conj(),
            d: self.dbar.conj(),
            dbar: self.d.conj(),
        }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self { value: e, d: e * self.d, dbar: e * self.dbar }
    }

    /// Integer power; negative exponents go through the reciprocal.
    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::real(1.0),
            1 => self,
            _ if n < 0 => Self::real(1.0) / self.powi(-n),
            _ => {
                let lower = self.value.powi(n - 1);
                let scale = lower * f64::from(n);
                Self {
                    value: lower * self.value,
                    d: scale * self.d,
                    dbar: scale * self.dbar,
                }
            }
        }
    }

    /// `|f|²` as a jet (real value, conjugate-symmetric derivatives).
    pub fn norm_sqr(self) -> Self {
        self * self.conj()
    }

    pub fn scale(self, k: Complex) -> Self {
        Self { value: self.value * k, d: self.d * k, dbar: self.dbar * k }
    }

    /// Derivative along the real direction `u` where `ν = u + iv`.
    pub fn du(&self) -> Complex {
        self.d + self.dbar
    }

    /// Derivative along the real direction `v` where `ν = u + iv`.
    pub fn dv(&self) -> Complex {
        Complex::i() * (self.d - self.dbar)
    }
}

impl From<Complex> for Jet1 {
    fn from(value: Complex) -> Self {
        Self::constant(value)
    }
}

impl Add for Jet1 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            d: self.d + rhs.d,
            dbar: self.dbar + rhs.dbar,
        }
    }
}

impl Sub for Jet1 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            value: self.value - rhs.value,
            d: self.d - rhs.d,
            dbar: self.dbar - rhs.dbar,
        }
    }
}

impl Mul for Jet1 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            value: self.value * rhs.value,
            d: self.d * rhs.value + self.value * rhs.d,
            dbar: self.dbar * rhs.value + self.value * rhs.dbar,
        }
    }
}

impl Div for Jet1 {
    type Output = Self;
    /// Quotient rule. The caller is responsible for a non-zero denominator.
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.value.inv();
        let q = self.value * inv;
        Self {
            value: q,
            d: (self.d - q * rhs.d) * inv,
            dbar: (self.dbar - q * rhs.dbar) * inv,
        }
    }
}

impl Neg for Jet1 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: -self.value, d: -self.d, dbar: -self.dbar }
    }
}

impl Add<f64> for Jet1 {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        Self { value: self.value + rhs, ..self }
    }
}

impl Mul<f64> for Jet1 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self { value: self.value * rhs, d: self.d * rhs, dbar: self.dbar * rhs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn abs_squared_rule() {
        let z = Jet1::variable(c(2.0, 0.0));
        let m = z * z.conj();
        assert_eq!(m.value, c(4.0, 0.0));
        assert_eq!(m.d, c(2.0, 0.0));
        assert_eq!(m.dbar, c(2.0, 0.0));
    }

    #[test]
    fn conj_swaps_derivatives() {
        let f = Jet1::new(c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.25));
        let g = f.conj();
        assert_eq!(g.d, f.dbar.conj());
        assert_eq!(g.dbar, f.d.conj());
        assert_eq!(g.conj(), f);
    }

    #[test]
    fn negative_power_matches_reciprocal() {
        let z = Jet1::variable(c(0.3, -0.7));
        let a = z.powi(-2);
        let b = Jet1::real(1.0) / (z * z);
        assert!((a.value - b.value).norm() < 1e-14);
        assert!((a.d - b.d).norm() < 1e-13);
        assert!((a.d - (-2.0) * z.value.powi(-3)).norm() < 1e-13);
    }

    #[test]
    fn real_directions() {
        // f = ν̄ has ∂_u f = 1, ∂_v f = -i
        let f = Jet1::variable(c(0.1, 0.2)).conj();
        assert_eq!(f.du(), c(1.0, 0.0));
        assert_eq!(f.dv(), c(0.0, -1.0));
    }
}
