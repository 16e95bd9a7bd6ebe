//! Evolution of `(ρ, σ)` along a line:
//! `ρ' = ρ² + σσ̄`, `σ' = (ρ + ρ̄)σ`.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spin::{invariant_derivatives, spin, ParamJet, SpinData, SpinError};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SachsError {
    #[error("focal point at r = {r}")]
    FocalPoint { r: f64 },
    #[error(transparent)]
    Frame(#[from] SpinError),
}

/// Values of `ρ` and `σ` at `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SachsInitialData {
    pub rho0: Complex,
    pub sigma0: Complex,
}

impl SachsInitialData {
    pub fn new(rho0: Complex, sigma0: Complex) -> Self {
        Self { rho0, sigma0 }
    }

    pub fn from_spin(sd: &SpinData) -> Self {
        Self::new(sd.rho, sd.sigma)
    }

    /// `Q(r) = 1 − (ρ₀ + ρ̄₀)r + (ρ₀ρ̄₀ − σ₀σ̄₀)r²`.
    pub fn q(&self, r: f64) -> f64 {
        let k0 = self.rho0.norm_sqr() - self.sigma0.norm_sqr();
        1.0 - 2.0 * self.rho0.re * r + k0 * r * r
    }

    /// Real roots of `Q`, ascending.
    pub fn focal_points(&self) -> Vec<f64> {
        let b = -2.0 * self.rho0.re;
        let a = self.rho0.norm_sqr() - self.sigma0.norm_sqr();
        let scale = self.rho0.norm_sqr() + self.sigma0.norm_sqr();
        if a.abs() <= 1e-14 * scale || scale == 0.0 {
            return if b != 0.0 { vec![-1.0 / b] } else { Vec::new() };
        }
        let disc = b * b - 4.0 * a;
        if disc < 0.0 {
            return Vec::new();
        }
        // roots of a r² + b r + 1 without cancellation
        let qq = -0.5 * (b + b.signum() * disc.sqrt());
        let mut roots = if qq == 0.0 {
            vec![(-1.0 / a).sqrt(), -(-1.0 / a).sqrt()]
        } else {
            vec![qq / a, 1.0 / qq]
        };
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        roots
    }
}

/// Closed-form `(ρ(r), σ(r))`.
pub fn evolve_closed_form(init: &SachsInitialData, r: f64) -> Result<(Complex, Complex), SachsError> {
    let q = init.q(r);
    if q.abs() < 1e-12 * (1.0 + init.rho0.norm_sqr() * r * r) {
        return Err(SachsError::FocalPoint { r });
    }
    let k0 = init.rho0.norm_sqr() - init.sigma0.norm_sqr();
    Ok(((init.rho0 - k0 * r) / q, init.sigma0 / q))
}

/// Right-hand side of the Sachs equations.
pub fn sachs_rhs(rho: Complex, sigma: Complex) -> (Complex, Complex) {
    (rho * rho + sigma.norm_sqr(), 2.0 * rho.re * sigma)
}

/// `(|dρ/dr − (ρ² + σσ̄)|, |dσ/dr − (ρ + ρ̄)σ|)` at `pj.r`.
///
/// `∂±F` are affine in `r` with slopes `∂ξ`, `∂̄ξ`, so `ρ` and `σ` are
/// rational in `r` and their `r`-derivatives are taken exactly.
pub fn sachs_residual(pj: &ParamJet) -> Result<(f64, f64), SachsError> {
    let sd = spin(pj)?;
    let (plus, minus) = invariant_derivatives(pj);
    let a = pj.xi.d;
    let b = pj.xi.dbar;
    let d = minus.norm_sqr() - plus.norm_sqr();
    let dd = 2.0 * (minus.conj() * b).re - 2.0 * (plus.conj() * a).re;
    let num_rho = plus * a.conj() - minus * b.conj();
    let j = a.norm_sqr() - b.norm_sqr();
    let drho = (j * d - num_rho * dd) / (d * d);
    let dsigma = -sd.sigma * dd / d;
    let (f_rho, f_sigma) = sachs_rhs(sd.rho, sd.sigma);
    Ok(((drho - f_rho).norm(), (dsigma - f_sigma).norm()))
}

/// Classical fourth-order Runge–Kutta from `r = 0` to `r_end`.
pub fn integrate_rk4(
    init: &SachsInitialData,
    r_end: f64,
    steps: usize,
) -> Result<(Complex, Complex), SachsError> {
    assert!(steps >= 1, "at least one step");
    let h = r_end / steps as f64;
    let (mut rho, mut sigma) = (init.rho0, init.sigma0);
    for i in 0..steps {
        let (k1r, k1s) = sachs_rhs(rho, sigma);
        let (k2r, k2s) = sachs_rhs(rho + 0.5 * h * k1r, sigma + 0.5 * h * k1s);
        let (k3r, k3s) = sachs_rhs(rho + 0.5 * h * k2r, sigma + 0.5 * h * k2s);
        let (k4r, k4s) = sachs_rhs(rho + h * k3r, sigma + h * k3s);
        rho += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        sigma += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        if !(rho.norm() <= 1e12) {
            return Err(SachsError::FocalPoint { r: h * (i + 1) as f64 });
        }
    }
    Ok((rho, sigma))
}
