//! First-order geometry of a congruence at one point of one line.
//!
//! Notation: `a = ∂ξ`, `b = ∂̄ξ` are the ν-derivatives of the direction
//! coordinate, so `∂ξ̄ = b̄` and `∂̄ξ̄ = ā`; `s = 1 + ξξ̄`; and
//! `D = |∂⁻F|² − |∂⁺F|²` is the common denominator of the frame and the
//! spin coefficients. `D = 0` exactly at focal points.

use std::f64::consts::SQRT_2;

use num_complex::Complex64 as Complex;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{Expr, ExprError};
use crate::jet::Jet1;

/// Relative threshold on `|D|` below which the frame is degenerate.
pub const EPS_D: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SpinError {
    #[error("degenerate frame (focal point): |D| = {d:e} below {threshold:e}")]
    DegenerateFrame { d: f64, threshold: f64 },
}

/// Jets of `ξ` and `F` with respect to a parameter `ν`, at arclength `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamJet {
    pub xi: Jet1,
    pub f: Jet1,
    pub r: f64,
}

impl ParamJet {
    pub fn new(xi: Jet1, f: Jet1, r: f64) -> Self {
        Self { xi, f, r }
    }

    /// Parametrised by `ν = ξ`.
    pub fn from_expr(f: &Expr, xi: Complex, r: f64) -> Result<Self, ExprError> {
        Ok(Self::new(Jet1::variable(xi), f.eval_jet(xi)?, r))
    }

    /// Parametrised by an arbitrary `ν ↦ ξ(ν, ν̄)`, with `F` given as a
    /// function of `ξ`.
    pub fn compose(xi_of_nu: &Expr, f: &Expr, nu: Complex, r: f64) -> Result<Self, ExprError> {
        let xi = xi_of_nu.eval_jet(nu)?;
        Ok(Self::new(xi, f.eval_jet_with(xi)?, r))
    }

    pub fn at_r(self, r: f64) -> Self {
        Self { r, ..self }
    }

    pub fn s(&self) -> f64 {
        1.0 + self.xi.value.norm_sqr()
    }

    /// `|∂ξ|² − |∂̄ξ|²`, the Jacobian of `ν ↦ ξ`.
    pub fn direction_jacobian(&self) -> f64 {
        self.xi.d.norm_sqr() - self.xi.dbar.norm_sqr()
    }
}

/// `(∂⁺F, ∂⁻F)`, the translation-invariant derivatives of `F`.
pub fn invariant_derivatives(pj: &ParamJet) -> (Complex, Complex) {
    let xi = pj.xi;
    let k = 2.0 * pj.f.value * xi.value.conj() / pj.s();
    let plus = pj.f.d + pj.r * xi.d - k * xi.d;
    let minus = pj.f.dbar + pj.r * xi.dbar - k * xi.dbar;
    (plus, minus)
}

fn denominator(plus: Complex, minus: Complex) -> Result<f64, SpinError> {
    let d = minus.norm_sqr() - plus.norm_sqr();
    let threshold = EPS_D * (1.0 + plus.norm_sqr() + minus.norm_sqr());
    if d.abs() < threshold {
        Err(SpinError::DegenerateFrame { d, threshold })
    } else {
        Ok(d)
    }
}

/// `σ·D`, which does not depend on `r`.
pub fn shear_numerator(pj: &ParamJet) -> Complex {
    let (plus, minus) = invariant_derivatives(pj);
    plus.conj() * pj.xi.dbar.conj() - minus.conj() * pj.xi.d.conj()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinData {
    pub dplus_f: Complex,
    pub dminus_f: Complex,
    /// Jacobian of `(u, v, r) ↦ x`.
    pub delta: f64,
    pub rho: Complex,
    pub sigma: Complex,
    pub k: f64,
}

pub fn spin(pj: &ParamJet) -> Result<SpinData, SpinError> {
    let (plus, minus) = invariant_derivatives(pj);
    let d = denominator(plus, minus)?;
    let a = pj.xi.d;
    let b = pj.xi.dbar;
    let rho = (plus * a.conj() - minus * b.conj()) / d;
    let sigma = (plus.conj() * b.conj() - minus.conj() * a.conj()) / d;
    let s = pj.s();
    Ok(SpinData {
        dplus_f: plus,
        dminus_f: minus,
        delta: -4.0 * d / (s * s),
        rho,
        sigma,
        k: rho.norm_sqr() - sigma.norm_sqr(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheet {
    /// Locally a graph over the sphere of directions.
    Graph,
    /// The tangent plane contains a vertical direction.
    Vertical,
}

/// Graph criterion: vertical exactly where the direction map is singular.
pub fn curvature_graph_test(pj: &ParamJet, eps: f64) -> Sheet {
    if pj.direction_jacobian().abs() < eps {
        Sheet::Vertical
    } else {
        Sheet::Graph
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Twist {
    Integrable,
    Twisting,
}

pub fn classify_twist(sd: &SpinData, tol: f64) -> Twist {
    if sd.rho.im.abs() <= tol {
        Twist::Integrable
    } else {
        Twist::Twisting
    }
}

/// Coefficients of `e₊ = (α∂_ν + β∂_ν̄ + Ω∂_r)e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullFrame {
    pub alpha: Complex,
    pub beta: Complex,
    pub omega: Complex,
    pub phase: f64,
}

pub fn null_frame(pj: &ParamJet) -> Result<NullFrame, SpinError> {
    let (plus, minus) = invariant_derivatives(pj);
    let d = denominator(plus, minus)?;
    let s = pj.s();
    let a = pj.xi.d;
    let b = pj.xi.dbar;
    let f = pj.f.value;
    let alpha = plus.conj() * s / (SQRT_2 * d);
    let beta = -minus.conj() * s / (SQRT_2 * d);
    // fixed by ⟨e₀, e₊⟩ = 0, using ⟨e₀, ∂_ν⟩ = −2(F̄∂ξ + F∂ξ̄)/s²
    let omega = SQRT_2
        * (plus.conj() * (f * b.conj() + f.conj() * a) - minus.conj() * (f * a.conj() + f.conj() * b))
        / (s * d);
    // ∂⁻F at r = 0; the phase is held fixed along the line
    let (_, minus0) = invariant_derivatives(&pj.at_r(0.0));
    let phase = if minus0 == Complex::new(0.0, 0.0) { 0.0 } else { (-minus0.conj()).arg() };
    Ok(NullFrame { alpha, beta, omega, phase })
}

/// `(⟨Z₊, Z₊⟩, ⟨Z₊, Z₋⟩)` for `Z₊ = ∂_ν − ⟨e₀, ∂_ν⟩∂_r`, `Z₋ = Z̄₊`.
pub fn z_inner_products(pj: &ParamJet) -> (Complex, f64) {
    let (plus, minus) = invariant_derivatives(pj);
    let s2 = pj.s() * pj.s();
    (4.0 * plus * minus.conj() / s2, 2.0 * (minus.norm_sqr() + plus.norm_sqr()) / s2)
}

/// Jets of the chart-N realisation `(z, t)` with `z = x¹ + ix²`, `t = x³`.
pub fn phi_jet(pj: &ParamJet) -> (Jet1, Jet1) {
    let xi = pj.xi;
    let xb = xi.conj();
    let f = pj.f;
    let fb = f.conj();
    let m = xi * xb;
    let s = m + 1.0;
    let s2 = s * s;
    let z = ((f - fb * xi * xi) * 2.0 + xi * s * (2.0 * pj.r)) / s2;
    let t = ((f * xb + fb * xi) * (-2.0) + (Jet1::real(1.0) - m * m) * pj.r) / s2;
    (z, t)
}

/// A complex vector in the coordinates `(z, z̄, t)`.
pub type ZVec = [Complex; 3];

/// `∂_ν`, `∂_ν̄` and `∂_r` as vectors in `(z, z̄, t)` components.
pub fn coordinate_vectors(pj: &ParamJet) -> [ZVec; 3] {
    let (z, t) = phi_jet(pj);
    let xi = pj.xi.value;
    let s = pj.s();
    let w = [2.0 * xi / s, 2.0 * xi.conj() / s, Complex::new((2.0 - s) / s, 0.0)];
    [[z.d, z.dbar.conj(), t.d], [z.dbar, z.d.conj(), t.dbar], w]
}

/// Bilinear extension of the Euclidean inner product in `(z, z̄, t)`.
pub fn inner(x: &ZVec, y: &ZVec) -> Complex {
    0.5 * (x[0] * y[1] + x[1] * y[0]) + x[2] * y[2]
}

/// `(e₀, e₊)` of a frame as vectors in `(z, z̄, t)` components.
pub fn frame_vectors(pj: &ParamJet, frame: &NullFrame) -> (ZVec, ZVec) {
    let [dn, dnb, dr] = coordinate_vectors(pj);
    let ph = Complex::from_polar(1.0, frame.phase);
    let e_plus = std::array::from_fn(|k| {
        (frame.alpha * dn[k] + frame.beta * dnb[k] + frame.omega * dr[k]) * ph
    });
    (dr, e_plus)
}

/// Real Cartesian components of a `(z, z̄, t)` vector.
pub fn to_cartesian(v: &ZVec) -> [Complex; 3] {
    [0.5 * (v[0] + v[1]), (v[0] - v[1]) / Complex::new(0.0, 2.0), v[2]]
}
