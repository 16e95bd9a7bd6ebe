//! The area form `dμ = iθ⁺∧θ⁻` and the total curvature `∫K dμ`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::ExprError;
use crate::model::{ChartPoint, GlobalSection, TRANSITION_TOL};
use crate::quadrature::gauss_legendre_on;
use crate::spin::{spin, ParamJet, SpinError};

/// Relative threshold on `|K|`, scaled by `|ρ|² + |σ|²`.
pub const EPS_K: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegralError {
    #[error("degenerate curvature K = {k:e} at {at:?}")]
    DegenerateCurvature { k: f64, at: Option<ChartPoint> },
    #[error("{source} at {at:?}")]
    Frame { source: SpinError, at: Option<ChartPoint> },
    #[error("not a global section: transition residual {residual:e}")]
    NonGlobalSection { residual: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Densities against `du∧dv` at `ν = u + iv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaDensity {
    pub kdmu: f64,
    pub dmu: f64,
}

/// `dμ` from `θ⁺ = √2/(K(1+ξξ̄))·(ρ dξ − σ̄ dξ̄)`, written as `P dν + Q dν̄`.
/// Then `iθ⁺∧θ⁻ = 2(|P|² − |Q|²) du∧dv`. `dμ` carries the sign of `K`.
pub fn area_density(pj: &ParamJet) -> Result<AreaDensity, IntegralError> {
    let sd = spin(pj).map_err(|source| IntegralError::Frame { source, at: None })?;
    let scale = sd.rho.norm_sqr() + sd.sigma.norm_sqr();
    if sd.k.abs() <= EPS_K * scale {
        return Err(IntegralError::DegenerateCurvature { k: sd.k, at: None });
    }
    let c = std::f64::consts::SQRT_2 / (sd.k * pj.s());
    let a = pj.xi.d;
    let b = pj.xi.dbar;
    let sb = sd.sigma.conj();
    let p: Complex = c * (sd.rho * a - sb * b.conj());
    let q: Complex = c * (sd.rho * b - sb * a.conj());
    let dmu = 2.0 * (p.norm_sqr() - q.norm_sqr());
    Ok(AreaDensity { kdmu: sd.k * dmu, dmu })
}

/// The chart point at spherical angles `(θ, φ)`: chart N on the upper
/// hemisphere, chart S on the lower.
pub fn sphere_point(theta: f64, phi: f64) -> ChartPoint {
    if theta <= 0.5 * PI {
        ChartPoint::north(Complex::from_polar((0.5 * theta).tan(), phi))
    } else {
        ChartPoint::south(Complex::from_polar(1.0 / (0.5 * theta).tan(), -phi))
    }
}

/// `∫K dμ` over the whole sphere by product Gauss–Legendre in `(θ, φ)`,
/// evaluating `ρ, σ, K` on the slice at arclength `r`.
pub fn gauss_bonnet(
    sec: &GlobalSection,
    n_theta: usize,
    n_phi: usize,
    r: f64,
) -> Result<f64, IntegralError> {
    assert!(n_theta >= 8 && n_phi >= 8, "grid sizes must be at least 8");
    let residual = sec.transition_residual();
    if !(residual <= TRANSITION_TOL) {
        return Err(IntegralError::NonGlobalSection { residual });
    }
    let (thetas, wt) = gauss_legendre_on(n_theta, 0.0, PI);
    let (phis, wp) = gauss_legendre_on(n_phi, 0.0, TAU);
    let rows: Vec<Result<f64, IntegralError>> = thetas
        .par_iter()
        .zip(&wt)
        .map(|(&theta, &w_theta)| {
            let mut row = 0.0;
            for (&phi, &w_phi) in phis.iter().zip(&wp) {
                let cp = sphere_point(theta, phi);
                let pj = sec.param_jet(&cp, r)?;
                let dens = area_density(&pj).map_err(|e| match e {
                    IntegralError::Frame { source, .. } => IntegralError::Frame { source, at: Some(cp) },
                    IntegralError::DegenerateCurvature { k, .. } => {
                        IntegralError::DegenerateCurvature { k, at: Some(cp) }
                    }
                    other => other,
                })?;
                let s = pj.s();
                // du dv = (1 + |ξ|²)²/4 · sin θ dθ dφ
                row += w_phi * dens.kdmu * s * s * 0.25 * theta.sin();
            }
            Ok(w_theta * row)
        })
        .collect();
    let mut total = 0.0;
    for row in rows {
        total += row?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::model::{point_sphere, Vec3};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn pencil_density() {
        let f = Expr::parse("0").unwrap();
        let r = 1.5;
        for xi in [c(0.0, 0.0), c(0.3, -1.1)] {
            let d = area_density(&ParamJet::from_expr(&f, xi, r).unwrap()).unwrap();
            let s = 1.0 + xi.norm_sqr();
            assert!((d.kdmu - 4.0 / (s * s)).abs() < 1e-14);
            assert!((d.dmu - 4.0 * r * r / (s * s)).abs() < 1e-13);
        }
    }

    #[test]
    fn sphere_point_covers_both_hemispheres() {
        let p = sphere_point(0.3, 1.0);
        assert!((p.direction().z - 0.3_f64.cos()).abs() < 1e-15);
        let q = sphere_point(2.5, 1.0);
        assert_eq!(q.chart, crate::model::Chart::S);
        let d = q.direction();
        assert!((d.z - 2.5_f64.cos()).abs() < 1e-15);
        assert!((d.y.atan2(d.x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn point_sphere_total() {
        let g = point_sphere(Vec3::new(1.0, 2.0, 3.0));
        let total = gauss_bonnet(&g, 16, 32, 1.0).unwrap();
        assert!((total - 4.0 * PI).abs() < 1e-10 * 4.0 * PI, "{total}");
    }

    #[test]
    fn non_global_is_rejected() {
        let g = GlobalSection::new(Expr::parse("xi").unwrap(), Expr::parse("xi").unwrap());
        assert!(matches!(gauss_bonnet(&g, 8, 8, 0.0), Err(IntegralError::NonGlobalSection { .. })));
    }
}
