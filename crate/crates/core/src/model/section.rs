use num_complex::Complex64 as Complex;

use super::{phi_point, Chart, ChartPoint, LineR3, Translation, Vec3};
use crate::expr::{Expr, ExprBuilder, ExprError};
use crate::spin::ParamJet;

/// Relative tolerance of the chart transition identity on the overlap.
pub const TRANSITION_TOL: f64 = 1e-10;

/// A section `F(ξ, ξ̄)` of `TP¹` over one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSection {
    pub chart: Chart,
    pub f: Expr,
}

/// A section given in both charts. Globality is checked, not assumed: see
/// [`GlobalSection::transition_residual`].
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSection {
    pub north: LocalSection,
    pub south: LocalSection,
}

impl GlobalSection {
    pub fn new(north: Expr, south: Expr) -> Self {
        Self {
            north: LocalSection { chart: Chart::N, f: north },
            south: LocalSection { chart: Chart::S, f: south },
        }
    }

    /// Builds the south chart as `F_S(w) = −w²·F_N(1/w)`.
    ///
    /// The result is a literal composition, so it cannot be evaluated at
    /// `w = 0` even when the limit exists.
    pub fn from_north(north: Expr) -> Self {
        let mut b = ExprBuilder::new();
        let w = b.var();
        let one = b.real(1.0);
        let inv = b.div(one, w);
        let fn_inv = b.import_with(&north, inv);
        let w2 = b.powi(w, 2);
        let prod = b.mul(w2, fn_inv);
        let root = b.neg(prod);
        let south = b.finish(root);
        Self::new(north, south)
    }

    pub fn expr(&self, chart: Chart) -> &Expr {
        match chart {
            Chart::N => &self.north.f,
            Chart::S => &self.south.f,
        }
    }

    pub fn is_holomorphic(&self) -> bool {
        self.north.f.is_holomorphic() && self.south.f.is_holomorphic()
    }

    pub fn eval(&self, cp: &ChartPoint) -> Result<Complex, ExprError> {
        self.expr(cp.chart).eval(cp.xi)
    }

    /// Jets of `(ξ, F)` with the chart coordinate itself as parameter.
    pub fn param_jet(&self, cp: &ChartPoint, r: f64) -> Result<ParamJet, ExprError> {
        ParamJet::from_expr(self.expr(cp.chart), cp.xi, r)
    }

    /// Point at arclength `r` on the line over `cp`.
    pub fn realize(&self, cp: &ChartPoint, r: f64) -> Result<Vec3, ExprError> {
        let f = self.eval(cp)?;
        let p = phi_point(cp.xi, f, r);
        Ok(match cp.chart {
            Chart::N => p,
            Chart::S => p.flip(),
        })
    }

    pub fn line(&self, cp: &ChartPoint) -> Result<LineR3, ExprError> {
        let u = self.realize(cp, 0.0)?;
        Ok(LineR3 { u, w: cp.direction() })
    }

    /// The same congruence seen from an origin moved by `-tr`, i.e. every
    /// line moved by the translation vector.
    pub fn translate(&self, tr: &Translation) -> GlobalSection {
        let a = tr.alpha0;
        let t = Complex::new(tr.t0, 0.0);
        let north = add_quadratic(&self.north.f, 0.5 * a, -t, -0.5 * a.conj());
        let south = add_quadratic(&self.south.f, 0.5 * a.conj(), t, -0.5 * a);
        Self::new(north, south)
    }

    /// Largest relative violation of `F_S(w) = −w²·F_N(1/w)` over samples of
    /// the annulus `0.5 ≤ |w| ≤ 2`; infinite if either chart fails to evaluate.
    pub fn transition_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..9 {
            let radius = 0.5 * 4.0_f64.powf(f64::from(i) / 8.0);
            for j in 0..24 {
                let angle = (f64::from(j) + 0.37) * std::f64::consts::TAU / 24.0;
                let w = Complex::from_polar(radius, angle);
                let (Ok(fs), Ok(fnorth)) = (self.south.f.eval(w), self.north.f.eval(w.inv()))
                else {
                    return f64::INFINITY;
                };
                let expect = -w * w * fnorth;
                let res = (fs - expect).norm() / (1.0 + expect.norm());
                if !res.is_finite() {
                    return f64::INFINITY;
                }
                worst = worst.max(res);
            }
        }
        worst
    }
}

fn add_quadratic(e: &Expr, c0: Complex, c1: Complex, c2: Complex) -> Expr {
    let mut b = ExprBuilder::new();
    let base = b.import(e);
    let x = b.var();
    let k0 = b.constant(c0);
    let t1 = b.scale(c1, x);
    let x2 = b.powi(x, 2);
    let t2 = b.scale(c2, x2);
    let root = b.sum(&[base, k0, t1, t2]);
    b.finish(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{family_mobius, line_from, point_sphere};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn auto_south_satisfies_transition() {
        let g = GlobalSection::from_north(Expr::parse("xi*conj(xi)^2 - 3 + i*xi").unwrap());
        assert!(g.transition_residual() < 1e-14);
        assert!(matches!(g.south.f.eval(c(0.0, 0.0)), Err(ExprError::DivisionByZero { .. })));
    }

    #[test]
    fn wrong_south_is_detected() {
        let g = GlobalSection::new(Expr::parse("xi").unwrap(), Expr::parse("xi").unwrap());
        assert!(g.transition_residual() > 0.1);
    }

    #[test]
    fn charts_realize_the_same_line() {
        let g = family_mobius(c(0.3, -0.2), c(0.1, 1.0), c(-0.4, 0.25));
        for xi in [c(0.6, 0.9), c(-1.5, 0.2), c(1.0, -1.0)] {
            let pn = ChartPoint::north(xi);
            let ps = pn.to_chart(Chart::S).unwrap();
            for r in [-1.0, 0.0, 2.5] {
                let a = g.realize(&pn, r).unwrap();
                let b = g.realize(&ps, r).unwrap();
                assert!((a - b).norm() < 1e-12, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn north_line_matches_line_from() {
        let g = point_sphere(Vec3::new(1.0, -2.0, 0.5));
        let xi = c(0.4, -0.3);
        let l = g.line(&ChartPoint::north(xi)).unwrap();
        assert_eq!(l, line_from(xi, g.north.f.eval(xi).unwrap()));
    }

    #[test]
    fn translation_moves_lines() {
        let g = GlobalSection::from_north(Expr::parse("conj(xi)*xi^2 + 0.5").unwrap());
        let tr = Translation::new(c(0.7, -0.4), 1.3);
        let h = g.translate(&tr);
        assert!(h.transition_residual() < 1e-13);
        for cp in [ChartPoint::north(c(0.2, 0.5)), ChartPoint::south(c(-0.6, 0.1))] {
            let shift = tr.r_shift(&cp);
            for r in [-0.5, 0.0, 1.7] {
                let before = g.realize(&cp, r).unwrap();
                let after = h.realize(&cp, r + shift).unwrap();
                assert!((after - (before + tr.vector())).norm() < 1e-10);
            }
        }
    }
}
