//! Orthogonal surfaces of twist-free congruences.
//!
//! With `ν` the chart coordinate, `∂̄r = 2F/(1+ξξ̄)²` and, since `r` is
//! real, `∂r = conj(∂̄r)`. So `r_u = 2 Re g`, `r_v = 2 Im g` with `g = ∂̄r`.

use std::io::{self, Write};

use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex_points::probe_slice;
use crate::expr::ExprError;
use crate::jet::Jet1;
use crate::model::{Chart, ChartPoint, GlobalSection, Vec3};
use crate::quadrature::gauss_legendre_on;
use crate::spin::{spin, ParamJet, SpinError};

/// Default bound on `|Im ρ|` for a congruence to count as twist-free.
pub const TWIST_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("congruence is twisting: max |Im rho| = {max_im_rho:e}")]
    NotIntegrable { max_im_rho: f64 },
    #[error("row and column integration differ by {residual:e} (bound {bound:e})")]
    PathInconsistent { residual: f64, bound: f64 },
    #[error(transparent)]
    Frame(#[from] SpinError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Axis-aligned rectangle `[u0, u1] × [v0, v1]` in a chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Self { u0, u1, v0, v1 }
    }

    pub fn square(half: f64) -> Self {
        Self::new(-half, half, -half, half)
    }
}

/// `r(ν)` on an `n × n` grid, row-major in `v` then `u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarField {
    pub chart: Chart,
    pub rect: Rect,
    pub n: usize,
    pub r0: f64,
    pub values: Vec<f64>,
    /// Largest difference between the row-first and column-first sweeps.
    pub path_residual: f64,
    /// `∫∫ |curl|` of the gradient field, which bounds the path residual.
    pub closedness_estimate: f64,
}

impl ScalarField {
    pub fn nu(&self, i: usize, j: usize) -> Complex {
        grid_nu(&self.rect, self.n, i, j)
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    pub fn point(&self, i: usize, j: usize) -> ChartPoint {
        ChartPoint::new(self.chart, self.nu(i, j))
    }
}

fn grid_nu(rect: &Rect, n: usize, i: usize, j: usize) -> Complex {
    let t = |k: usize| k as f64 / (n - 1) as f64;
    Complex::new(rect.u0 + (rect.u1 - rect.u0) * t(i), rect.v0 + (rect.v1 - rect.v0) * t(j))
}

fn gradient_jet(pj: &ParamJet) -> Jet1 {
    let s = pj.xi * pj.xi.conj() + 1.0;
    pj.f * 2.0 / (s * s)
}

/// `∂̄r = (2F·∂̄ξ̄ + 2F̄·∂̄ξ)/(1+ξξ̄)²` at a parameter jet.
pub fn surface_gradient_jet(pj: &ParamJet) -> Complex {
    let f = pj.f.value;
    let s = pj.s();
    (2.0 * f * pj.xi.d.conj() + 2.0 * f.conj() * pj.xi.dbar) / (s * s)
}

/// `∂̄r` with the chart coordinate as parameter.
pub fn surface_gradient(sec: &GlobalSection, cp: &ChartPoint) -> Result<Complex, ExprError> {
    Ok(surface_gradient_jet(&sec.param_jet(cp, 0.0)?))
}

/// `(r_u, r_v)` at `ν`.
fn slope(sec: &GlobalSection, chart: Chart, nu: Complex) -> Result<(f64, f64), ExprError> {
    let g = surface_gradient(sec, &ChartPoint::new(chart, nu))?;
    Ok((2.0 * g.re, 2.0 * g.im))
}

/// `∫ dr` along the straight segment `a → b` (axis-aligned) by 8-point Gauss–Legendre.
fn segment(sec: &GlobalSection, chart: Chart, a: Complex, b: Complex) -> Result<f64, ExprError> {
    let (ts, ws) = gauss_legendre_on(8, 0.0, 1.0);
    let d = b - a;
    let mut acc = 0.0;
    for (t, w) in ts.iter().zip(&ws) {
        let (ru, rv) = slope(sec, chart, a + d * *t)?;
        acc += w * (ru * d.re + rv * d.im);
    }
    Ok(acc)
}

fn sweep(sec: &GlobalSection, chart: Chart, rect: &Rect, n: usize, r0: f64, rows_first: bool) -> Result<Vec<f64>, ExprError> {
    let at = |i: usize, j: usize| if rows_first { grid_nu(rect, n, i, j) } else { grid_nu(rect, n, j, i) };
    // spine along the first line, then every line independently
    let mut spine = vec![r0; n];
    for k in 1..n {
        spine[k] = spine[k - 1] + segment(sec, chart, at(0, k - 1), at(0, k))?;
    }
    let lines: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut line = vec![spine[k]; n];
            for m in 1..n {
                line[m] = line[m - 1] + segment(sec, chart, at(m - 1, k), at(m, k))?;
            }
            Ok(line)
        })
        .collect::<Result<_, ExprError>>()?;
    let mut values = vec![0.0; n * n];
    for (k, line) in lines.iter().enumerate() {
        for (m, &r) in line.iter().enumerate() {
            let (i, j) = if rows_first { (m, k) } else { (k, m) };
            values[j * n + i] = r;
        }
    }
    Ok(values)
}

/// `∫∫ 4|Im ∂g| du dv` by the midpoint rule on the grid cells.
fn closedness_estimate(sec: &GlobalSection, chart: Chart, rect: &Rect, n: usize) -> Result<f64, ExprError> {
    let du = (rect.u1 - rect.u0) / (n - 1) as f64;
    let dv = (rect.v1 - rect.v0) / (n - 1) as f64;
    let mut acc = 0.0;
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let nu = grid_nu(rect, n, i, j) + Complex::new(0.5 * du, 0.5 * dv);
            let g = gradient_jet(&sec.param_jet(&ChartPoint::new(chart, nu), 0.0)?);
            acc += 4.0 * g.d.im.abs() * du * dv;
        }
    }
    Ok(acc)
}

/// Integrates `r` from `r(u0, v0) = r0` without checking the twist.
pub fn integrate_field(
    sec: &GlobalSection,
    chart: Chart,
    rect: Rect,
    n: usize,
    r0: f64,
) -> Result<ScalarField, ExprError> {
    assert!(n >= 2, "need at least a 2 x 2 grid");
    let values = sweep(sec, chart, &rect, n, r0, true)?;
    let oracle = sweep(sec, chart, &rect, n, r0, false)?;
    let path_residual = values.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let closedness_estimate = closedness_estimate(sec, chart, &rect, n)?;
    Ok(ScalarField { chart, rect, n, r0, values, path_residual, closedness_estimate })
}

/// Largest `|Im ρ|` over the grid nodes, on a focal-free slice.
pub fn max_twist(sec: &GlobalSection, chart: Chart, rect: &Rect, n: usize) -> Result<f64, SurfaceError> {
    let r = probe_slice(sec)?;
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            let sd = spin(&sec.param_jet(&ChartPoint::new(chart, grid_nu(rect, n, i, j)), r)?)?;
            worst = worst.max(sd.rho.im.abs());
        }
    }
    Ok(worst)
}

/// Orthogonal surface through `r(u0, v0) = r0` over a chart rectangle.
pub fn reconstruct(
    sec: &GlobalSection,
    chart: Chart,
    rect: Rect,
    n: usize,
    r0: f64,
    twist_tol: f64,
) -> Result<ScalarField, SurfaceError> {
    let max_im_rho = max_twist(sec, chart, &rect, n)?;
    if max_im_rho > twist_tol {
        return Err(SurfaceError::NotIntegrable { max_im_rho });
    }
    let field = integrate_field(sec, chart, rect, n, r0)?;
    let scale = field.values.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let bound = 10.0 * field.closedness_estimate + 1e-9 * (1.0 + scale);
    if field.path_residual > bound {
        return Err(SurfaceError::PathInconsistent { residual: field.path_residual, bound });
    }
    Ok(field)
}

/// Triangle mesh over the grid of a [`ScalarField`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub n: usize,
    pub vertices: Vec<Vec3>,
    /// Counter-clockwise in `(u, v)`.
    pub triangles: Vec<[usize; 3]>,
}

pub fn mesh(sec: &GlobalSection, field: &ScalarField) -> Result<Mesh, ExprError> {
    let n = field.n;
    let mut vertices = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            vertices.push(sec.realize(&field.point(i, j), field.r(i, j))?);
        }
    }
    let mut triangles = Vec::with_capacity(2 * (n - 1) * (n - 1));
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let v00 = j * n + i;
            let v10 = v00 + 1;
            let v01 = v00 + n;
            let v11 = v01 + 1;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    Ok(Mesh { n, vertices, triangles })
}

impl Mesh {
    fn at(&self, i: usize, j: usize) -> Vec3 {
        self.vertices[j * self.n + i]
    }

    /// Unit normal at an interior vertex from fourth-order central
    /// differences along the grid; `None` within two vertices of the edge.
    pub fn grid_normal(&self, i: usize, j: usize) -> Option<Vec3> {
        if i < 2 || j < 2 || i + 2 >= self.n || j + 2 >= self.n {
            return None;
        }
        let d = |a: Vec3, b: Vec3, c: Vec3, e: Vec3| (b - c) * 8.0 - (a - e);
        let xu = d(self.at(i + 2, j), self.at(i + 1, j), self.at(i - 1, j), self.at(i - 2, j));
        let xv = d(self.at(i, j + 2), self.at(i, j + 1), self.at(i, j - 1), self.at(i, j - 2));
        Some(xu.cross(xv).normalized())
    }

    pub fn write_obj(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "# {} vertices, {} triangles", self.vertices.len(), self.triangles.len())?;
        for v in &self.vertices {
            writeln!(out, "v {:.17e} {:.17e} {:.17e}", v.x, v.y, v.z)?;
        }
        for t in &self.triangles {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{family_mobius, point_sphere};

    #[test]
    fn zero_section_gives_round_sphere() {
        let g = point_sphere(Vec3::ZERO);
        let field = reconstruct(&g, Chart::N, Rect::square(1.0), 9, 2.0, TWIST_TOL).unwrap();
        assert!(field.values.iter().all(|&r| r == 2.0));
        let m = mesh(&g, &field).unwrap();
        assert!(m.vertices.iter().all(|v| (v.norm() - 2.0).abs() < 1e-14));
        assert_eq!(m.vertices.len(), 81);
        assert_eq!(m.triangles.len(), 128);
    }

    #[test]
    fn gradient_of_point_sphere_is_dbar_of_support() {
        let p = Vec3::new(0.5, -1.0, 2.0);
        let g = point_sphere(p);
        let h = 1e-6;
        for xi in [Complex::new(0.3, 0.4), Complex::new(-0.8, 0.1)] {
            let support = |z: Complex| p.dot(crate::model::direction(z));
            let fu = (support(xi + h) - support(xi - h)) / (2.0 * h);
            let fv = (support(xi + Complex::new(0.0, h)) - support(xi - Complex::new(0.0, h))) / (2.0 * h);
            let dbar = 0.5 * Complex::new(fu, fv);
            let got = surface_gradient(&g, &ChartPoint::north(xi)).unwrap();
            assert!((got - dbar).norm() < 1e-9);
        }
    }

    #[test]
    fn rotation_is_not_integrable() {
        let g = family_mobius(Complex::new(0.0, 0.0), Complex::i(), Complex::new(0.0, 0.0));
        assert!(matches!(
            reconstruct(&g, Chart::N, Rect::square(0.5), 8, 1.0, TWIST_TOL),
            Err(SurfaceError::NotIntegrable { .. })
        ));
    }

    #[test]
    fn obj_output() {
        let g = point_sphere(Vec3::ZERO);
        let field = integrate_field(&g, Chart::S, Rect::square(0.5), 3, 1.0).unwrap();
        let m = mesh(&g, &field).unwrap();
        let mut buf = Vec::new();
        m.write_obj(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 9);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8);
        assert!(text.contains("f 1 2 5"));
    }
}
