//! Python bindings for the `clab` library.

use clab::complex_points::{index_sum, lines_through_point, ComplexPointError};
use clab::expr::Expr;
use clab::integrals::{gauss_bonnet, IntegralError};
use clab::model::{
    family_mobius, perturbed_rotation, point_sphere, Chart, ChartPoint, CongruenceSpec, GlobalSection,
    Translation, Vec3,
};
use clab::sachs::{evolve_closed_form, integrate_rk4, SachsInitialData};
use clab::spin::{null_frame, spin};
use clab::surface::{mesh, reconstruct, Rect, TWIST_TOL};
use num_complex::Complex64 as Complex;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn chart(name: &str) -> PyResult<Chart> {
    match name {
        "N" | "n" => Ok(Chart::N),
        "S" | "s" => Ok(Chart::S),
        other => Err(PyValueError::new_err(format!("unknown chart `{other}`, expected 'N' or 'S'"))),
    }
}

fn point(chart_name: &str, xi: Complex) -> PyResult<ChartPoint> {
    Ok(ChartPoint::new(chart(chart_name)?, xi))
}

fn chart_name(c: Chart) -> &'static str {
    match c {
        Chart::N => "N",
        Chart::S => "S",
    }
}

fn vec3(v: Vec3) -> (f64, f64, f64) {
    (v.x, v.y, v.z)
}

/// Evaluates an expression in `xi` with its Wirtinger derivatives.
#[pyfunction]
fn eval_jet(expr: &str, xi: Complex) -> PyResult<(Complex, Complex, Complex)> {
    let e = Expr::parse(expr).map_err(value_err)?;
    let j = e.eval_jet(xi).map_err(value_err)?;
    Ok((j.value, j.d, j.dbar))
}

/// `(rho, sigma)` at arclength `r` from the values at `r = 0`.
#[pyfunction]
fn sachs_closed_form(rho0: Complex, sigma0: Complex, r: f64) -> PyResult<(Complex, Complex)> {
    evolve_closed_form(&SachsInitialData::new(rho0, sigma0), r).map_err(runtime_err)
}

#[pyfunction]
#[pyo3(signature = (rho0, sigma0, r_end, steps=2000))]
fn sachs_rk4(rho0: Complex, sigma0: Complex, r_end: f64, steps: usize) -> PyResult<(Complex, Complex)> {
    if steps == 0 {
        return Err(PyValueError::new_err("steps must be positive"));
    }
    integrate_rk4(&SachsInitialData::new(rho0, sigma0), r_end, steps).map_err(runtime_err)
}

#[pyfunction]
fn focal_points(rho0: Complex, sigma0: Complex) -> Vec<f64> {
    SachsInitialData::new(rho0, sigma0).focal_points()
}

/// Runs the command-line front end with the given arguments; returns the exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    clab::cli::run(std::iter::once("clab".to_string()).chain(args))
}

/// A line congruence given as a global section in two charts.
#[pyclass(name = "Congruence", frozen)]
struct PyCongruence {
    inner: GlobalSection,
}

#[pymethods]
impl PyCongruence {
    /// Builds a congruence from a JSON spec.
    #[staticmethod]
    #[pyo3(signature = (spec, seed=0))]
    fn from_spec(spec: &str, seed: u64) -> PyResult<Self> {
        let s = CongruenceSpec::from_json(spec).map_err(value_err)?;
        Ok(Self { inner: s.build(seed).map_err(value_err)? })
    }

    #[staticmethod]
    fn point_sphere(p: (f64, f64, f64)) -> Self {
        Self { inner: point_sphere(Vec3::new(p.0, p.1, p.2)) }
    }

    #[staticmethod]
    #[pyo3(signature = (a=Complex::new(0.0, 0.0), b=Complex::new(0.0, 0.0), c=Complex::new(0.0, 0.0)))]
    fn mobius(a: Complex, b: Complex, c: Complex) -> Self {
        Self { inner: family_mobius(a, b, c) }
    }

    #[staticmethod]
    fn perturbed_rotation(epsilon: f64) -> Self {
        Self { inner: perturbed_rotation(epsilon) }
    }

    /// Custom section; the south chart defaults to the transition rule.
    #[staticmethod]
    #[pyo3(signature = (north, south=None))]
    fn custom(north: &str, south: Option<&str>) -> PyResult<Self> {
        let n = Expr::parse(north).map_err(value_err)?;
        let inner = match south {
            None => GlobalSection::from_north(n),
            Some(s) => GlobalSection::new(n, Expr::parse(s).map_err(value_err)?),
        };
        Ok(Self { inner })
    }

    fn transition_residual(&self) -> f64 {
        self.inner.transition_residual()
    }

    fn is_holomorphic(&self) -> bool {
        self.inner.is_holomorphic()
    }

    fn eval(&self, chart: &str, xi: Complex) -> PyResult<Complex> {
        self.inner.eval(&point(chart, xi)?).map_err(value_err)
    }

    /// Point at arclength `r` on the line with direction coordinate `xi`.
    fn realize(&self, chart: &str, xi: Complex, r: f64) -> PyResult<(f64, f64, f64)> {
        Ok(vec3(self.inner.realize(&point(chart, xi)?, r).map_err(value_err)?))
    }

    /// `(U, W)`: perpendicular foot and unit direction.
    fn line(&self, chart: &str, xi: Complex) -> PyResult<((f64, f64, f64), (f64, f64, f64))> {
        let l = self.inner.line(&point(chart, xi)?).map_err(value_err)?;
        Ok((vec3(l.u), vec3(l.w)))
    }

    fn translate(&self, t: (f64, f64, f64)) -> Self {
        Self { inner: self.inner.translate(&Translation::from_vector(Vec3::new(t.0, t.1, t.2))) }
    }

    /// `rho`, `sigma`, `K`, `delta` and the invariant derivatives.
    fn spin<'py>(&self, py: Python<'py>, chart: &str, xi: Complex, r: f64) -> PyResult<Bound<'py, PyDict>> {
        let pj = self.inner.param_jet(&point(chart, xi)?, r).map_err(value_err)?;
        let sd = spin(&pj).map_err(runtime_err)?;
        let d = PyDict::new(py);
        d.set_item("dplus_f", sd.dplus_f)?;
        d.set_item("dminus_f", sd.dminus_f)?;
        d.set_item("delta", sd.delta)?;
        d.set_item("rho", sd.rho)?;
        d.set_item("sigma", sd.sigma)?;
        d.set_item("k", sd.k)?;
        Ok(d)
    }

    fn null_frame<'py>(&self, py: Python<'py>, chart: &str, xi: Complex, r: f64) -> PyResult<Bound<'py, PyDict>> {
        let pj = self.inner.param_jet(&point(chart, xi)?, r).map_err(value_err)?;
        let fr = null_frame(&pj).map_err(runtime_err)?;
        let d = PyDict::new(py);
        d.set_item("alpha", fr.alpha)?;
        d.set_item("beta", fr.beta)?;
        d.set_item("omega", fr.omega)?;
        d.set_item("phase", fr.phase)?;
        Ok(d)
    }

    /// Total curvature by Gauss-Legendre quadrature over the sphere.
    #[pyo3(signature = (n_theta=64, n_phi=128, r=None))]
    fn gauss_bonnet(&self, n_theta: usize, n_phi: usize, r: Option<f64>) -> PyResult<f64> {
        if n_theta < 8 || n_phi < 8 {
            return Err(PyValueError::new_err("grid sizes must be at least 8"));
        }
        let r = match r {
            Some(r) => r,
            None => clab::complex_points::probe_slice(&self.inner).map_err(value_err)?,
        };
        gauss_bonnet(&self.inner, n_theta, n_phi, r).map_err(|e| match e {
            IntegralError::NonGlobalSection { .. } => value_err(e),
            other => runtime_err(other),
        })
    }

    /// Complex points with their indices.
    #[pyo3(signature = (grid=48))]
    fn index_sum<'py>(&self, py: Python<'py>, grid: usize) -> PyResult<Bound<'py, PyDict>> {
        if grid < 8 {
            return Err(PyValueError::new_err("grid must be at least 8"));
        }
        let rep = index_sum(&self.inner, grid).map_err(|e| match e {
            ComplexPointError::NonGlobalSection { .. } => value_err(e),
            other => runtime_err(other),
        })?;
        let zeros: Vec<(&str, Complex, i32, f64)> =
            rep.zeros.iter().map(|z| (chart_name(z.point.chart), z.point.xi, z.index, z.residual)).collect();
        let d = PyDict::new(py);
        d.set_item("zeros", zeros)?;
        d.set_item("total_index", rep.total_index)?;
        d.set_item("degenerate", rep.degenerate)?;
        d.set_item("probe_r", rep.probe_r)?;
        Ok(d)
    }

    /// Directions `(chart, xi)` of the lines through `p`, and the pencil flag.
    #[pyo3(signature = (p, grid=32))]
    fn lines_through_point(&self, p: (f64, f64, f64), grid: usize) -> PyResult<(Vec<(&'static str, Complex)>, bool)> {
        let found = lines_through_point(&self.inner, Vec3::new(p.0, p.1, p.2), grid).map_err(runtime_err)?;
        Ok((found.directions.iter().map(|d| (chart_name(d.chart), d.xi)).collect(), found.degenerate))
    }

    /// Orthogonal surface over a chart rectangle `(u0, u1, v0, v1)`.
    #[pyo3(signature = (chart="N", rect=(-1.0, 1.0, -1.0, 1.0), n=33, r0=0.0, twist_tol=TWIST_TOL))]
    fn surface<'py>(
        &self,
        py: Python<'py>,
        chart: &str,
        rect: (f64, f64, f64, f64),
        n: usize,
        r0: f64,
        twist_tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        if n < 2 {
            return Err(PyValueError::new_err("n must be at least 2"));
        }
        let field = reconstruct(&self.inner, self::chart(chart)?, Rect::new(rect.0, rect.1, rect.2, rect.3), n, r0, twist_tol)
            .map_err(runtime_err)?;
        let m = mesh(&self.inner, &field).map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("r", field.values.clone())?;
        d.set_item("vertices", m.vertices.iter().map(|v| vec3(*v)).collect::<Vec<_>>())?;
        d.set_item("triangles", m.triangles.clone())?;
        d.set_item("path_residual", field.path_residual)?;
        Ok(d)
    }
}

#[pymodule]
fn pyclab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCongruence>()?;
    m.add_function(wrap_pyfunction!(eval_jet, m)?)?;
    m.add_function(wrap_pyfunction!(sachs_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(sachs_rk4, m)?)?;
    m.add_function(wrap_pyfunction!(focal_points, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
