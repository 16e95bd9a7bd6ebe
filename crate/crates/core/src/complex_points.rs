//! Complex (shear-free) lines, their indices, and the lines of a congruence
//! through a given point.
//!
//! With `ν = ξ` the shear is `σ = −conj(∂̄F)/D`, so complex points are the
//! zeros of `∂̄F`. Zeros are bracketed on a cell-centred grid over
//! `[−2, 2]²` in both charts, polished by damped Newton with the exact
//! real Jacobian, and merged across the chart overlap.

use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{Expr, ExprError, Wirtinger};
use crate::jet::Jet1;
use crate::model::{Chart, ChartPoint, GlobalSection, Translation, Vec3, TRANSITION_TOL};
use crate::spin::{invariant_derivatives, spin, SpinError};

/// Fraction of grid nodes below tolerance that marks a zero set as non-isolated.
pub const DEGENERATE_FRACTION: f64 = 0.05;
/// Default tolerance on `|∂̄F|` (and so on `|σ|`) at a complex point.
pub const SHEAR_TOL: f64 = 1e-10;
const HALF_WIDTH: f64 = 2.0;
const MAX_SAMPLES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexPointError {
    #[error("shear vanishes on {fraction:.1}% of grid nodes: complex points are not isolated", fraction = 100.0 * fraction)]
    DegenerateShear { fraction: f64 },
    #[error("function vanishes on the contour at {at:?}")]
    ZeroOnContour { at: ChartPoint },
    #[error("winding number did not converge with {samples} samples")]
    NonConvergent { samples: usize },
    #[error("not a global section: transition residual {residual:e}")]
    NonGlobalSection { residual: f64 },
    #[error(transparent)]
    Frame(#[from] SpinError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A complex point with its index and `|σ|` at the probe slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexPoint {
    pub point: ChartPoint,
    pub index: i32,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexPointReport {
    pub zeros: Vec<ComplexPoint>,
    /// Sum of the indices; `None` when the zeros are not isolated.
    pub total_index: Option<i32>,
    pub degenerate: bool,
    /// Arclength of the focal-free slice used for `σ`.
    pub probe_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinesThroughPoint {
    pub directions: Vec<ChartPoint>,
    /// Every direction is a solution (the congruence is the pencil through the point).
    pub degenerate: bool,
}

/// Result of scanning a complex function on both charts.
struct Scan {
    zeros: Vec<ChartPoint>,
    below_tol: f64,
    best: Option<(ChartPoint, f64)>,
}

type ChartFn<'a> = dyn Fn(&ChartPoint) -> Result<Jet1, ExprError> + Sync + 'a;

fn node(i: usize, grid: usize) -> f64 {
    -HALF_WIDTH + (i as f64 + 0.5) * 2.0 * HALF_WIDTH / grid as f64
}

fn scan(f: &ChartFn<'_>, grid: usize, tol: f64) -> Scan {
    let mut zeros = Vec::new();
    let mut below = 0usize;
    let mut best: Option<(ChartPoint, f64)> = None;
    for chart in [Chart::N, Chart::S] {
        let values: Vec<Vec<Option<Complex>>> = (0..grid)
            .into_par_iter()
            .map(|j| {
                (0..grid)
                    .map(|i| {
                        let cp = ChartPoint::new(chart, Complex::new(node(i, grid), node(j, grid)));
                        f(&cp).ok().map(|jet| jet.value).filter(|v| v.is_finite())
                    })
                    .collect()
            })
            .collect();
        for (j, row) in values.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    let m = v.norm();
                    if m <= tol {
                        below += 1;
                    }
                    if best.is_none_or(|(_, b)| m < b) {
                        let cp = ChartPoint::new(chart, Complex::new(node(i, grid), node(j, grid)));
                        best = Some((cp, m));
                    }
                }
            }
        }
        let h = 2.0 * HALF_WIDTH / grid as f64;
        let found: Vec<ChartPoint> = (0..grid - 1)
            .into_par_iter()
            .flat_map_iter(|j| {
                let values = &values;
                (0..grid - 1).filter_map(move |i| {
                    let corners = [values[j][i], values[j][i + 1], values[j + 1][i], values[j + 1][i + 1]];
                    let corners: Option<Vec<Complex>> = corners.into_iter().collect();
                    let corners = corners?;
                    let brackets = |part: fn(&Complex) -> f64| {
                        corners.iter().any(|c| part(c) <= 0.0) && corners.iter().any(|c| part(c) > 0.0)
                    };
                    if !(brackets(|c| c.re) && brackets(|c| c.im)) {
                        return None;
                    }
                    let centre = Complex::new(node(i, grid) + 0.5 * h, node(j, grid) + 0.5 * h);
                    polish(f, ChartPoint::new(chart, centre), h, tol)
                })
            })
            .collect();
        zeros.extend(found);
    }
    let total = (2 * grid * grid) as f64;
    Scan { zeros, below_tol: below as f64 / total, best }
}

/// Damped Newton on `(Re f, Im f)`. Returns the point and `|f|` there.
fn newton(f: &ChartFn<'_>, start: ChartPoint) -> Option<(ChartPoint, f64)> {
    let chart = start.chart;
    let at = |z: Complex| f(&ChartPoint::new(chart, z)).ok().filter(|j| j.value.is_finite());
    let mut z = start.xi;
    let mut jet = at(z)?;
    for _ in 0..80 {
        let g = jet.value;
        let gu = jet.du();
        let gv = jet.dv();
        let det = gu.re * gv.im - gv.re * gu.im;
        if !(det.abs() > 1e-14 * (gu.norm_sqr() + gv.norm_sqr())) {
            break;
        }
        let step = Complex::new((-g.re * gv.im + gv.re * g.im) / det, (-gu.re * g.im + gu.im * g.re) / det);
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda > 1e-6 {
            let trial = z + lambda * step;
            if let Some(tj) = at(trial) {
                if tj.value.norm() < g.norm() {
                    accepted = Some((trial, tj));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((nz, nj)) = accepted else { break };
        let moved = (nz - z).norm();
        z = nz;
        jet = nj;
        if moved <= 1e-15 * (1.0 + z.norm()) || jet.value.norm() == 0.0 {
            break;
        }
    }
    Some((ChartPoint::new(chart, z), jet.value.norm()))
}

/// Newton from the cell centre; if that stalls, shrink onto the smallest
/// `|f|` of an 8×8 subgrid and try again.
fn polish(f: &ChartFn<'_>, start: ChartPoint, cell: f64, tol: f64) -> Option<ChartPoint> {
    let accept = |(p, r): (ChartPoint, f64)| (r <= tol && p.xi.norm() <= 1.25 * HALF_WIDTH).then_some(p);
    if let Some(p) = newton(f, start).and_then(accept) {
        return Some(p);
    }
    let mut centre = start.xi;
    let mut width = cell;
    let mut best = (start, f64::INFINITY);
    for _ in 0..10 {
        for a in 0..8 {
            for b in 0..8 {
                let z = centre
                    + Complex::new((a as f64 - 3.5) / 8.0 * width, (b as f64 - 3.5) / 8.0 * width);
                let cp = ChartPoint::new(start.chart, z);
                if let Ok(j) = f(&cp) {
                    let m = j.value.norm();
                    if m < best.1 {
                        best = (cp, m);
                    }
                }
            }
        }
        centre = best.0.xi;
        width /= 4.0;
    }
    newton(f, best.0).and_then(accept).or_else(|| accept(best))
}

/// Canonical charts, merged within `radius` (chordal), sorted by chart then `(u, v)`.
fn dedupe(points: Vec<ChartPoint>, radius: f64) -> Vec<ChartPoint> {
    let mut out: Vec<ChartPoint> = Vec::new();
    for p in points.into_iter().map(|p| p.canonical()) {
        if !out.iter().any(|q| q.chordal_distance(&p) < radius) {
            out.push(p);
        }
    }
    out.sort_by(|a, b| {
        a.chart
            .cmp(&b.chart)
            .then(a.xi.re.total_cmp(&b.xi.re))
            .then(a.xi.im.total_cmp(&b.xi.im))
    });
    out
}

/// Arclength of a slice on which `D < 0` with `|D| ≥ 1` at the sampled
/// points, so `σ` there is finite and its phase is that of `−conj(∂̄F)`.
pub fn probe_slice(sec: &GlobalSection) -> Result<f64, ExprError> {
    let mut worst = 0.0_f64;
    for chart in [Chart::N, Chart::S] {
        for j in 0..24 {
            for i in 0..24 {
                let z = Complex::new(node(i, 24) * 0.625, node(j, 24) * 0.625);
                let pj = sec.param_jet(&ChartPoint::new(chart, z), 0.0)?;
                let (p, m) = invariant_derivatives(&pj);
                worst = worst.max(p.norm() + m.norm());
            }
        }
    }
    Ok(2.0 * worst + 1.0)
}

fn shear_fn(sec: &GlobalSection) -> impl Fn(&ChartPoint) -> Result<Jet1, ExprError> + Sync {
    let gn = sec.north.f.wirtinger(Wirtinger::Dbar);
    let gs = sec.south.f.wirtinger(Wirtinger::Dbar);
    move |cp: &ChartPoint| match cp.chart {
        Chart::N => gn.eval_jet(cp.xi),
        Chart::S => gs.eval_jet(cp.xi),
    }
}

/// Isolated zeros of the shear over the whole sphere.
pub fn shear_zeros(sec: &GlobalSection, grid: usize, tol: f64) -> Result<Vec<ChartPoint>, ComplexPointError> {
    assert!(grid >= 8, "grid must be at least 8");
    let grid = grid + grid % 2;
    let f = shear_fn(sec);
    let s = scan(&f, grid, tol);
    if s.below_tol > DEGENERATE_FRACTION {
        return Err(ComplexPointError::DegenerateShear { fraction: s.below_tol });
    }
    Ok(dedupe(s.zeros, 2.0 / grid as f64))
}

/// Winding number of `f` around the circle `centre + radius·e^{it}`.
///
/// Starts at `samples` points and doubles until every argument increment is
/// below `π/2`.
pub fn contour_winding<E>(
    f: impl Fn(&ChartPoint) -> Result<Complex, E>,
    centre: &ChartPoint,
    radius: f64,
    samples: usize,
    tol: f64,
) -> Result<i32, ComplexPointError>
where
    ComplexPointError: From<E>,
{
    let mut n = samples.max(4);
    loop {
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            let cp = ChartPoint::new(centre.chart, centre.xi + Complex::from_polar(radius, t));
            let v = f(&cp)?;
            if !(v.norm() >= tol) {
                return Err(ComplexPointError::ZeroOnContour { at: cp });
            }
            values.push(v);
        }
        let mut total = 0.0;
        let mut fine = true;
        for k in 0..n {
            let inc = (values[(k + 1) % n] / values[k]).arg();
            if inc.abs() >= std::f64::consts::FRAC_PI_2 {
                fine = false;
                break;
            }
            total += inc;
        }
        if fine {
            return Ok((total / std::f64::consts::TAU).round() as i32);
        }
        if n >= MAX_SAMPLES {
            return Err(ComplexPointError::NonConvergent { samples: n });
        }
        n *= 2;
    }
}

/// Index of a complex point: the winding of `σ̄` on the slice `r`.
pub fn winding_index_at(
    sec: &GlobalSection,
    centre: &ChartPoint,
    radius: f64,
    samples: usize,
    r: f64,
) -> Result<i32, ComplexPointError> {
    let sigma_bar = |cp: &ChartPoint| -> Result<Complex, ComplexPointError> {
        Ok(spin(&sec.param_jet(cp, r)?)?.sigma.conj())
    };
    contour_winding(sigma_bar, centre, radius, samples, 1e-14)
}

/// [`winding_index_at`] on the probe slice.
pub fn winding_index(
    sec: &GlobalSection,
    centre: &ChartPoint,
    radius: f64,
    samples: usize,
) -> Result<i32, ComplexPointError> {
    winding_index_at(sec, centre, radius, samples, probe_slice(sec)?)
}

/// Contour radius for a zero: well inside the punctured disc free of other zeros.
pub fn contour_radius(zero: &ChartPoint, others: &[ChartPoint]) -> f64 {
    let nearest = others
        .iter()
        .filter_map(|o| o.to_chart(zero.chart))
        .map(|o| (o.xi - zero.xi).norm())
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    (0.3 * nearest).min(0.1)
}

/// All complex points with their indices and the index total.
pub fn index_sum(sec: &GlobalSection, grid: usize) -> Result<ComplexPointReport, ComplexPointError> {
    let residual = sec.transition_residual();
    if !(residual <= TRANSITION_TOL) {
        return Err(ComplexPointError::NonGlobalSection { residual });
    }
    let probe_r = probe_slice(sec)?;
    let zeros = match shear_zeros(sec, grid, SHEAR_TOL) {
        Ok(z) => z,
        Err(ComplexPointError::DegenerateShear { .. }) => {
            return Ok(ComplexPointReport { zeros: Vec::new(), total_index: None, degenerate: true, probe_r });
        }
        Err(e) => return Err(e),
    };
    let mut out = Vec::with_capacity(zeros.len());
    for z in &zeros {
        let radius = contour_radius(z, &zeros);
        let index = winding_index_at(sec, z, radius, 64, probe_r)?;
        let residual = spin(&sec.param_jet(z, probe_r)?)?.sigma.norm();
        out.push(ComplexPoint { point: *z, index, residual });
    }
    let total = out.iter().map(|z| z.index).sum();
    Ok(ComplexPointReport { zeros: out, total_index: Some(total), degenerate: false, probe_r })
}

/// Directions of the lines of `sec` through `p`.
pub fn lines_through_point(
    sec: &GlobalSection,
    p: Vec3,
    grid: usize,
) -> Result<LinesThroughPoint, ComplexPointError> {
    let moved = sec.translate(&Translation::from_vector(-p));
    let tol = 1e-9 * (1.0 + p.norm());
    let (north, south): (&Expr, &Expr) = (&moved.north.f, &moved.south.f);
    let f = move |cp: &ChartPoint| match cp.chart {
        Chart::N => north.eval_jet(cp.xi),
        Chart::S => south.eval_jet(cp.xi),
    };
    let grid = grid.max(8) + grid % 2;
    let s = scan(&f, grid, tol);
    if s.below_tol > DEGENERATE_FRACTION {
        return Ok(LinesThroughPoint { directions: Vec::new(), degenerate: true });
    }
    let mut zeros = s.zeros;
    if zeros.is_empty() {
        if let Some((start, _)) = s.best {
            let h = 2.0 * HALF_WIDTH / grid as f64;
            zeros.extend(polish(&f, start, h, tol));
        }
    }
    Ok(LinesThroughPoint { directions: dedupe(zeros, 2.0 / grid as f64), degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{family_mobius, perturbed_rotation, point_sphere};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn synthetic_windings() {
        let nu0 = c(0.3, -0.2);
        let centre = ChartPoint::north(nu0);
        let conj_model = |cp: &ChartPoint| Ok::<_, ExprError>((cp.xi - nu0).conj());
        // σ = conj(ν − ν₀) so σ̄ = ν − ν₀ winds once
        let sigma_bar = |cp: &ChartPoint| conj_model(cp).map(|s| s.conj());
        assert_eq!(contour_winding(sigma_bar, &centre, 0.1, 64, 1e-14), Ok(1));
        let sq = |cp: &ChartPoint| Ok::<_, ExprError>(((cp.xi - nu0) * (cp.xi - nu0)).conj());
        assert_eq!(contour_winding(sq, &centre, 0.1, 64, 1e-14), Ok(-2));
        assert_eq!(contour_winding(sq, &centre, 0.05, 64, 1e-14), Ok(-2));
    }

    #[test]
    fn zero_on_contour() {
        let f = |cp: &ChartPoint| Ok::<_, ExprError>(cp.xi - c(0.1, 0.0));
        assert!(matches!(
            contour_winding(f, &ChartPoint::north(c(0.0, 0.0)), 0.1, 64, 1e-14),
            Err(ComplexPointError::ZeroOnContour { .. })
        ));
    }

    #[test]
    fn holomorphic_is_degenerate() {
        let g = family_mobius(c(0.2, 0.0), c(0.0, 1.0), c(-0.1, 0.0));
        assert!(matches!(shear_zeros(&g, 32, SHEAR_TOL), Err(ComplexPointError::DegenerateShear { .. })));
        let rep = index_sum(&g, 32).unwrap();
        assert!(rep.degenerate && rep.total_index.is_none());
    }

    #[test]
    fn perturbed_rotation_has_four_unit_points() {
        let g = perturbed_rotation(0.3);
        let rep = index_sum(&g, 64).unwrap();
        assert_eq!(rep.zeros.len(), 4, "{rep:?}");
        assert_eq!(rep.total_index, Some(4));
        for z in &rep.zeros {
            assert_eq!(z.index, 1);
            assert!(z.residual < 1e-10);
            assert!((z.point.xi.norm() - (2.0_f64.sqrt() - 1.0)).abs() < 1e-9, "{:?}", z.point);
        }
    }

    #[test]
    fn lines_through_points_of_a_point_sphere() {
        let q = Vec3::new(1.0, -0.5, 0.25);
        let g = point_sphere(q);
        assert!(lines_through_point(&g, q, 32).unwrap().degenerate);
        let p = Vec3::new(-0.3, 0.8, 1.1);
        let res = lines_through_point(&g, p, 32).unwrap();
        assert_eq!(res.directions.len(), 2);
        let axis = (p - q).normalized();
        for d in &res.directions {
            assert!((d.direction().dot(axis).abs() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rotation_axis() {
        let g = family_mobius(c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
        let res = lines_through_point(&g, Vec3::ZERO, 32).unwrap();
        assert_eq!(res.directions.len(), 2);
        assert!(res.directions.iter().all(|d| d.xi.norm() < 1e-12));
        assert_eq!(res.directions[0].chart, Chart::N);
        assert_eq!(res.directions[1].chart, Chart::S);
    }
}
