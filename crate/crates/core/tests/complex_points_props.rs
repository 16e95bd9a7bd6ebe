//! Complex points: index stability, chart-seam bookkeeping and the lines
//! through a point.

mod common;

use clab::complex_points::{
    contour_radius, index_sum, lines_through_point, probe_slice, winding_index_at, SHEAR_TOL,
};
use clab::model::{
    family_mobius, family_tangent_field, perturbed_rotation, point_sphere, random_tangent_field,
    Chart, ChartPoint, GlobalSection, Monomial, TangentPoly, Vec3,
};
use common::*;

/// Gradient field of `⟨Ap, p⟩/2` with `A = diag(0, 144/169, 1)`: six critical
/// points, four of them shear-free lines at `ξ = ±3/2, ±2/3` on the real axis.
fn seam_family() -> GlobalSection {
    family_tangent_field(&TangentPoly::new(vec![
        Monomial { c: [0.0, 144.0 / 169.0, 0.0], e: [0, 1, 0] },
        Monomial { c: [0.0, 0.0, 1.0], e: [0, 0, 1] },
    ]))
    .unwrap()
}

fn assert_stable_indices(sec: &GlobalSection) -> i32 {
    let rep = index_sum(sec, 48).unwrap();
    assert!(!rep.degenerate);
    let zeros: Vec<ChartPoint> = rep.zeros.iter().map(|z| z.point).collect();
    for z in &rep.zeros {
        let radius = contour_radius(&z.point, &zeros);
        let half = winding_index_at(sec, &z.point, 0.5 * radius, 64, rep.probe_r).unwrap();
        let fine = winding_index_at(sec, &z.point, radius, 256, rep.probe_r).unwrap();
        assert_eq!((z.index, z.index), (half, fine), "unstable index at {:?}", z.point);
        assert!(z.residual < SHEAR_TOL);
        // the 2-form coefficient ∂ξ∂̄F − ∂̄ξ∂F reduces to ∂̄F for ν = ξ
        let pj = sec.param_jet(&z.point, 0.0).unwrap();
        let coeff = pj.xi.d * pj.f.dbar - pj.xi.dbar * pj.f.d;
        assert!(coeff.norm() < SHEAR_TOL, "{coeff}");
    }
    rep.total_index.unwrap()
}

#[test]
fn perturbed_rotation_indices_are_stable() {
    for eps in [0.1, 0.3, 0.6] {
        assert_eq!(assert_stable_indices(&perturbed_rotation(eps)), 4);
    }
}

#[test]
fn random_tangent_fields_total_four() {
    for seed in 0..4 {
        let g = random_tangent_field(seed, 0.4);
        assert_eq!(assert_stable_indices(&g), 4, "seed {seed}");
    }
}

#[test]
fn zero_near_the_seam_is_counted_once() {
    let g = seam_family();
    let rep = index_sum(&g, 48).unwrap();
    assert_eq!(rep.zeros.len(), 4, "{:?}", rep.zeros);
    let target = ChartPoint::north(c(1.5, 0.0));
    let hits = rep.zeros.iter().filter(|z| z.point.chordal_distance(&target) < 1e-6).count();
    assert_eq!(hits, 1);
    for (i, a) in rep.zeros.iter().enumerate() {
        for b in &rep.zeros[i + 1..] {
            assert!(a.point.chordal_distance(&b.point) > 0.1);
        }
    }
    assert_eq!(rep.total_index, Some(4));
    assert_eq!(assert_stable_indices(&g), 4);
}

#[test]
fn holomorphic_sections_are_flagged() {
    let rep = index_sum(&family_mobius(c(0.2, 0.0), c(0.0, 1.0), c(-0.1, 0.0)), 48).unwrap();
    assert!(rep.degenerate);
    assert_eq!(rep.total_index, None);
    assert!(rep.zeros.is_empty());
}

#[test]
fn probe_slice_is_focal_free() {
    for seed in 0..8 {
        let g = random_section(seed);
        let r = probe_slice(&g).unwrap();
        for i in 0..16 {
            for chart in [Chart::N, Chart::S] {
                let cp = ChartPoint::new(chart, c(-1.2 + 0.16 * i as f64, 0.3));
                assert!(clab::spin::spin(&g.param_jet(&cp, r).unwrap()).is_ok());
            }
        }
    }
}

#[test]
fn lines_through_random_points() {
    let sections = [
        point_sphere(Vec3::new(1.0, 2.0, 3.0)),
        family_mobius(c(0.2, 0.0), c(0.0, 1.0), c(-0.1, 0.0)),
        perturbed_rotation(0.3),
    ];
    let mut r = rng(11);
    for g in &sections {
        for _ in 0..50 {
            let p = random_vec(&mut r, 4.0);
            let found = lines_through_point(g, p, 32).unwrap();
            assert!(found.degenerate || !found.directions.is_empty());
            for d in &found.directions {
                let line = g.line(d).unwrap();
                assert!(line.distance_to(p) < 1e-7 * (1.0 + p.norm()));
            }
        }
    }
}

#[test]
fn two_points_determine_two_oriented_lines() {
    let q = Vec3::new(1.0, 2.0, 3.0);
    let g = point_sphere(q);
    assert!(lines_through_point(&g, q, 32).unwrap().degenerate);
    let p = Vec3::new(-0.5, 0.7, 1.1);
    let found = lines_through_point(&g, p, 32).unwrap();
    assert_eq!(found.directions.len(), 2);
    let u = (p - q).normalized();
    let mut dots: Vec<f64> = found.directions.iter().map(|d| d.direction().dot(u)).collect();
    dots.sort_by(f64::total_cmp);
    assert!((dots[0] + 1.0).abs() < 1e-9 && (dots[1] - 1.0).abs() < 1e-9, "{dots:?}");
}
