use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use super::{chart::direction, ChartPoint, Vec3};

/// The point at arclength `r` on the line with chart-N data `(ξ, F)`.
pub fn phi_point(xi: Complex, f: Complex, r: f64) -> Vec3 {
    let m = xi.norm_sqr();
    let s = 1.0 + m;
    let s2 = s * s;
    let z = (2.0 * (f - f.conj() * xi * xi) + 2.0 * xi * s * r) / s2;
    let t = (-2.0 * (f * xi.conj() + f.conj() * xi).re + (1.0 - m * m) * r) / s2;
    Vec3::new(z.re, z.im, t)
}

/// Oriented line: perpendicular foot `u` and unit direction `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineR3 {
    pub u: Vec3,
    pub w: Vec3,
}

impl LineR3 {
    pub fn point(&self, r: f64) -> Vec3 {
        self.u + self.w * r
    }

    /// Euclidean distance from `p` to the line.
    pub fn distance_to(&self, p: Vec3) -> f64 {
        let d = p - self.u;
        (d - self.w * d.dot(self.w)).norm()
    }
}

/// Line with chart-N data `(ξ, F)`.
pub fn line_from(xi: Complex, f: Complex) -> LineR3 {
    LineR3 { u: phi_point(xi, f, 0.0), w: direction(xi) }
}

/// A translation of the origin by `(Re α₀, Im α₀, t₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Translation {
    pub alpha0: Complex,
    pub t0: f64,
}

impl Translation {
    pub fn new(alpha0: Complex, t0: f64) -> Self {
        Self { alpha0, t0 }
    }

    pub fn from_vector(v: Vec3) -> Self {
        Self::new(Complex::new(v.x, v.y), v.z)
    }

    pub fn vector(&self) -> Vec3 {
        Vec3::new(self.alpha0.re, self.alpha0.im, self.t0)
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.alpha0, -self.t0)
    }

    /// Offset of the arclength parameter: the translated line at `r + r_shift`
    /// is the original line at `r`, moved by the translation vector.
    pub fn r_shift(&self, cp: &ChartPoint) -> f64 {
        self.vector().dot(cp.direction())
    }

    /// Chart-N closed form of [`Translation::r_shift`].
    pub fn r_shift_north(&self, xi: Complex) -> f64 {
        let m = xi.norm_sqr();
        ((self.alpha0.conj() * xi + self.alpha0 * xi.conj()).re + self.t0 * (1.0 - m)) / (1.0 + m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn phi_point_examples() {
        assert_eq!(phi_point(c(0.0, 0.0), c(0.0, 0.0), 5.0), Vec3::new(0.0, 0.0, 5.0));
        assert_eq!(phi_point(c(0.0, 0.0), c(1.0, 0.0), 0.0), Vec3::new(2.0, 0.0, 0.0));
        // z = 2·1·2·2/4, t = 0
        assert_eq!(phi_point(c(1.0, 0.0), c(0.0, 0.0), 2.0), Vec3::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn line_examples() {
        let l = line_from(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!((l.u, l.w), (Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0)));
        assert_eq!(line_from(c(1.0, 0.0), c(0.0, 0.0)).w, Vec3::new(1.0, 0.0, 0.0));
        let l = line_from(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(l.u, Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(l.u.dot(l.w), 0.0);
    }

    #[test]
    fn foot_is_perpendicular_and_line_is_affine() {
        for k in 0..50 {
            let t = f64::from(k);
            let xi = c(2.0 * (0.7 * t).sin(), 1.5 * (1.1 * t).cos());
            let f = c((0.3 * t).cos() * 4.0, (0.9 * t).sin() - 0.5);
            let l = line_from(xi, f);
            assert!(l.u.dot(l.w).abs() < 1e-12 * (1.0 + l.u.norm()));
            assert!((l.w.norm() - 1.0).abs() < 1e-12);
            let r = 0.37 * t - 3.0;
            assert!((phi_point(xi, f, r) - l.point(r)).norm() < 1e-12 * (1.0 + r.abs() + l.u.norm()));
        }
    }

    #[test]
    fn r_shift_forms_agree() {
        let tr = Translation::new(c(0.4, -1.2), 0.9);
        for xi in [c(0.0, 0.0), c(0.3, 0.8), c(-2.0, 1.0)] {
            assert!((tr.r_shift(&ChartPoint::north(xi)) - tr.r_shift_north(xi)).abs() < 1e-14);
        }
        assert_eq!(Translation::new(c(0.0, 0.0), 1.0).r_shift_north(c(0.0, 0.0)), 1.0);
    }
}
