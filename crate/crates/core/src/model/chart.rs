use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use super::Vec3;

/// One of the two stereographic charts on the sphere of directions.
///
/// `N` contains the direction `e₃` at `ξ = 0`; `S` uses `w = 1/ξ` and
/// contains `−e₃` at `w = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    N,
    S,
}

impl Chart {
    pub fn other(self) -> Chart {
        match self {
            Chart::N => Chart::S,
            Chart::S => Chart::N,
        }
    }
}

/// Unit direction of the chart-N coordinate `ξ`.
pub fn direction(xi: Complex) -> Vec3 {
    let m = xi.norm_sqr();
    let s = 1.0 + m;
    Vec3::new(2.0 * xi.re / s, 2.0 * xi.im / s, (1.0 - m) / s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: Chart,
    pub xi: Complex,
}

impl ChartPoint {
    pub const fn new(chart: Chart, xi: Complex) -> Self {
        Self { chart, xi }
    }

    pub const fn north(xi: Complex) -> Self {
        Self::new(Chart::N, xi)
    }

    pub const fn south(w: Complex) -> Self {
        Self::new(Chart::S, w)
    }

    pub fn direction(&self) -> Vec3 {
        match self.chart {
            Chart::N => direction(self.xi),
            Chart::S => direction(self.xi).flip(),
        }
    }

    /// The point of a unit direction, in whichever chart has `|coord| ≤ 1`.
    pub fn from_direction(d: Vec3) -> Self {
        if d.z >= 0.0 {
            Self::north(Complex::new(d.x, d.y) / (1.0 + d.z))
        } else {
            Self::south(Complex::new(d.x, -d.y) / (1.0 - d.z))
        }
    }

    /// The same point in `target`, or `None` at the pole the chart misses.
    pub fn to_chart(&self, target: Chart) -> Option<Self> {
        if target == self.chart {
            Some(*self)
        } else if self.xi == Complex::new(0.0, 0.0) {
            None
        } else {
            Some(Self::new(target, self.xi.inv()))
        }
    }

    /// Re-expressed in the chart where `|coord| ≤ 1`.
    pub fn canonical(&self) -> Self {
        if self.xi.norm_sqr() > 1.0 {
            Self::new(self.chart.other(), self.xi.inv())
        } else {
            *self
        }
    }

    pub fn chordal_distance(&self, other: &ChartPoint) -> f64 {
        (self.direction() - other.direction()).norm()
    }

    /// The antipodal involution `ξ ↦ −1/ξ̄`, written so that neither pole is special.
    pub fn antipode(&self) -> Self {
        Self::new(self.chart.other(), -self.xi.conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn overlap_consistency() {
        let p = ChartPoint::north(c(0.7, -1.3));
        let q = p.to_chart(Chart::S).unwrap();
        assert!((q.xi - c(0.7, -1.3).inv()).norm() < 1e-15);
        assert!(p.chordal_distance(&q) < 1e-15);
        assert!(ChartPoint::north(c(0.0, 0.0)).to_chart(Chart::S).is_none());
    }

    #[test]
    fn poles_and_equator() {
        assert_eq!(ChartPoint::north(c(0.0, 0.0)).direction(), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(ChartPoint::south(c(0.0, 0.0)).direction(), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(ChartPoint::north(c(1.0, 0.0)).direction(), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(ChartPoint::north(c(0.0, 1.0)).direction(), Vec3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn from_direction_round_trip() {
        for xi in [c(0.2, 0.1), c(-3.0, 2.0), c(0.0, -0.99), c(5.0, 0.0)] {
            let p = ChartPoint::north(xi);
            let q = ChartPoint::from_direction(p.direction());
            assert!(q.xi.norm() <= 1.0 + 1e-15);
            assert!(p.chordal_distance(&q) < 1e-14);
        }
    }

    #[test]
    fn antipode_examples() {
        let a = ChartPoint::north(c(1.0, 0.0)).antipode();
        let back = a.to_chart(Chart::N).unwrap();
        assert!((back.xi - c(-1.0, 0.0)).norm() < 1e-15);
        // τ(i) = −1/ī = −1/(−i) = −i
        let b = ChartPoint::north(c(0.0, 1.0)).antipode().to_chart(Chart::N).unwrap();
        assert!((b.xi - c(0.0, -1.0)).norm() < 1e-15);
        let pole = ChartPoint::north(c(0.0, 0.0)).antipode();
        assert_eq!(pole, ChartPoint::south(c(0.0, 0.0)));
    }

    #[test]
    fn antipode_is_involution_and_reverses_direction() {
        for k in 0..100 {
            let t = f64::from(k);
            let p = ChartPoint::new(
                if k % 2 == 0 { Chart::N } else { Chart::S },
                c((0.37 * t).sin() * 3.0, (1.3 * t).cos() * 2.0),
            );
            let a = p.antipode();
            assert_eq!(a.antipode(), p);
            assert!((a.direction() + p.direction()).norm() < 1e-14);
        }
    }
}
