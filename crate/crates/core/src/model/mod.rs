//! Oriented lines, charts on the sphere of directions, sections of `TP¹`
//! and the builtin congruence families.

mod chart;
mod families;
mod line;
mod section;
mod spec;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::ExprError;

pub use chart::{direction, Chart, ChartPoint};
pub use families::{
    family_mobius, family_tangent_field, perturbed_rotation, point_sphere, random_tangent_field,
    Monomial, TangentPoly,
};
pub use line::{line_from, phi_point, LineR3, Translation};
pub use section::{GlobalSection, LocalSection, TRANSITION_TOL};
pub use spec::{parse_constant, ComplexValue, CongruenceSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("tangent field vanishes on the whole sampled circle at polar angle {theta:.6}")]
    DegenerateField { theta: f64 },
    #[error("monomial degree {degree} exceeds the cap of 3")]
    DegreeTooHigh { degree: u32 },
    #[error("invalid congruence spec: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    /// `diag(1, -1, -1)`: the rotation by π about the first axis that swaps
    /// the two stereographic charts.
    pub fn flip(self) -> Vec3 {
        Vec3::new(self.x, -self.y, -self.z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}
