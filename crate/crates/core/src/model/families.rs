use num_complex::Complex64 as Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{chart::direction, GlobalSection, ModelError, Vec3};
use crate::expr::{Expr, ExprBuilder, NodeId};

/// `c · p₁^e₀ p₂^e₁ p₃^e₂`, a vector-valued monomial on `R³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub c: [f64; 3],
    pub e: [u32; 3],
}

/// Polynomial map `R³ → R³`. Restricted to the unit sphere and projected
/// onto the tangent planes it defines a tangent field.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TangentPoly {
    pub terms: Vec<Monomial>,
}

impl TangentPoly {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms }
    }

    /// `(−p₂, p₁, 0)`, the rotation about `e₃`.
    pub fn rotation() -> Self {
        Self::new(vec![
            Monomial { c: [-1.0, 0.0, 0.0], e: [0, 1, 0] },
            Monomial { c: [0.0, 1.0, 0.0], e: [1, 0, 0] },
        ])
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|m| m.e.iter().sum()).max().unwrap_or(0)
    }

    pub fn plus(mut self, other: &TangentPoly, scale: f64) -> Self {
        self.terms.extend(other.terms.iter().map(|m| Monomial {
            c: m.c.map(|x| x * scale),
            e: m.e,
        }));
        self
    }

    pub fn eval(&self, p: Vec3) -> Vec3 {
        let pa = p.to_array();
        self.terms.iter().fold(Vec3::ZERO, |acc, m| {
            let mut k = 1.0;
            for (x, &n) in pa.iter().zip(&m.e) {
                k *= x.powi(n as i32);
            }
            acc + Vec3::from(m.c) * k
        })
    }

    /// Tangential part at a unit vector `p`.
    pub fn tangent(&self, p: Vec3) -> Vec3 {
        let w = self.eval(p);
        w - p * w.dot(p)
    }

    /// The polynomial `q ↦ R·W(R·q)` with `R = diag(1, −1, −1)`.
    fn flipped(&self) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|m| {
                    let sign = if (m.e[1] + m.e[2]) % 2 == 0 { 1.0 } else { -1.0 };
                    Monomial { c: [sign * m.c[0], -sign * m.c[1], -sign * m.c[2]], e: m.e }
                })
                .collect(),
        )
    }
}

fn polynomial(coeffs: &[Complex]) -> Expr {
    let mut b = ExprBuilder::new();
    let x = b.var();
    let mut terms = Vec::new();
    for (n, &k) in coeffs.iter().enumerate() {
        if k == Complex::new(0.0, 0.0) {
            continue;
        }
        let t = match n {
            0 => b.constant(k),
            1 => b.scale(k, x),
            _ => {
                let xn = b.powi(x, n as i32);
                b.scale(k, xn)
            }
        };
        terms.push(t);
    }
    let root = b.sum(&terms);
    b.finish(root)
}

/// The holomorphic quadratic `F = a + bξ + cξ²`.
pub fn family_mobius(a: Complex, b: Complex, c: Complex) -> GlobalSection {
    GlobalSection::new(polynomial(&[a, b, c]), polynomial(&[-c, -b, -a]))
}

/// All oriented lines through `p`.
pub fn point_sphere(p: Vec3) -> GlobalSection {
    let alpha = Complex::new(p.x, p.y);
    family_mobius(0.5 * alpha, Complex::new(-p.z, 0.0), -0.5 * alpha.conj())
}

/// Pushforward of the tangent field of `poly` to `F` in one chart.
fn pushforward(poly: &TangentPoly) -> Expr {
    let mut b = ExprBuilder::new();
    let x = b.var();
    let xb = b.conj(x);
    let m = b.mul(x, xb);
    let one = b.real(1.0);
    let s = b.add(one, m);
    let re2 = b.add(x, xb);
    let p1 = b.div(re2, s);
    let im2 = b.sub(x, xb);
    let im2 = b.scale(Complex::new(0.0, -1.0), im2);
    let p2 = b.div(im2, s);
    let num3 = b.sub(one, m);
    let p3 = b.div(num3, s);
    let p = [p1, p2, p3];

    let mut w: [Vec<NodeId>; 3] = Default::default();
    for mono in &poly.terms {
        let mut factors = Vec::new();
        for (k, &n) in mono.e.iter().enumerate() {
            if n > 0 {
                factors.push(if n == 1 { p[k] } else { b.powi(p[k], n as i32) });
            }
        }
        let base = match factors.split_first() {
            None => one,
            Some((&f0, rest)) => rest.iter().fold(f0, |acc, &f| b.mul(acc, f)),
        };
        for (k, &ck) in mono.c.iter().enumerate() {
            if ck != 0.0 {
                let t = b.scale(Complex::new(ck, 0.0), base);
                w[k].push(t);
            }
        }
    }
    let w = [b.sum(&w[0]), b.sum(&w[1]), b.sum(&w[2])];
    let wp = [b.mul(w[0], p[0]), b.mul(w[1], p[1]), b.mul(w[2], p[2])];
    let dot = b.sum(&wp);
    let mut v = [one; 3];
    for k in 0..3 {
        let proj = b.mul(dot, p[k]);
        v[k] = b.sub(w[k], proj);
    }
    // F = (V₁ + iV₂ − ξV₃)(1 + ξξ̄)/2
    let iv2 = b.scale(Complex::i(), v[1]);
    let xv3 = b.mul(x, v[2]);
    let a = b.add(v[0], iv2);
    let a = b.sub(a, xv3);
    let half_s = b.scale(Complex::new(0.5, 0.0), s);
    let root = b.mul(a, half_s);
    b.finish(root)
}

/// Section of the tangent field `V(p) = W(p) − ⟨W(p), p⟩p` of a polynomial
/// map `W` of degree at most 3. Errors if `V` vanishes on a whole sampled
/// circle of latitude, a sign that its zeros are not isolated.
pub fn family_tangent_field(poly: &TangentPoly) -> Result<GlobalSection, ModelError> {
    let degree = poly.degree();
    if degree > 3 {
        return Err(ModelError::DegreeTooHigh { degree });
    }
    let scale: f64 = 1.0 + poly.terms.iter().flat_map(|m| m.c).map(f64::abs).sum::<f64>();
    for k in 1..16 {
        let theta = f64::from(k) * std::f64::consts::PI / 16.0;
        let flat = (0..32).all(|j| {
            let phi = f64::from(j) * std::f64::consts::TAU / 32.0;
            let xi = Complex::from_polar((theta / 2.0).tan(), phi);
            poly.tangent(direction(xi)).norm() < 1e-12 * scale
        });
        if flat {
            return Err(ModelError::DegenerateField { theta });
        }
    }
    Ok(GlobalSection::new(pushforward(poly), pushforward(&poly.flipped())))
}

/// The rotation about `e₃` plus `ε` times the gradient of the traceless
/// quadratic `½(p₁² − p₃²)`. Its shear vanishes at exactly four isolated
/// directions, the umbilics of that quadratic, for every `ε ≠ 0`.
pub fn perturbed_rotation(epsilon: f64) -> GlobalSection {
    let poly = TangentPoly::rotation().plus(
        &TangentPoly::new(vec![
            Monomial { c: [1.0, 0.0, 0.0], e: [1, 0, 0] },
            Monomial { c: [0.0, 0.0, -1.0], e: [0, 0, 1] },
        ]),
        epsilon,
    );
    family_tangent_field(&poly).expect("rotation is not degenerate")
}

/// Rotation about `e₃` plus `amplitude` times a random cubic map with
/// coefficients uniform in `[−1, 1]`, reproducible from `seed`.
pub fn random_tangent_field(seed: u64, amplitude: f64) -> GlobalSection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for i in 0..=3u32 {
        for j in 0..=(3 - i) {
            for k in 0..=(3 - i - j) {
                let c = std::array::from_fn(|_| amplitude * rng.gen_range(-1.0..=1.0));
                terms.push(Monomial { c, e: [i, j, k] });
            }
        }
    }
    let poly = TangentPoly::rotation().plus(&TangentPoly::new(terms), 1.0);
    family_tangent_field(&poly).expect("rotation part keeps the field non-degenerate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChartPoint, Translation};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn close(g: &GlobalSection, h: impl Fn(Complex) -> Complex) {
        for xi in [c(0.0, 0.0), c(0.3, -0.7), c(-1.2, 0.4), c(2.0, 2.0)] {
            let got = g.north.f.eval(xi).unwrap();
            assert!((got - h(xi)).norm() < 1e-13 * (1.0 + h(xi).norm()), "at {xi}: {got}");
        }
    }

    #[test]
    fn point_sphere_examples() {
        close(&point_sphere(Vec3::ZERO), |_| c(0.0, 0.0));
        close(&point_sphere(Vec3::new(1.0, 0.0, 0.0)), |x| 0.5 * (1.0 - x * x));
        close(&point_sphere(Vec3::new(0.0, 0.0, 1.0)), |x| -x);
        assert!(point_sphere(Vec3::new(1.0, 2.0, 3.0)).is_holomorphic());
    }

    #[test]
    fn translation_of_zero_section() {
        let zero = point_sphere(Vec3::ZERO);
        close(&zero.translate(&Translation::new(c(0.0, 0.0), 1.0)), |x| -x);
        let p = Vec3::new(0.3, -1.0, 2.0);
        let back = point_sphere(p).translate(&Translation::from_vector(-p));
        close(&back, |_| c(0.0, 0.0));
    }

    #[test]
    fn point_sphere_lines_pass_through_point() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        let g = point_sphere(p);
        for k in 0..40 {
            let t = f64::from(k);
            let cp = ChartPoint::new(
                if k % 3 == 0 { crate::model::Chart::S } else { crate::model::Chart::N },
                c(1.7 * (0.9 * t).sin(), 1.3 * (0.4 * t).cos()),
            );
            assert!(g.line(&cp).unwrap().distance_to(p) < 1e-10 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn mobius_matches_point_sphere_coefficients() {
        let t0 = 0.8;
        let m = family_mobius(c(0.5, 0.0), c(-t0, 0.0), c(-0.5, 0.0));
        close(&m, |x| point_sphere(Vec3::new(1.0, 0.0, t0)).north.f.eval(x).unwrap());
    }

    #[test]
    fn rotation_pushes_forward_to_i_xi() {
        let g = family_tangent_field(&TangentPoly::rotation()).unwrap();
        close(&g, |x| Complex::i() * x);
        assert!(g.transition_residual() < 1e-14);
    }

    #[test]
    fn constant_field_is_holomorphic() {
        let g = family_tangent_field(&TangentPoly::new(vec![Monomial {
            c: [0.0, 0.0, 1.0],
            e: [0, 0, 0],
        }]))
        .unwrap();
        close(&g, |x| -x);
        for xi in [c(0.3, 0.1), c(-2.0, 0.5)] {
            assert!(g.north.f.eval_jet(xi).unwrap().dbar.norm() < 1e-14);
        }
    }

    #[test]
    fn radial_field_is_degenerate() {
        let radial = TangentPoly::new(vec![
            Monomial { c: [1.0, 0.0, 0.0], e: [1, 0, 0] },
            Monomial { c: [0.0, 1.0, 0.0], e: [0, 1, 0] },
            Monomial { c: [0.0, 0.0, 1.0], e: [0, 0, 1] },
        ]);
        assert!(matches!(family_tangent_field(&radial), Err(ModelError::DegenerateField { .. })));
        let quartic = TangentPoly::new(vec![Monomial { c: [1.0, 0.0, 0.0], e: [2, 2, 0] }]);
        assert_eq!(family_tangent_field(&quartic), Err(ModelError::DegreeTooHigh { degree: 4 }));
    }

    #[test]
    fn builtin_families_are_global() {
        let families = [
            perturbed_rotation(0.3),
            random_tangent_field(7, 0.4),
            family_mobius(c(0.2, 0.0), c(0.0, 1.0), c(-0.1, 0.0)),
            point_sphere(Vec3::new(-1.0, 0.5, 2.0)),
        ];
        for g in &families {
            assert!(g.transition_residual() < 1e-12);
        }
        assert!(!families[0].is_holomorphic());
    }
}
