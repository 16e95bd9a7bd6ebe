#![allow(dead_code)]

use clab::expr::Expr;
use clab::model::{
    family_mobius, perturbed_rotation, random_tangent_field, Chart, ChartPoint,
    GlobalSection, Vec3,
};
use clab::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex {
    c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// A random point in either chart with `|coord| ≤ 1.2`.
pub fn random_point(rng: &mut ChaCha8Rng) -> ChartPoint {
    let chart = if rng.gen_bool(0.5) { Chart::N } else { Chart::S };
    let xi = Complex::from_polar(1.2 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
    ChartPoint::new(chart, xi)
}

/// Random global section drawn from a mix of holomorphic, tangent-field and
/// custom non-polynomial families.
pub fn random_section(seed: u64) -> GlobalSection {
    let mut r = rng(seed);
    match seed % 4 {
        0 => family_mobius(random_complex(&mut r, 1.0), random_complex(&mut r, 1.0), random_complex(&mut r, 1.0)),
        1 => random_tangent_field(seed, r.gen_range(0.1..0.8)),
        2 => perturbed_rotation(r.gen_range(-0.8..0.8)).translate(&clab::model::Translation::from_vector(random_vec(&mut r, 1.0))),
        _ => {
            let k = random_complex(&mut r, 1.0);
            let text = format!(
                "({}+{}i)*xi + 0.3*conj(xi)*xi^2/(1+xi*conj(xi)) + 0.2*exp(-xi*conj(xi))*conj(xi)",
                k.re, k.im
            );
            GlobalSection::from_north(Expr::parse(&text).unwrap())
        }
    }
}
