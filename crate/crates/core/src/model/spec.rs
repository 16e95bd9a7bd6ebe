use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use super::{
    family_mobius, family_tangent_field, perturbed_rotation, point_sphere, random_tangent_field,
    GlobalSection, ModelError, Monomial, TangentPoly, Vec3,
};
use crate::expr::Expr;

/// A complex number in a spec file: `1.5`, `[re, im]` or a constant
/// expression such as `"0.2 - 3i"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl Default for ComplexValue {
    fn default() -> Self {
        ComplexValue::Real(0.0)
    }
}

impl ComplexValue {
    pub fn value(&self) -> Result<Complex, ModelError> {
        match self {
            ComplexValue::Real(x) => Ok(Complex::new(*x, 0.0)),
            ComplexValue::Pair([re, im]) => Ok(Complex::new(*re, *im)),
            ComplexValue::Text(t) => parse_constant(t),
        }
    }
}

/// Parses a constant expression (one that does not mention `xi`).
pub fn parse_constant(text: &str) -> Result<Complex, ModelError> {
    let e = Expr::parse(text)?;
    if e.nodes().iter().any(|n| matches!(n, crate::expr::Node::Var)) {
        return Err(ModelError::Spec(format!("`{text}` is not a constant")));
    }
    Ok(e.eval(Complex::new(0.0, 0.0))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomCharts {
    pub north: String,
    /// An expression in `xi` (standing for `w`), or `"auto"`.
    #[serde(default = "auto")]
    pub south: String,
}

fn auto() -> String {
    "auto".into()
}

/// Congruence spec file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CongruenceSpec {
    Mobius {
        #[serde(default)]
        a: ComplexValue,
        #[serde(default)]
        b: ComplexValue,
        #[serde(default)]
        c: ComplexValue,
    },
    PointSphere {
        p: [f64; 3],
    },
    TangentField {
        terms: Vec<Monomial>,
    },
    PerturbedRotation {
        epsilon: f64,
    },
    /// Rotation plus a random cubic; the seed defaults to the run seed.
    RandomTangentField {
        amplitude: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Custom {
        custom: CustomCharts,
    },
}

impl CongruenceSpec {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Spec(e.to_string()))
    }

    pub fn build(&self, run_seed: u64) -> Result<GlobalSection, ModelError> {
        Ok(match self {
            CongruenceSpec::Mobius { a, b, c } => family_mobius(a.value()?, b.value()?, c.value()?),
            CongruenceSpec::PointSphere { p } => point_sphere(Vec3::from(*p)),
            CongruenceSpec::TangentField { terms } => {
                family_tangent_field(&TangentPoly::new(terms.clone()))?
            }
            CongruenceSpec::PerturbedRotation { epsilon } => perturbed_rotation(*epsilon),
            CongruenceSpec::RandomTangentField { amplitude, seed } => {
                random_tangent_field(seed.unwrap_or(run_seed), *amplitude)
            }
            CongruenceSpec::Custom { custom } => {
                let north = Expr::parse(&custom.north)?;
                if custom.south.trim() == "auto" {
                    GlobalSection::from_north(north)
                } else {
                    GlobalSection::new(north, Expr::parse(&custom.south)?)
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ExprError;

    #[test]
    fn parses_every_family() {
        let texts = [
            r#"{"family":"mobius","a":0.2,"b":[0,1],"c":"-0.1"}"#,
            r#"{"family":"point_sphere","p":[1,2,3]}"#,
            r#"{"family":"tangent_field","terms":[{"c":[-1,0,0],"e":[0,1,0]},{"c":[0,1,0],"e":[1,0,0]}]}"#,
            r#"{"family":"perturbed_rotation","epsilon":0.3}"#,
            r#"{"family":"random_tangent_field","amplitude":0.3}"#,
            r#"{"family":"custom","custom":{"north":"i*xi + 0.1*conj(xi)*xi^2","south":"auto"}}"#,
            r#"{"family":"custom","custom":{"north":"xi"}}"#,
        ];
        for t in texts {
            let spec = CongruenceSpec::from_json(t).unwrap();
            let g = spec.build(0).unwrap();
            assert!(g.transition_residual() < 1e-12, "{t}");
        }
    }

    #[test]
    fn mobius_values() {
        let spec = CongruenceSpec::from_json(r#"{"family":"mobius","b":"2+3i"}"#).unwrap();
        let g = spec.build(0).unwrap();
        assert_eq!(g.north.f.eval(Complex::new(1.0, 0.0)).unwrap(), Complex::new(2.0, 3.0));
    }

    #[test]
    fn errors_carry_positions() {
        let err = CongruenceSpec::from_json("{\"family\": \"mobius\",\n \"a\": }").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = CongruenceSpec::from_json(r#"{"family":"helix"}"#).unwrap_err();
        assert!(matches!(err, ModelError::Spec(_)));
        let spec =
            CongruenceSpec::from_json(r#"{"family":"custom","custom":{"north":"xi^^2"}}"#).unwrap();
        assert!(matches!(
            spec.build(0),
            Err(ModelError::Expr(ExprError::Syntax { offset: 3, .. }))
        ));
        let spec = CongruenceSpec::from_json(r#"{"family":"mobius","a":"xi"}"#).unwrap();
        assert!(spec.build(0).is_err());
    }

    #[test]
    fn wrong_south_chart_is_kept_for_checking() {
        let spec = CongruenceSpec::from_json(
            r#"{"family":"custom","custom":{"north":"xi","south":"xi"}}"#,
        )
        .unwrap();
        assert!(spec.build(0).unwrap().transition_residual() > 0.1);
    }
}
