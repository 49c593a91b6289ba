//! Input loading and validation, and the built-in manifold generators.
//!
//! Generators emit the same JSON a user could write by hand, so fixtures
//! and generated inputs share one schema (shipped under `/schemas`).

use dioph_core::error::Error;
use dioph_core::liealg::{self, LieAlgebra, MetricSpec};
use dioph_core::pencil::{evaluation_manifold, veronese_manifold, wedge_manifold, AlgebraKind, Manifold};
use dioph_core::sampler::RationalSampler;
use serde_json::Value;

pub const MANIFOLD_SCHEMA: &str = include_str!("../../../schemas/manifold.schema.json");
pub const LIE_ALGEBRA_SCHEMA: &str = include_str!("../../../schemas/lie_algebra.schema.json");
pub const PENCIL_SCHEMA: &str = include_str!("../../../schemas/pencil.schema.json");
pub const REPORT_SCHEMA: &str = include_str!("../../../schemas/report.schema.json");

/// Check the top-level required properties of a schema document against a
/// value; detailed validation happens in the typed parsers.
pub fn check_required(schema: &str, value: &Value, what: &str) -> Result<(), Error> {
    let schema: Value = serde_json::from_str(schema)
        .map_err(|e| Error::Parse(format!("internal schema is invalid: {e}")))?;
    if let Some(required) = schema["required"].as_array() {
        for key in required {
            let key = key.as_str().unwrap_or_default();
            if value.get(key).is_none() {
                return Err(Error::Parse(format!("{what}: missing required field {key:?}")));
            }
        }
    }
    Ok(())
}

pub fn parse_manifold(raw: &str) -> Result<Manifold, Error> {
    let v: Value = serde_json::from_str(raw).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
    check_required(MANIFOLD_SCHEMA, &v, "manifold")?;
    Manifold::from_json(&v)
}

pub fn parse_lie_algebra(raw: &str) -> Result<(LieAlgebra, MetricSpec), Error> {
    let v: Value = serde_json::from_str(raw).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
    check_required(LIE_ALGEBRA_SCHEMA, &v, "lie algebra")?;
    LieAlgebra::from_json(&v)
}

/// `--family` manifold generators.
#[derive(Debug, Clone)]
pub enum Family {
    /// Evaluation map of a built-in algebra on `k` letters.
    Eval { algebra: String, k: usize, cc_metric: bool },
    /// Veronese powers of degree `p` in `M_s` or the split algebra.
    Veronese { p: usize, matrix_size: Option<usize>, split: Option<usize> },
    /// The wedge family on `k` vectors in 3-space.
    Wedge { k: usize },
}

pub fn generate_manifold(family: &Family, sampler: &mut RationalSampler) -> Result<Manifold, Error> {
    match family {
        Family::Eval { algebra, k, cc_metric } => {
            let g = liealg::builtin(algebra)?;
            let metric = if *cc_metric {
                // The generating layer of the built-in bases is the set of
                // directions of weight 1 in the lower central series.
                let lcs = g.lower_central_series();
                let second = &lcs[1];
                let v1: Vec<usize> = (0..g.dim())
                    .filter(|&i| {
                        let mut v = vec![num::BigRational::from_integer(0.into()); g.dim()];
                        v[i] = num::BigRational::from_integer(1.into());
                        !second.contains_vector(&v)
                    })
                    .collect();
                MetricSpec::GeneratedBy(v1)
            } else {
                MetricSpec::Riemannian
            };
            evaluation_manifold(&g, *k, &metric, sampler)
        }
        Family::Veronese { p, matrix_size, split } => {
            let kind = match (matrix_size, split) {
                (Some(s), None) => AlgebraKind::Matrix(*s),
                (None, Some(m)) => AlgebraKind::Split(*m),
                _ => {
                    return Err(Error::Parse(
                        "veronese needs exactly one of --matrix-size or --split".into(),
                    ))
                }
            };
            veronese_manifold(*p, kind)
        }
        Family::Wedge { k } => wedge_manifold(*k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_manifolds_round_trip_through_the_schema() {
        let mut s = RationalSampler::new(3);
        for family in [
            Family::Eval { algebra: "heisenberg".into(), k: 3, cc_metric: false },
            Family::Eval { algebra: "u(3)".into(), k: 2, cc_metric: true },
            Family::Veronese { p: 3, matrix_size: Some(2), split: None },
            Family::Wedge { k: 4 },
        ] {
            let m = generate_manifold(&family, &mut s).unwrap();
            let raw = serde_json::to_string_pretty(&m.to_json()).unwrap();
            let back = parse_manifold(&raw).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn schema_check_catches_missing_fields() {
        let bad = r#"{"n_params": 1, "dim_v": 2}"#;
        assert!(parse_manifold(bad).is_err());
    }
}
