//! Spec documents: one JSON object with a `family` discriminator and the
//! family's payload. Rationals may be written as integers, decimals,
//! `"a/b"` strings or `{"num", "den"}` objects; they are always written back
//! as `{"den", "num"}`.

use entropic_core::rational::{unwrap_all, wrap_all, Exact, Rational};
use entropic_core::zoo::{
    integer_weights, ConcaveSpec, CoverageSpec, FacilityLocationSpec, GraphCutSpec, ModularSpec,
    SaturatedCoverageSpec, TruncationSpec,
};
use entropic_core::{FunctionSpec, GroundSet, SetFunctionTable};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

fn matrix_in(rows: &[Vec<Exact>]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| unwrap_all(r)).collect()
}

fn matrix_out(rows: &[Vec<Rational>]) -> Vec<Vec<Exact>> {
    rows.iter().map(|r| wrap_all(r)).collect()
}

fn single_integer(field: &str, value: Exact) -> entropic_core::Result<u64> {
    Ok(integer_weights(field, &[value.0])?[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecDocument {
    Coverage {
        weights: Vec<Exact>,
        covers: Vec<Vec<usize>>,
    },
    FacilityLocation {
        similarity: Vec<Vec<Exact>>,
    },
    Truncation {
        n: usize,
        k: u64,
    },
    WeightedTruncation {
        weights: Vec<Exact>,
        k: Exact,
    },
    ConcaveOverModular {
        weights: Vec<Exact>,
        g: Vec<Exact>,
    },
    SaturatedCoverage {
        weights: Vec<Exact>,
        covers: Vec<Vec<usize>>,
        kappa: Exact,
    },
    GraphCut {
        similarity: Vec<Vec<Exact>>,
        lambda: Exact,
    },
    Modular {
        weights: Vec<Exact>,
    },
    ExplicitTable {
        n: usize,
        values: Vec<Exact>,
    },
}

impl SpecDocument {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_string(),
            message: e.to_string(),
        })
    }

    pub fn family(&self) -> &'static str {
        match self {
            SpecDocument::Coverage { .. } => "coverage",
            SpecDocument::FacilityLocation { .. } => "facility_location",
            SpecDocument::Truncation { .. } => "truncation",
            SpecDocument::WeightedTruncation { .. } => "weighted_truncation",
            SpecDocument::ConcaveOverModular { .. } => "concave_over_modular",
            SpecDocument::SaturatedCoverage { .. } => "saturated_coverage",
            SpecDocument::GraphCut { .. } => "graph_cut",
            SpecDocument::Modular { .. } => "modular",
            SpecDocument::ExplicitTable { .. } => "explicit_table",
        }
    }

    /// Validates the payload into an evaluable spec.
    pub fn to_spec(&self) -> entropic_core::Result<FunctionSpec> {
        Ok(match self {
            SpecDocument::Coverage { weights, covers } => {
                FunctionSpec::Coverage(CoverageSpec::new(unwrap_all(weights), covers.clone())?)
            }
            SpecDocument::FacilityLocation { similarity } => {
                FunctionSpec::FacilityLocation(FacilityLocationSpec::new(matrix_in(similarity))?)
            }
            SpecDocument::Truncation { n, k } => {
                FunctionSpec::Truncation(TruncationSpec::cardinality(*n, *k)?)
            }
            SpecDocument::WeightedTruncation { weights, k } => {
                let w = integer_weights("weights", &unwrap_all(weights))?;
                FunctionSpec::Truncation(TruncationSpec::weighted(w, single_integer("k", *k)?)?)
            }
            SpecDocument::ConcaveOverModular { weights, g } => {
                let w = integer_weights("weights", &unwrap_all(weights))?;
                FunctionSpec::ConcaveOverModular(ConcaveSpec::new(w, unwrap_all(g))?)
            }
            SpecDocument::SaturatedCoverage {
                weights,
                covers,
                kappa,
            } => {
                let cov = CoverageSpec::new(unwrap_all(weights), covers.clone())?;
                FunctionSpec::SaturatedCoverage(SaturatedCoverageSpec::new(
                    cov,
                    single_integer("kappa", *kappa)?,
                )?)
            }
            SpecDocument::GraphCut { similarity, lambda } => {
                FunctionSpec::GraphCut(GraphCutSpec::new(matrix_in(similarity), lambda.0)?)
            }
            SpecDocument::Modular { weights } => {
                FunctionSpec::Modular(ModularSpec::new(unwrap_all(weights))?)
            }
            SpecDocument::ExplicitTable { n, values } => FunctionSpec::ExplicitTable(
                SetFunctionTable::from_values(GroundSet::new(*n)?, unwrap_all(values))?,
            ),
        })
    }

    pub fn from_spec(spec: &FunctionSpec) -> Self {
        let ints = |w: &[u64]| {
            w.iter()
                .map(|&x| Exact(Rational::from_integer(x as i128)))
                .collect()
        };
        match spec {
            FunctionSpec::Coverage(c) => SpecDocument::Coverage {
                weights: wrap_all(c.weights()),
                covers: c.covers().to_vec(),
            },
            FunctionSpec::FacilityLocation(f) => SpecDocument::FacilityLocation {
                similarity: matrix_out(f.similarity()),
            },
            FunctionSpec::Truncation(t) => match t.weights() {
                Some(w) => SpecDocument::WeightedTruncation {
                    weights: ints(w),
                    k: Exact(Rational::from_integer(t.k() as i128)),
                },
                None => SpecDocument::Truncation {
                    n: entropic_core::SetFunction::ground(t).len(),
                    k: t.k(),
                },
            },
            FunctionSpec::ConcaveOverModular(c) => SpecDocument::ConcaveOverModular {
                weights: ints(c.weights()),
                g: wrap_all(c.table()),
            },
            FunctionSpec::SaturatedCoverage(s) => SpecDocument::SaturatedCoverage {
                weights: wrap_all(s.coverage().weights()),
                covers: s.coverage().covers().to_vec(),
                kappa: Exact(Rational::from_integer(s.kappa() as i128)),
            },
            FunctionSpec::GraphCut(g) => SpecDocument::GraphCut {
                similarity: matrix_out(g.similarity()),
                lambda: Exact(g.lambda()),
            },
            FunctionSpec::Modular(m) => SpecDocument::Modular {
                weights: wrap_all(m.weights()),
            },
            FunctionSpec::ExplicitTable(t) => SpecDocument::ExplicitTable {
                n: t.ground().len(),
                values: wrap_all(t.values()),
            },
        }
    }
}

/// Canonical text: keys sorted, two-space indent, trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Map is a BTreeMap here, so going through Value sorts keys
    let v = serde_json::to_value(value)?;
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use entropic_core::rational::{frac, int};
    use entropic_core::SetFunction;

    #[test]
    fn parses_mixed_rational_encodings() {
        let doc = SpecDocument::parse(
            r#"{"family": "modular", "weights": [1, 0.5, "1/3", {"num": 2, "den": 7}]}"#,
            "inline",
        )
        .unwrap();
        let spec = doc.to_spec().unwrap();
        assert_eq!(
            spec.tabulate().at(0b1111),
            int(1) + frac(1, 2) + frac(1, 3) + frac(2, 7)
        );
    }

    #[test]
    fn malformed_documents_name_the_location() {
        let err = SpecDocument::parse("{\"family\": \"coverage\",\n \"weights\": [1,}", "x.json")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        let unknown = SpecDocument::parse(r#"{"family": "matroid"}"#, "x.json");
        assert!(unknown.is_err());
        let extra = SpecDocument::parse(
            r#"{"family": "truncation", "n": 2, "k": 1, "q": 3}"#,
            "x.json",
        );
        assert!(extra.is_err());
    }

    #[test]
    fn integer_families_reject_fractions() {
        let doc = SpecDocument::parse(
            r#"{"family": "weighted_truncation", "weights": [0.5, 1], "k": 1}"#,
            "x",
        )
        .unwrap();
        let err = doc.to_spec().unwrap_err().to_string();
        assert!(err.contains("weights[0]"), "{err}");
    }

    #[test]
    fn canonical_output_sorts_keys() {
        let doc = SpecDocument::Truncation { n: 4, k: 2 };
        let text = canonical_json(&doc).unwrap();
        let family = text.find("family").unwrap();
        let k = text.find("\"k\"").unwrap();
        let n = text.find("\"n\"").unwrap();
        assert!(family < k && k < n);
        assert!(text.ends_with('\n'));
    }
}
