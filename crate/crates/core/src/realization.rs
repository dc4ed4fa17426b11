//! Dispatch from a function spec to its realization.

use serde::{Deserialize, Serialize};

use crate::atoms::{
    build_coverage, build_facility_location, build_graph_cut, build_modular, AtomSystem,
};
use crate::error::Result;
use crate::linear::{
    build_card_truncation, build_saturated_coverage, build_weighted_truncation, LinearSystem,
};
use crate::mixture::{build_concave_over_modular, MixtureRealization, Unit};
use crate::rational::{exact, Rational};
use crate::setfn::{GroundSet, Mask, SetFunction};
use crate::zoo::FunctionSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "snake_case")]
pub enum Realization {
    Atoms(AtomSystem),
    Linear(LinearSystem),
    Mixture(MixtureRealization),
}

/// How a realization's values relate to entropy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "value_unit", rename_all = "snake_case")]
pub enum Units {
    Bits,
    LogQ {
        q: u64,
    },
    /// Value is `Σ scale · H_block`, each block in its own unit.
    Mixture {
        blocks: Vec<ScaledUnit>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledUnit {
    #[serde(with = "exact")]
    pub scale: Rational,
    #[serde(flatten)]
    pub unit: Unit,
}

impl Realization {
    pub fn kind(&self) -> &'static str {
        match self {
            Realization::Atoms(_) => "atoms",
            Realization::Linear(_) => "linear",
            Realization::Mixture(_) => "mixture",
        }
    }

    pub fn units(&self) -> Units {
        match self {
            Realization::Atoms(_) => Units::Bits,
            Realization::Linear(s) => Units::LogQ { q: s.q() },
            Realization::Mixture(m) => Units::Mixture {
                blocks: m
                    .blocks()
                    .iter()
                    .map(|b| ScaledUnit {
                        scale: b.scale,
                        unit: b.block.unit(),
                    })
                    .collect(),
            },
        }
    }
}

impl SetFunction for Realization {
    fn ground(&self) -> GroundSet {
        match self {
            Realization::Atoms(s) => s.ground(),
            Realization::Linear(s) => s.ground(),
            Realization::Mixture(m) => m.ground(),
        }
    }

    fn value(&self, mask: Mask) -> Rational {
        match self {
            Realization::Atoms(s) => s.value(mask),
            Realization::Linear(s) => s.value(mask),
            Realization::Mixture(m) => m.value(mask),
        }
    }
}

/// Builds the realization for `spec`; `None` for explicit tables, which have
/// no construction.
pub fn realize(spec: &FunctionSpec) -> Result<Option<Realization>> {
    Ok(Some(match spec {
        FunctionSpec::Coverage(s) => Realization::Atoms(build_coverage(s)?),
        FunctionSpec::FacilityLocation(s) => Realization::Atoms(build_facility_location(s)?),
        FunctionSpec::GraphCut(s) => Realization::Atoms(build_graph_cut(s)?),
        FunctionSpec::Modular(s) => Realization::Atoms(build_modular(s.weights())?),
        FunctionSpec::Truncation(t) => match t.weights() {
            Some(w) => Realization::Linear(build_weighted_truncation(w, t.k() as usize)?),
            None => Realization::Linear(build_card_truncation(t.ground().len(), t.k() as usize)?),
        },
        FunctionSpec::SaturatedCoverage(s) => Realization::Linear(build_saturated_coverage(s)?),
        FunctionSpec::ConcaveOverModular(s) => Realization::Mixture(build_concave_over_modular(s)?),
        FunctionSpec::ExplicitTable(_) => return Ok(None),
    }))
}
