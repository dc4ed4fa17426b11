//! Nonnegative combinations of independent realization blocks, and the
//! decomposition of a concave `g` into truncations `min(x, t)`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::atoms::AtomSystem;
use crate::error::{Error, Result};
use crate::linear::{build_weighted_truncation, LinearSystem};
use crate::rational::{exact, Rational};
use crate::setfn::{GroundSet, Mask, SetFunction};
use crate::zoo::{check_concave_table, ConcaveSpec};

/// Unit a block's entropy is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "unit", rename_all = "snake_case")]
pub enum Unit {
    Bits,
    LogQ { q: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "snake_case")]
pub enum Block {
    Atoms(AtomSystem),
    Linear(LinearSystem),
}

impl Block {
    pub fn ground(&self) -> GroundSet {
        match self {
            Block::Atoms(s) => s.ground(),
            Block::Linear(s) => s.ground(),
        }
    }

    pub fn unit(&self) -> Unit {
        match self {
            Block::Atoms(_) => Unit::Bits,
            Block::Linear(s) => Unit::LogQ { q: s.q() },
        }
    }

    /// Entropy in the block's own unit.
    pub fn entropy(&self, mask: Mask) -> Rational {
        match self {
            Block::Atoms(s) => s.value(mask),
            Block::Linear(s) => s.value(mask),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledBlock {
    #[serde(with = "exact")]
    pub scale: Rational,
    pub block: Block,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMixture", into = "RawMixture")]
pub struct MixtureRealization {
    ground: GroundSet,
    blocks: Vec<ScaledBlock>,
}

#[derive(Serialize, Deserialize)]
struct RawMixture {
    n: usize,
    blocks: Vec<ScaledBlock>,
}

impl TryFrom<RawMixture> for MixtureRealization {
    type Error = Error;

    fn try_from(raw: RawMixture) -> Result<Self> {
        MixtureRealization::new(GroundSet::new(raw.n)?, raw.blocks)
    }
}

impl From<MixtureRealization> for RawMixture {
    fn from(m: MixtureRealization) -> Self {
        RawMixture {
            n: m.ground.len(),
            blocks: m.blocks,
        }
    }
}

impl MixtureRealization {
    pub fn new(ground: GroundSet, blocks: Vec<ScaledBlock>) -> Result<Self> {
        for (b, block) in blocks.iter().enumerate() {
            if block.scale.is_negative() {
                return Err(Error::invalid(
                    format!("blocks[{b}].scale"),
                    "must be nonnegative",
                ));
            }
            if block.block.ground() != ground {
                return Err(Error::GroundMismatch(
                    ground.len(),
                    block.block.ground().len(),
                ));
            }
        }
        Ok(MixtureRealization { ground, blocks })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn blocks(&self) -> &[ScaledBlock] {
        &self.blocks
    }

    /// `Σ scale_t · H_t(A)`, each block in its own unit.
    pub fn entropy(&self, mask: Mask) -> Rational {
        self.blocks
            .iter()
            .map(|b| b.scale * b.block.entropy(mask))
            .sum()
    }
}

impl SetFunction for MixtureRealization {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn value(&self, mask: Mask) -> Rational {
        self.entropy(mask)
    }
}

/// `c_t = Δg(t) − Δg(t+1)` for `t = 1..=T` with `Δg(T+1) = 0`, unvalidated and
/// including zeros. Negative entries appear exactly when `g` is not concave
/// (or not nondecreasing at `T`).
pub fn raw_coefficients(g: &[Rational]) -> Vec<(usize, Rational)> {
    let top = g.len().saturating_sub(1);
    let diff = |t: usize| {
        if t >= 1 && t <= top {
            g[t] - g[t - 1]
        } else {
            Rational::zero()
        }
    };
    (1..=top).map(|t| (t, diff(t) - diff(t + 1))).collect()
}

/// Nonnegative `c_t` with `g(x) = Σ_t c_t · min(x, t)` on `0..=T`; zeros dropped.
pub fn concave_coefficients(g: &[Rational]) -> Result<Vec<(usize, Rational)>> {
    check_concave_table(g)?;
    Ok(raw_coefficients(g)
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .collect())
}

/// `Σ_t c_t · min(x, t)`.
pub fn reconstruct(coefficients: &[(usize, Rational)], x: usize) -> Rational {
    coefficients
        .iter()
        .map(|&(t, c)| c * Rational::from_integer(x.min(t) as i128))
        .sum()
}

/// One weighted-truncation block `min(w(A), t)` per nonzero `c_t`.
pub fn build_concave_over_modular(spec: &ConcaveSpec) -> Result<MixtureRealization> {
    let ground = GroundSet::new(spec.weights().len())?;
    let blocks = concave_coefficients(spec.table())?
        .into_iter()
        .map(|(t, c)| {
            Ok(ScaledBlock {
                scale: c,
                block: Block::Linear(build_weighted_truncation(spec.weights(), t)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MixtureRealization::new(ground, blocks)
}
