//! Direct evaluators for the submodular families: coverage, facility
//! location, truncations, concave-over-modular, saturated coverage, monotone
//! graph cut and modular functions.
//!
//! These are the brute-force references every realization is checked against,
//! so they evaluate the defining formula and nothing cleverer.

use num_traits::{One, Signed, Zero};

use crate::error::{ConcavityFault, Error, Result};
use crate::rational::{as_integer, int, Rational};
use crate::setfn::{elements, GroundSet, Mask, SetFunction, SetFunctionTable};

fn check_nonnegative(field: &str, values: &[Rational]) -> Result<()> {
    match values.iter().position(|w| w.is_negative()) {
        Some(i) => Err(Error::invalid(
            format!("{field}[{i}]"),
            format!("must be nonnegative, got {}", values[i]),
        )),
        None => Ok(()),
    }
}

fn check_square(field: &str, rows: &[Vec<Rational>]) -> Result<()> {
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid(
                format!("{field}[{i}]"),
                format!("expected {n} columns, got {}", row.len()),
            ));
        }
        check_nonnegative(&format!("{field}[{i}]"), row)?;
    }
    Ok(())
}

/// Rejects non-integer weights, pointing at the first offender.
pub fn integer_weights(field: &str, values: &[Rational]) -> Result<Vec<u64>> {
    values
        .iter()
        .enumerate()
        .map(|(i, w)| {
            as_integer(w)
                .filter(|v| *v >= 0)
                .and_then(|v| u64::try_from(v).ok())
                .ok_or_else(|| {
                    Error::invalid(
                        format!("{field}[{i}]"),
                        format!("must be a nonnegative integer, got {w} (rescale first)"),
                    )
                })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageSpec {
    ground: GroundSet,
    weights: Vec<Rational>,
    covers: Vec<Vec<usize>>,
}

impl CoverageSpec {
    /// `weights[u]` is the weight of universe element `u`; `covers[i]` lists
    /// the universe elements covered by ground element `i`.
    pub fn new(weights: Vec<Rational>, covers: Vec<Vec<usize>>) -> Result<Self> {
        let ground = GroundSet::new(covers.len())?;
        check_nonnegative("weights", &weights)?;
        let mut covers = covers;
        for (i, cover) in covers.iter_mut().enumerate() {
            if let Some(&u) = cover.iter().find(|&&u| u >= weights.len()) {
                return Err(Error::invalid(
                    format!("covers[{i}]"),
                    format!("universe element {u} out of range 0..{}", weights.len()),
                ));
            }
            cover.sort_unstable();
            cover.dedup();
        }
        Ok(CoverageSpec {
            ground,
            weights,
            covers,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn covers(&self) -> &[Vec<usize>] {
        &self.covers
    }

    /// Universe elements covered by `mask`, ascending.
    pub fn covered(&self, mask: Mask) -> Vec<usize> {
        let mut hit = vec![false; self.weights.len()];
        for i in elements(mask) {
            for &u in &self.covers[i] {
                hit[u] = true;
            }
        }
        hit.iter()
            .enumerate()
            .filter_map(|(u, &h)| h.then_some(u))
            .collect()
    }

    pub fn eval(&self, mask: Mask) -> Rational {
        self.covered(mask).iter().map(|&u| self.weights[u]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacilityLocationSpec {
    ground: GroundSet,
    similarity: Vec<Vec<Rational>>,
}

impl FacilityLocationSpec {
    /// `similarity[i][a]` is how well facility `a` serves client `i`.
    pub fn new(similarity: Vec<Vec<Rational>>) -> Result<Self> {
        let ground = GroundSet::new(similarity.len())?;
        check_square("similarity", &similarity)?;
        Ok(FacilityLocationSpec { ground, similarity })
    }

    pub fn similarity(&self) -> &[Vec<Rational>] {
        &self.similarity
    }

    pub fn eval(&self, mask: Mask) -> Rational {
        self.similarity
            .iter()
            .map(|row| {
                elements(mask)
                    .map(|a| row[a])
                    .max()
                    .unwrap_or_else(Rational::zero)
            })
            .sum()
    }
}

/// `min(|A|, k)`, or `min(w(A), k)` when item weights are given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationSpec {
    ground: GroundSet,
    k: u64,
    weights: Option<Vec<u64>>,
}

impl TruncationSpec {
    pub fn cardinality(n: usize, k: u64) -> Result<Self> {
        let ground = GroundSet::new(n)?;
        if k == 0 || k > n as u64 {
            return Err(Error::invalid(
                "k",
                format!("need 1 <= k <= n = {n}, got {k}"),
            ));
        }
        Ok(TruncationSpec {
            ground,
            k,
            weights: None,
        })
    }

    pub fn weighted(weights: Vec<u64>, k: u64) -> Result<Self> {
        let ground = GroundSet::new(weights.len())?;
        if k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        Ok(TruncationSpec {
            ground,
            k,
            weights: Some(weights),
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn weights(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    pub fn modular_value(&self, mask: Mask) -> u64 {
        match &self.weights {
            Some(w) => elements(mask).map(|i| w[i]).sum(),
            None => mask.count_ones() as u64,
        }
    }

    pub fn eval(&self, mask: Mask) -> u64 {
        self.modular_value(mask).min(self.k)
    }
}

/// Checks `g(0) = 0`, nondecreasing, and nonincreasing first differences.
pub fn check_concave_table(g: &[Rational]) -> Result<()> {
    if g.first().is_some_and(|g0| !g0.is_zero()) {
        return Err(Error::NotConcave {
            t: 0,
            kind: ConcavityFault::Normalized,
        });
    }
    for t in 1..g.len() {
        let step = g[t] - g[t - 1];
        if step.is_negative() {
            return Err(Error::NotConcave {
                t,
                kind: ConcavityFault::Nondecreasing,
            });
        }
        if t >= 2 && step > g[t - 1] - g[t - 2] {
            return Err(Error::NotConcave {
                t,
                kind: ConcavityFault::Concave,
            });
        }
    }
    Ok(())
}

/// `g(w(A))` with `g` given as a value table on `0..=w(V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcaveSpec {
    ground: GroundSet,
    weights: Vec<u64>,
    g: Vec<Rational>,
}

impl ConcaveSpec {
    pub fn new(weights: Vec<u64>, g: Vec<Rational>) -> Result<Self> {
        let ground = GroundSet::new(weights.len())?;
        let total: u64 = weights.iter().sum();
        if g.len() as u64 != total + 1 {
            return Err(Error::invalid(
                "g",
                format!(
                    "expected values on 0..={total} ({} entries), got {}",
                    total + 1,
                    g.len()
                ),
            ));
        }
        check_concave_table(&g)?;
        Ok(ConcaveSpec { ground, weights, g })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn table(&self) -> &[Rational] {
        &self.g
    }

    pub fn eval(&self, mask: Mask) -> Rational {
        let x: u64 = elements(mask).map(|i| self.weights[i]).sum();
        // w(A) <= w(V) = T and the table covers 0..=T by construction.
        self.g[x as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturatedCoverageSpec {
    coverage: CoverageSpec,
    int_weights: Vec<u64>,
    kappa: u64,
}

impl SaturatedCoverageSpec {
    pub fn new(coverage: CoverageSpec, kappa: u64) -> Result<Self> {
        let int_weights = integer_weights("weights", coverage.weights())?;
        Ok(SaturatedCoverageSpec {
            coverage,
            int_weights,
            kappa,
        })
    }

    pub fn coverage(&self) -> &CoverageSpec {
        &self.coverage
    }

    pub fn integer_weights(&self) -> &[u64] {
        &self.int_weights
    }

    pub fn kappa(&self) -> u64 {
        self.kappa
    }

    pub fn eval(&self, mask: Mask) -> u64 {
        let covered: u64 = self
            .coverage
            .covered(mask)
            .iter()
            .map(|&u| self.int_weights[u])
            .sum();
        covered.min(self.kappa)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCutSpec {
    ground: GroundSet,
    similarity: Vec<Vec<Rational>>,
    lambda: Rational,
}

impl GraphCutSpec {
    #[allow(clippy::needless_range_loop)]
    pub fn new(similarity: Vec<Vec<Rational>>, lambda: Rational) -> Result<Self> {
        let ground = GroundSet::new(similarity.len())?;
        check_square("similarity", &similarity)?;
        let n = similarity.len();
        for i in 0..n {
            if !similarity[i][i].is_zero() {
                return Err(Error::invalid(
                    format!("similarity[{i}][{i}]"),
                    "diagonal must be zero",
                ));
            }
            for j in 0..i {
                if similarity[i][j] != similarity[j][i] {
                    return Err(Error::invalid(
                        format!("similarity[{i}][{j}]"),
                        "matrix must be symmetric",
                    ));
                }
            }
        }
        let half = Rational::new(1, 2);
        if lambda.is_negative() || lambda > half {
            return Err(Error::invalid(
                "lambda",
                format!("must lie in [0, 1/2], got {lambda}"),
            ));
        }
        Ok(GraphCutSpec {
            ground,
            similarity,
            lambda,
        })
    }

    pub fn similarity(&self) -> &[Vec<Rational>] {
        &self.similarity
    }

    pub fn lambda(&self) -> Rational {
        self.lambda
    }

    /// Undirected edges `(i, j, w)` with `i < j` and `w > 0`.
    pub fn edges(&self) -> Vec<(usize, usize, Rational)> {
        let n = self.similarity.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.similarity[i][j];
                if !w.is_zero() {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// Weighted degree `d_i = Σ_j s_ij`.
    pub fn degrees(&self) -> Vec<Rational> {
        self.similarity.iter().map(|row| row.iter().sum()).collect()
    }

    /// `Σ_{i∈A} Σ_{j∈V} s_ij − λ Σ_{i∈A} Σ_{j∈A} s_ij`.
    pub fn eval(&self, mask: Mask) -> Rational {
        let mut total = Rational::zero();
        let mut inner = Rational::zero();
        for i in elements(mask) {
            total += self.similarity[i].iter().sum::<Rational>();
            for j in elements(mask) {
                inner += self.similarity[i][j];
            }
        }
        total - self.lambda * inner
    }

    /// Same function summed edge by edge: `w` when one endpoint is in `A`,
    /// `2(1 − λ)w` when both are.
    pub fn eval_per_edge(&self, mask: Mask) -> Rational {
        let both = int(2) * (Rational::one() - self.lambda);
        self.edges()
            .into_iter()
            .map(|(i, j, w)| match ((mask >> i) & 1, (mask >> j) & 1) {
                (1, 1) => both * w,
                (0, 0) => Rational::zero(),
                _ => w,
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularSpec {
    ground: GroundSet,
    weights: Vec<Rational>,
}

impl ModularSpec {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        let ground = GroundSet::new(weights.len())?;
        check_nonnegative("weights", &weights)?;
        Ok(ModularSpec { ground, weights })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn eval(&self, mask: Mask) -> Rational {
        elements(mask).map(|i| self.weights[i]).sum()
    }
}

/// Any function the toolkit knows how to evaluate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionSpec {
    Coverage(CoverageSpec),
    FacilityLocation(FacilityLocationSpec),
    Truncation(TruncationSpec),
    ConcaveOverModular(ConcaveSpec),
    SaturatedCoverage(SaturatedCoverageSpec),
    GraphCut(GraphCutSpec),
    Modular(ModularSpec),
    ExplicitTable(SetFunctionTable),
}

impl FunctionSpec {
    pub fn family(&self) -> &'static str {
        match self {
            FunctionSpec::Coverage(_) => "coverage",
            FunctionSpec::FacilityLocation(_) => "facility_location",
            FunctionSpec::Truncation(t) if t.weights().is_some() => "weighted_truncation",
            FunctionSpec::Truncation(_) => "truncation",
            FunctionSpec::ConcaveOverModular(_) => "concave_over_modular",
            FunctionSpec::SaturatedCoverage(_) => "saturated_coverage",
            FunctionSpec::GraphCut(_) => "graph_cut",
            FunctionSpec::Modular(_) => "modular",
            FunctionSpec::ExplicitTable(_) => "explicit_table",
        }
    }
}

macro_rules! impl_set_function {
    ($($ty:ty => |$s:ident, $m:ident| $body:expr;)*) => {$(
        impl SetFunction for $ty {
            fn ground(&self) -> GroundSet {
                self.ground
            }

            fn value(&self, $m: Mask) -> Rational {
                let $s = self;
                $body
            }
        }
    )*};
}

impl_set_function! {
    CoverageSpec => |s, m| s.eval(m);
    FacilityLocationSpec => |s, m| s.eval(m);
    TruncationSpec => |s, m| int(s.eval(m) as i128);
    ConcaveSpec => |s, m| s.eval(m);
    GraphCutSpec => |s, m| s.eval(m);
    ModularSpec => |s, m| s.eval(m);
}

impl SetFunction for SaturatedCoverageSpec {
    fn ground(&self) -> GroundSet {
        self.coverage.ground
    }

    fn value(&self, mask: Mask) -> Rational {
        int(self.eval(mask) as i128)
    }
}

impl SetFunction for FunctionSpec {
    fn ground(&self) -> GroundSet {
        match self {
            FunctionSpec::Coverage(s) => s.ground(),
            FunctionSpec::FacilityLocation(s) => s.ground(),
            FunctionSpec::Truncation(s) => s.ground(),
            FunctionSpec::ConcaveOverModular(s) => s.ground(),
            FunctionSpec::SaturatedCoverage(s) => s.ground(),
            FunctionSpec::GraphCut(s) => s.ground(),
            FunctionSpec::Modular(s) => s.ground(),
            FunctionSpec::ExplicitTable(t) => t.ground(),
        }
    }

    fn value(&self, mask: Mask) -> Rational {
        match self {
            FunctionSpec::Coverage(s) => s.value(mask),
            FunctionSpec::FacilityLocation(s) => s.value(mask),
            FunctionSpec::Truncation(s) => s.value(mask),
            FunctionSpec::ConcaveOverModular(s) => s.value(mask),
            FunctionSpec::SaturatedCoverage(s) => s.value(mask),
            FunctionSpec::GraphCut(s) => s.value(mask),
            FunctionSpec::Modular(s) => s.value(mask),
            FunctionSpec::ExplicitTable(t) => t.value(mask),
        }
    }
}
