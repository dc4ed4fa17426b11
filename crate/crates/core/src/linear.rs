//! Realizations as linear measurements of a uniform source over GF(q).
//!
//! A source `U` is uniform on `GF(q)^k`; every row of the pool is a
//! Vandermonde row `(1, α, …, α^{k−1})` and element `i` observes `⟨row, U⟩`
//! for each of its rows. `H(X_A) = rank(M_A) · log q`, with `M_A` the rows
//! used by `A`. Entropies are kept as integer ranks in units of `log q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{is_prime, next_prime, rank_in_place, vandermonde_row};
use crate::rational::{int, Rational};
use crate::setfn::{elements, GroundSet, Mask, SetFunction};
use crate::zoo::SaturatedCoverageSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum RowLabel {
    /// Copy `copy` of ground element `item`.
    ItemClone { item: usize, copy: u64 },
    /// Copy `copy` of universe element `u`.
    ElementClone { u: usize, copy: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub alpha: u64,
    pub label: RowLabel,
}

/// Entropy measured as `rank · log q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntropy {
    pub rank: usize,
    pub q: u64,
}

impl RankEntropy {
    pub fn bits(&self) -> f64 {
        self.rank as f64 * (self.q as f64).log2()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLinearSystem", into = "RawLinearSystem")]
pub struct LinearSystem {
    ground: GroundSet,
    q: u64,
    k: usize,
    rows: Vec<Row>,
    vars: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawLinearSystem {
    q: u64,
    k: usize,
    rows: Vec<Row>,
    vars: Vec<Vec<usize>>,
}

impl TryFrom<RawLinearSystem> for LinearSystem {
    type Error = Error;

    fn try_from(raw: RawLinearSystem) -> Result<Self> {
        LinearSystem::new(raw.q, raw.k, raw.rows, raw.vars)
    }
}

impl From<LinearSystem> for RawLinearSystem {
    fn from(sys: LinearSystem) -> Self {
        RawLinearSystem {
            q: sys.q,
            k: sys.k,
            rows: sys.rows,
            vars: sys.vars,
        }
    }
}

impl LinearSystem {
    pub fn new(q: u64, k: usize, rows: Vec<Row>, mut vars: Vec<Vec<usize>>) -> Result<Self> {
        let ground = GroundSet::new(vars.len())?;
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (r, row) in rows.iter().enumerate() {
            if row.alpha >= q {
                return Err(Error::invalid(
                    format!("rows[{r}].alpha"),
                    format!("{} is not a field element of GF({q})", row.alpha),
                ));
            }
            if !seen.insert(row.alpha) {
                return Err(Error::invalid(
                    format!("rows[{r}].alpha"),
                    format!("evaluation point {} repeats", row.alpha),
                ));
            }
        }
        for (i, v) in vars.iter_mut().enumerate() {
            if let Some(&bad) = v.iter().find(|&&r| r >= rows.len()) {
                return Err(Error::invalid(
                    format!("vars[{i}]"),
                    format!("unknown row {bad}"),
                ));
            }
            v.sort_unstable();
            v.dedup();
        }
        Ok(LinearSystem {
            ground,
            q,
            k,
            rows,
            vars,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn vars(&self) -> &[Vec<usize>] {
        &self.vars
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn row_vector(&self, index: usize) -> Vec<u64> {
        vandermonde_row(self.rows[index].alpha, self.k, self.q)
    }

    /// Row indices used by `mask`, ascending; shared rows appear once.
    pub fn rows_of(&self, mask: Mask) -> Vec<usize> {
        let mut hit = vec![false; self.rows.len()];
        for i in elements(mask) {
            for &r in &self.vars[i] {
                hit[r] = true;
            }
        }
        hit.iter()
            .enumerate()
            .filter_map(|(r, &h)| h.then_some(r))
            .collect()
    }

    pub fn entropy(&self, mask: Mask) -> RankEntropy {
        let mut m: Vec<Vec<u64>> = self
            .rows_of(mask)
            .into_iter()
            .map(|r| self.row_vector(r))
            .collect();
        RankEntropy {
            rank: rank_in_place(&mut m, self.q),
            q: self.q,
        }
    }
}

impl SetFunction for LinearSystem {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    /// Rank, i.e. entropy in units of `log q`.
    fn value(&self, mask: Mask) -> Rational {
        int(self.entropy(mask).rank as i128)
    }
}

/// Assigns consecutive evaluation points to clone groups. `groups[g]` is the
/// number of clones of group `g`; returns the rows and each group's row indices.
fn clone_pool(
    groups: &[u64],
    label: impl Fn(usize, u64) -> RowLabel,
) -> (Vec<Row>, Vec<Vec<usize>>) {
    let mut rows = Vec::new();
    let mut members = Vec::with_capacity(groups.len());
    for (g, &count) in groups.iter().enumerate() {
        let mut ids = Vec::with_capacity(count as usize);
        for copy in 0..count {
            ids.push(rows.len());
            rows.push(Row {
                alpha: rows.len() as u64,
                label: label(g, copy),
            });
        }
        members.push(ids);
    }
    (rows, members)
}

/// `H(X_A) = min(|A|, k) · log q` with `q` the smallest prime `>= n`.
pub fn build_card_truncation(n: usize, k: usize) -> Result<LinearSystem> {
    GroundSet::new(n)?;
    if k == 0 || k > n {
        return Err(Error::invalid(
            "k",
            format!("need 1 <= k <= n = {n}, got {k}"),
        ));
    }
    let (rows, vars) = clone_pool(&vec![1; n], |item, copy| RowLabel::ItemClone { item, copy });
    LinearSystem::new(next_prime(n as u64), k, rows, vars)
}

/// `H(X_A) = min(w(A), k) · log q`: item `i` owns `w_i` clones of a
/// cardinality truncation on `Σ w_i` points.
pub fn build_weighted_truncation(weights: &[u64], k: usize) -> Result<LinearSystem> {
    GroundSet::new(weights.len())?;
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let total: u64 = weights.iter().sum();
    let (rows, vars) = clone_pool(weights, |item, copy| RowLabel::ItemClone { item, copy });
    LinearSystem::new(next_prime(total), k, rows, vars)
}

/// `H(X_A) = min(Σ_{u ∈ ∪U_i} w_u, κ) · log q`. Clones belong to universe
/// elements, so items covering the same element share its rows.
pub fn build_saturated_coverage(spec: &SaturatedCoverageSpec) -> Result<LinearSystem> {
    let weights = spec.integer_weights();
    let total: u64 = weights.iter().sum();
    let (rows, element_rows) = clone_pool(weights, |u, copy| RowLabel::ElementClone { u, copy });
    let vars = spec
        .coverage()
        .covers()
        .iter()
        .map(|cover| {
            cover
                .iter()
                .flat_map(|&u| element_rows[u].clone())
                .collect()
        })
        .collect();
    LinearSystem::new(next_prime(total), spec.kappa() as usize, rows, vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::CoverageSpec;

    #[test]
    fn cardinality_system() {
        let sys = build_card_truncation(4, 2).unwrap();
        assert_eq!(sys.q(), 5);
        assert_eq!(sys.entropy(0b0111).rank, 2);
        assert_eq!(sys.entropy(0).rank, 0);
        assert_eq!(sys.entropy(0b0001).rank, 1);
        let full = build_card_truncation(3, 3).unwrap();
        assert_eq!(full.q(), 3);
        assert_eq!(full.entropy(0b111).rank, 3);
        assert!(build_card_truncation(3, 0).is_err());
        assert!(build_card_truncation(3, 4).is_err());
    }

    #[test]
    fn weighted_system() {
        let sys = build_weighted_truncation(&[2, 1], 2).unwrap();
        assert_eq!(sys.q(), 3);
        assert_eq!(sys.entropy(0b11).rank, 2);
        assert_eq!(sys.entropy(0b10).rank, 1);
        assert_eq!(sys.entropy(0b01).rank, 2);
        let zero = build_weighted_truncation(&[0, 3], 2).unwrap();
        assert_eq!(zero.entropy(0b01).rank, 0);
        assert_eq!(zero.q(), 3);
        assert!(build_weighted_truncation(&[1], 0).is_err());
        assert_eq!(build_weighted_truncation(&[0], 1).unwrap().q(), 2);
    }

    #[test]
    fn saturated_system() {
        let cov = CoverageSpec::new(vec![int(1), int(1)], vec![vec![0, 1], vec![1]]).unwrap();
        let spec = SaturatedCoverageSpec::new(cov.clone(), 1).unwrap();
        let sys = build_saturated_coverage(&spec).unwrap();
        assert_eq!(sys.entropy(0b10).rank, 1);
        assert_eq!(sys.entropy(0b11).rank, 1);

        let loose =
            build_saturated_coverage(&SaturatedCoverageSpec::new(cov.clone(), 5).unwrap()).unwrap();
        for m in 0..4 {
            assert_eq!(int(loose.entropy(m).rank as i128), cov.eval(m));
        }

        let none = build_saturated_coverage(&SaturatedCoverageSpec::new(cov, 0).unwrap()).unwrap();
        assert!((0..4).all(|m| none.entropy(m).rank == 0));
    }

    #[test]
    fn shared_rows_counted_once() {
        let cov = CoverageSpec::new(vec![int(2), int(1)], vec![vec![0], vec![0], vec![1]]).unwrap();
        let sys = build_saturated_coverage(&SaturatedCoverageSpec::new(cov, 3).unwrap()).unwrap();
        assert_eq!(sys.entropy(0b011), sys.entropy(0b001));
        assert_eq!(sys.entropy(0b111).rank, 3);
    }

    #[test]
    fn invalid_systems_are_rejected() {
        let row = |alpha| Row {
            alpha,
            label: RowLabel::ItemClone { item: 0, copy: 0 },
        };
        assert_eq!(
            LinearSystem::new(4, 1, vec![row(0)], vec![vec![0]]),
            Err(Error::NotPrime(4))
        );
        assert!(LinearSystem::new(5, 1, vec![row(1), row(1)], vec![vec![0, 1]]).is_err());
        assert!(LinearSystem::new(5, 1, vec![row(5)], vec![vec![0]]).is_err());
        assert!(LinearSystem::new(5, 1, vec![row(0)], vec![vec![1]]).is_err());
    }

    #[test]
    fn rank_bits() {
        let e = RankEntropy { rank: 2, q: 5 };
        assert!((e.bits() - 2.0 * 5f64.log2()).abs() < 1e-12);
    }
}
