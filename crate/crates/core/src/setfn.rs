//! Dense exact set-function tables, polymatroid checks and the submodular
//! information measures (mutual information, conditional gain, conditional
//! mutual information with `f` in place of entropy).

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rational::Rational;

/// Subset of the ground set; bit `i` set means element `i` is present.
pub type Mask = u32;

pub const MAX_GROUND: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundTooLarge(n));
        }
        Ok(GroundSet { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn subset_count(&self) -> usize {
        1usize << self.n
    }

    pub fn full(&self) -> Mask {
        ((1u64 << self.n) - 1) as Mask
    }

    pub fn check(&self, mask: Mask) -> Result<()> {
        if mask & !self.full() != 0 {
            return Err(Error::MaskOutOfRange { mask, n: self.n });
        }
        Ok(())
    }

    pub fn mask_of(&self, elements: &[usize]) -> Result<Mask> {
        elements.iter().try_fold(0, |m, &e| {
            if e >= self.n {
                Err(Error::ElementOutOfRange {
                    element: e,
                    n: self.n,
                })
            } else {
                Ok(m | (1 << e))
            }
        })
    }
}

/// Elements of `mask` in ascending order.
pub fn elements(mask: Mask) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(i)
    })
}

/// Anything with a value on every subset of a ground set.
pub trait SetFunction: Sync {
    fn ground(&self) -> GroundSet;

    /// Value at `mask`; callers guarantee `mask` fits the ground set.
    fn value(&self, mask: Mask) -> Rational;

    fn tabulate_with(&self, exec: Execution) -> SetFunctionTable {
        let ground = self.ground();
        let values = exec.map_range(ground.subset_count(), |m| self.value(m as Mask));
        SetFunctionTable { ground, values }
    }

    fn tabulate(&self) -> SetFunctionTable {
        self.tabulate_with(Execution::default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunctionTable {
    ground: GroundSet,
    values: Vec<Rational>,
}

impl SetFunctionTable {
    pub fn from_values(ground: GroundSet, values: Vec<Rational>) -> Result<Self> {
        if values.len() != ground.subset_count() {
            return Err(Error::invalid(
                "values",
                format!(
                    "expected {} entries for n = {}, got {}",
                    ground.subset_count(),
                    ground.len(),
                    values.len()
                ),
            ));
        }
        Ok(SetFunctionTable { ground, values })
    }

    pub fn from_fn(ground: GroundSet, f: impl Fn(Mask) -> Rational + Sync + Send) -> Self {
        let values = Execution::default().map_range(ground.subset_count(), |m| f(m as Mask));
        SetFunctionTable { ground, values }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn eval(&self, mask: Mask) -> Result<Rational> {
        self.ground.check(mask)?;
        Ok(self.values[mask as usize])
    }

    /// Unchecked lookup; panics on an out-of-range mask.
    pub fn at(&self, mask: Mask) -> Rational {
        self.values[mask as usize]
    }

    pub fn scaled(&self, factor: Rational) -> SetFunctionTable {
        SetFunctionTable {
            ground: self.ground,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// First mask (ascending) where the two tables differ.
    pub fn first_difference(&self, other: &SetFunctionTable) -> Result<Option<Mask>> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch(self.ground.len(), other.ground.len()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .position(|(a, b)| a != b)
            .map(|m| m as Mask))
    }
}

impl SetFunction for SetFunctionTable {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn value(&self, mask: Mask) -> Rational {
        self.values[mask as usize]
    }
}

/// A concrete violated inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `f(∅) != 0`.
    Normalization,
    /// `f(set ∪ {element}) < f(set)`.
    Monotonicity { set: Mask, element: usize },
    /// `f(set ∪ {i}) + f(set ∪ {j}) < f(set ∪ {i, j}) + f(set)`.
    Submodularity { set: Mask, i: usize, j: usize },
}

impl Witness {
    /// Re-evaluates the inequality on `f`; true iff it is genuinely violated.
    pub fn confirms(&self, f: &SetFunctionTable) -> bool {
        let full = f.ground.full();
        match *self {
            Witness::Normalization => !f.values[0].is_zero(),
            Witness::Monotonicity { set, element } => {
                let bit = 1 << element;
                set & !full == 0 && bit & full != 0 && set & bit == 0 && f.at(set | bit) < f.at(set)
            }
            Witness::Submodularity { set, i, j } => {
                let (bi, bj) = (1 << i, 1 << j);
                i != j
                    && (set | bi | bj) & !full == 0
                    && set & (bi | bj) == 0
                    && f.at(set | bi) + f.at(set | bj) < f.at(set | bi | bj) + f.at(set)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolymatroidReport {
    pub normalized: bool,
    pub monotone: bool,
    pub submodular: bool,
    pub witness: Option<Witness>,
}

impl PolymatroidReport {
    pub fn is_polymatroid(&self) -> bool {
        self.normalized && self.monotone && self.submodular
    }
}

pub fn check_polymatroid(f: &SetFunctionTable) -> PolymatroidReport {
    check_polymatroid_with(f, Execution::default())
}

/// Scans the elemental inequalities in ascending mask order. The witness is
/// the first violation found, checking normalization, then monotonicity,
/// then submodularity.
pub fn check_polymatroid_with(f: &SetFunctionTable, exec: Execution) -> PolymatroidReport {
    let n = f.ground.len();
    let count = f.ground.subset_count();

    let normalized = f.values[0].is_zero();

    let monotone_violation = exec.find_first(count, |m| {
        let set = m as Mask;
        (0..n)
            .filter(|&i| set & (1 << i) == 0)
            .find(|&i| f.at(set | (1 << i)) < f.at(set))
            .map(|element| Witness::Monotonicity { set, element })
    });

    let submodular_violation = exec.find_first(count, |m| {
        let set = m as Mask;
        let fa = f.at(set);
        for i in (0..n).filter(|&i| set & (1 << i) == 0) {
            let fi = f.at(set | (1 << i));
            for j in (i + 1..n).filter(|&j| set & (1 << j) == 0) {
                let fj = f.at(set | (1 << j));
                if fi + fj < f.at(set | (1 << i) | (1 << j)) + fa {
                    return Some(Witness::Submodularity { set, i, j });
                }
            }
        }
        None
    });

    let witness = if !normalized {
        Some(Witness::Normalization)
    } else {
        monotone_violation.or(submodular_violation)
    };

    PolymatroidReport {
        normalized,
        monotone: monotone_violation.is_none(),
        submodular: submodular_violation.is_none(),
        witness,
    }
}

/// Submodularity via the lattice form `f(A) + f(B) >= f(A∪B) + f(A∩B)` over
/// all pairs. Quadratic in the table size; intended for small n.
pub fn is_submodular_lattice(f: &SetFunctionTable) -> bool {
    let count = f.ground.subset_count();
    Execution::default().all(count, |a| {
        let a = a as Mask;
        (0..count as Mask).all(|b| f.at(a) + f.at(b) >= f.at(a | b) + f.at(a & b))
    })
}

fn disjoint(first: Mask, second: Mask) -> Result<()> {
    let common = first & second;
    if common != 0 {
        return Err(Error::Overlap {
            first,
            second,
            common,
        });
    }
    Ok(())
}

/// `f(A) + f(B) - f(A ∪ B)` for disjoint `A`, `B`.
pub fn smi(f: &SetFunctionTable, a: Mask, b: Mask) -> Result<Rational> {
    f.ground.check(a)?;
    f.ground.check(b)?;
    disjoint(a, b)?;
    Ok(f.at(a) + f.at(b) - f.at(a | b))
}

/// `f(A ∪ B) - f(B)` for disjoint `A`, `B`.
pub fn cond_gain(f: &SetFunctionTable, a: Mask, b: Mask) -> Result<Rational> {
    f.ground.check(a)?;
    f.ground.check(b)?;
    disjoint(a, b)?;
    Ok(f.at(a | b) - f.at(b))
}

/// `f(A ∪ C) + f(B ∪ C) - f(C) - f(A ∪ B ∪ C)` for pairwise disjoint arguments.
pub fn scmi(f: &SetFunctionTable, a: Mask, b: Mask, c: Mask) -> Result<Rational> {
    for m in [a, b, c] {
        f.ground.check(m)?;
    }
    disjoint(a, b)?;
    disjoint(a, c)?;
    disjoint(b, c)?;
    Ok(f.at(a | c) + f.at(b | c) - f.at(c) - f.at(a | b | c))
}

/// All pairwise-disjoint `(A, B, C)` triples, encoded by assigning each element
/// one of four labels (none, A, B, C). There are `4^n` of them.
pub fn disjoint_triples(ground: GroundSet) -> impl Iterator<Item = (Mask, Mask, Mask)> {
    let n = ground.len();
    (0..(1u64 << (2 * n))).map(move |code| {
        let (mut a, mut b, mut c) = (0, 0, 0);
        for i in 0..n {
            match (code >> (2 * i)) & 3 {
                1 => a |= 1 << i,
                2 => b |= 1 << i,
                3 => c |= 1 << i,
                _ => {}
            }
        }
        (a, b, c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn table(n: usize, values: &[i128]) -> SetFunctionTable {
        SetFunctionTable::from_values(
            GroundSet::new(n).unwrap(),
            values.iter().map(|&v| int(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn ground_set_bounds() {
        assert!(GroundSet::new(20).is_ok());
        assert_eq!(GroundSet::new(21), Err(Error::GroundTooLarge(21)));
        let g = GroundSet::new(3).unwrap();
        assert_eq!(g.full(), 0b111);
        assert!(g.check(0b1000).is_err());
        assert_eq!(g.mask_of(&[0, 2]).unwrap(), 0b101);
        assert!(g.mask_of(&[3]).is_err());
        assert_eq!(GroundSet::new(0).unwrap().full(), 0);
    }

    #[test]
    fn eval_reads_table_and_rejects_wide_masks() {
        let f = table(2, &[0, 1, 2, 3]);
        assert_eq!(f.eval(0).unwrap(), int(0));
        assert_eq!(f.eval(0b11).unwrap(), int(3));
        assert!(matches!(f.eval(0b100), Err(Error::MaskOutOfRange { .. })));
    }

    #[test]
    fn modular_table_is_polymatroid() {
        let r = check_polymatroid(&table(2, &[0, 1, 1, 2]));
        assert!(r.is_polymatroid());
        assert_eq!(r.witness, None);
    }

    #[test]
    fn supermodular_pair_is_rejected_with_first_witness() {
        let f = table(2, &[0, 0, 0, 1]);
        let r = check_polymatroid(&f);
        assert!(r.normalized && r.monotone);
        assert!(!r.submodular);
        let w = r.witness.unwrap();
        assert_eq!(w, Witness::Submodularity { set: 0, i: 0, j: 1 });
        assert!(w.confirms(&f));
    }

    #[test]
    fn normalization_and_monotonicity_witnesses() {
        let f = table(1, &[1, 2]);
        let r = check_polymatroid(&f);
        assert!(!r.normalized);
        assert_eq!(r.witness, Some(Witness::Normalization));
        assert!(Witness::Normalization.confirms(&f));

        let g = table(2, &[0, 2, 1, 1]);
        let r = check_polymatroid(&g);
        assert!(!r.monotone);
        assert_eq!(
            r.witness,
            Some(Witness::Monotonicity {
                set: 0b01,
                element: 1
            })
        );
        assert!(r.witness.unwrap().confirms(&g));
    }

    #[test]
    fn witness_strategy_independent() {
        let f = table(3, &[0, 0, 0, 1, 0, 1, 1, 3]);
        assert_eq!(
            check_polymatroid_with(&f, Execution::Sequential),
            check_polymatroid_with(&f, Execution::Parallel)
        );
    }

    #[test]
    fn sim_primitives_on_small_coverage() {
        // universe {a, b}, unit weights, U1 = {a}, U2 = {a, b}
        let f = table(2, &[0, 1, 2, 2]);
        assert_eq!(smi(&f, 0b01, 0b10).unwrap(), int(1));
        assert_eq!(cond_gain(&f, 0b01, 0b10).unwrap(), int(0));
        assert_eq!(smi(&f, 0b01, 0).unwrap(), int(0));
        assert_eq!(cond_gain(&f, 0b11, 0).unwrap(), int(2));
        assert_eq!(
            scmi(&f, 0b01, 0b10, 0).unwrap(),
            smi(&f, 0b01, 0b10).unwrap()
        );
    }

    #[test]
    fn scmi_with_third_cover() {
        // U1 = {a}, U2 = {a, b}, U3 = {b}
        let f = table(3, &[0, 1, 2, 2, 1, 2, 2, 2]);
        assert_eq!(scmi(&f, 0b001, 0b100, 0b010).unwrap(), int(0));
    }

    #[test]
    fn overlapping_arguments_are_rejected() {
        let f = table(2, &[0, 1, 1, 2]);
        assert!(matches!(smi(&f, 0b11, 0b10), Err(Error::Overlap { .. })));
        assert!(matches!(
            cond_gain(&f, 0b01, 0b01),
            Err(Error::Overlap { .. })
        ));
        assert!(matches!(
            scmi(&f, 0b01, 0b10, 0b10),
            Err(Error::Overlap { .. })
        ));
        assert!(matches!(
            smi(&f, 0b100, 0),
            Err(Error::MaskOutOfRange { .. })
        ));
    }

    #[test]
    fn triples_enumeration_is_complete_and_disjoint() {
        let g = GroundSet::new(3).unwrap();
        let all: Vec<_> = disjoint_triples(g).collect();
        assert_eq!(all.len(), 64);
        assert!(all
            .iter()
            .all(|&(a, b, c)| a & b == 0 && a & c == 0 && b & c == 0));
    }
}
