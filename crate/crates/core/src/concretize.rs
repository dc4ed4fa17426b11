//! Explicit finite joint distributions for realizations, and entropies
//! recomputed from the probability mass function by full enumeration.
//!
//! Every base variable is independent and uniform, so each base outcome has
//! probability `1 / N`. An observable is a tuple of features: base symbols
//! (atom systems) or linear forms over GF(q) (linear systems). `H(X_A)` is
//! obtained by partitioning the `N` outcomes by the value of `X_A`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::atoms::AtomSystem;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linear::LinearSystem;
use crate::mixture::{Block, MixtureRealization};
use crate::rational::{as_integer, denominator_lcm, exact, to_f64, Rational};
use crate::setfn::{self, elements, GroundSet, Mask, SetFunctionTable};

pub const DEFAULT_CAP: u128 = 1 << 20;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feature {
    /// The symbol of one base variable.
    Base(usize),
    /// `Σ coeffs[j] · base[vars[j]] mod q`.
    LinearForm {
        vars: Vec<usize>,
        coeffs: Vec<u64>,
        q: u64,
    },
}

impl Feature {
    fn alphabet(&self, alphabets: &[u64]) -> u64 {
        match self {
            Feature::Base(v) => alphabets[*v],
            Feature::LinearForm { q, .. } => *q,
        }
    }

    fn eval(&self, digits: &[u64]) -> u64 {
        match self {
            Feature::Base(v) => digits[*v],
            Feature::LinearForm { vars, coeffs, q } => {
                vars.iter().zip(coeffs).fold(0u64, |acc, (&v, &c)| {
                    (acc + crate::gf::mul_mod(c, digits[v], *q)) % q
                })
            }
        }
    }
}

/// Per-variable dense labels of the observable value at every base outcome.
#[derive(Debug)]
struct Codes {
    labels: Vec<Vec<u32>>,
    classes: Vec<u32>,
}

#[derive(Debug)]
pub struct JointModel {
    ground: GroundSet,
    alphabets: Vec<u64>,
    observables: Vec<Vec<Feature>>,
    states: u64,
    bits_per_unit: f64,
    codes: OnceLock<Codes>,
}

impl Clone for JointModel {
    fn clone(&self) -> Self {
        JointModel {
            ground: self.ground,
            alphabets: self.alphabets.clone(),
            observables: self.observables.clone(),
            states: self.states,
            bits_per_unit: self.bits_per_unit,
            codes: OnceLock::new(),
        }
    }
}

fn state_count(alphabets: &[u64], cap: u128) -> Result<u64> {
    let mut states: u128 = 1;
    for &a in alphabets {
        states = states.saturating_mul(a as u128);
        if states > cap {
            return Err(Error::Capacity { states, cap });
        }
    }
    Ok(states as u64)
}

impl JointModel {
    /// `alphabets[v]` is the size of independent uniform base variable `v`;
    /// `observables[i]` lists the features making up `X_i`. `bits_per_unit`
    /// converts the symbolic function unit to bits.
    pub fn new(
        alphabets: Vec<u64>,
        observables: Vec<Vec<Feature>>,
        bits_per_unit: f64,
        cap: u128,
    ) -> Result<Self> {
        let ground = GroundSet::new(observables.len())?;
        if let Some(v) = alphabets.iter().position(|&a| a == 0) {
            return Err(Error::invalid(
                format!("alphabets[{v}]"),
                "must be positive",
            ));
        }
        for (i, obs) in observables.iter().enumerate() {
            for f in obs {
                let ok = match f {
                    Feature::Base(v) => *v < alphabets.len(),
                    Feature::LinearForm { vars, coeffs, q } => {
                        *q > 0
                            && vars.len() == coeffs.len()
                            && vars.iter().all(|&v| v < alphabets.len())
                    }
                };
                if !ok {
                    return Err(Error::invalid(
                        format!("observables[{i}]"),
                        "feature refers to a missing base variable",
                    ));
                }
            }
        }
        let states = state_count(&alphabets, cap)?;
        Ok(JointModel {
            ground,
            alphabets,
            observables,
            states,
            bits_per_unit,
            codes: OnceLock::new(),
        })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn states(&self) -> u64 {
        self.states
    }

    pub fn alphabets(&self) -> &[u64] {
        &self.alphabets
    }

    pub fn observables(&self) -> &[Vec<Feature>] {
        &self.observables
    }

    pub fn bits_per_unit(&self) -> f64 {
        self.bits_per_unit
    }

    /// Independent product: base variables are concatenated and `X_i` becomes
    /// the tuple of the factors' `X_i`.
    pub fn product(models: &[JointModel], cap: u128) -> Result<JointModel> {
        let n = models.first().map_or(0, |m| m.ground.len());
        let mut alphabets = Vec::new();
        let mut observables = vec![Vec::new(); n];
        for m in models {
            if m.ground.len() != n {
                return Err(Error::GroundMismatch(n, m.ground.len()));
            }
            let offset = alphabets.len();
            alphabets.extend_from_slice(&m.alphabets);
            for (i, obs) in m.observables.iter().enumerate() {
                observables[i].extend(obs.iter().map(|f| match f {
                    Feature::Base(v) => Feature::Base(v + offset),
                    Feature::LinearForm { vars, coeffs, q } => Feature::LinearForm {
                        vars: vars.iter().map(|v| v + offset).collect(),
                        coeffs: coeffs.clone(),
                        q: *q,
                    },
                }));
            }
        }
        JointModel::new(alphabets, observables, f64::NAN, cap)
    }

    fn codes(&self) -> &Codes {
        self.codes.get_or_init(|| {
            let per_var = Execution::default().map_range(self.observables.len(), |i| {
                self.observable_labels(&self.observables[i])
            });
            let (labels, classes) = per_var.into_iter().unzip();
            Codes { labels, classes }
        })
    }

    fn observable_labels(&self, features: &[Feature]) -> (Vec<u32>, u32) {
        let radices: Vec<u64> = features
            .iter()
            .map(|f| f.alphabet(&self.alphabets))
            .collect();
        let packed = radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
            .is_some();
        let mut digits = vec![0u64; self.alphabets.len()];
        let mut labels = Vec::with_capacity(self.states as usize);
        let mut by_key: HashMap<u128, u32> = HashMap::new();
        let mut by_tuple: HashMap<Vec<u64>, u32> = HashMap::new();
        for s in 0..self.states {
            let mut rest = s;
            for (d, &a) in digits.iter_mut().zip(&self.alphabets) {
                *d = rest % a;
                rest /= a;
            }
            let label = if packed {
                let key = features.iter().zip(&radices).fold(0u128, |acc, (f, &r)| {
                    acc * r as u128 + f.eval(&digits) as u128
                });
                let next = by_key.len() as u32;
                *by_key.entry(key).or_insert(next)
            } else {
                let tuple: Vec<u64> = features.iter().map(|f| f.eval(&digits)).collect();
                let next = by_tuple.len() as u32;
                *by_tuple.entry(tuple).or_insert(next)
            };
            labels.push(label);
        }
        let classes = by_key.len().max(by_tuple.len()).max(1) as u32;
        (labels, classes)
    }

    /// `H(X_A)` in bits from the pmf.
    pub fn entropy(&self, mask: Mask) -> f64 {
        let codes = self.codes();
        let states = self.states as usize;
        let mut labels = vec![0u32; states];
        let mut classes = 1u32;
        for i in elements(mask) {
            let (obs, card) = (&codes.labels[i], codes.classes[i]);
            let dense_len = classes as u64 * card as u64;
            let mut next = 0u32;
            if dense_len <= 4 * states as u64 + 64 {
                let mut slot = vec![u32::MAX; dense_len as usize];
                for (l, &o) in labels.iter_mut().zip(obs) {
                    let key = *l as usize * card as usize + o as usize;
                    if slot[key] == u32::MAX {
                        slot[key] = next;
                        next += 1;
                    }
                    *l = slot[key];
                }
            } else {
                let mut slot: HashMap<(u32, u32), u32> = HashMap::new();
                for (l, &o) in labels.iter_mut().zip(obs) {
                    *l = *slot.entry((*l, o)).or_insert_with(|| {
                        next += 1;
                        next - 1
                    });
                }
            }
            classes = next.max(1);
        }
        let mut counts = vec![0u64; classes as usize];
        for &l in &labels {
            counts[l as usize] += 1;
        }
        let n = self.states as f64;
        let weighted: f64 = counts
            .iter()
            .filter(|&&c| c > 1)
            .map(|&c| c as f64 * (c as f64).log2())
            .sum();
        (n.log2() - weighted / n).max(0.0)
    }

    /// Entropies of all subsets, in bits.
    pub fn entropy_table(&self, exec: Execution) -> Vec<f64> {
        self.codes();
        exec.map_range(self.ground.subset_count(), |m| self.entropy(m as Mask))
    }
}

pub fn exact_entropy(model: &JointModel, mask: Mask) -> f64 {
    model.entropy(mask)
}

/// Smallest `D` making every atom weight times `D` an integer.
pub fn atom_scale(sys: &AtomSystem) -> i128 {
    denominator_lcm(sys.atoms().iter().map(|a| &a.weight))
}

/// Atom of weight `w` becomes a uniform variable on `2^(D·w)` symbols; entropies
/// come out as `D · H(A)` bits.
pub fn instantiate_atoms(sys: &AtomSystem, scale: i128, cap: u128) -> Result<JointModel> {
    if scale <= 0 {
        return Err(Error::invalid("scale", "must be positive"));
    }
    let mut alphabets = Vec::with_capacity(sys.atoms().len());
    let mut total_bits: u128 = 0;
    for atom in sys.atoms() {
        let bits = as_integer(&(atom.weight * scale)).ok_or_else(|| {
            Error::invalid(
                format!("atoms[{}].weight", atom.id),
                format!("{} · {scale} is not an integer", atom.weight),
            )
        })?;
        total_bits += bits as u128;
        if total_bits > 127 || (1u128 << total_bits) > cap {
            return Err(Error::Capacity {
                states: 1u128.checked_shl(total_bits as u32).unwrap_or(u128::MAX),
                cap,
            });
        }
        alphabets.push(1u64 << bits);
    }
    let observables = sys
        .vars()
        .iter()
        .map(|v| v.iter().map(|&a| Feature::Base(a)).collect())
        .collect();
    JointModel::new(alphabets, observables, scale as f64, cap)
}

/// Source `U` uniform on `GF(q)^k`; `X_i` is the tuple `(⟨row, U⟩)` over the rows of `i`.
pub fn instantiate_linear(sys: &LinearSystem, cap: u128) -> Result<JointModel> {
    let alphabets = vec![sys.q(); sys.k()];
    state_count(&alphabets, cap)?;
    let source: Vec<usize> = (0..sys.k()).collect();
    let observables = sys
        .vars()
        .iter()
        .map(|rows| {
            rows.iter()
                .map(|&r| Feature::LinearForm {
                    vars: source.clone(),
                    coeffs: sys.row_vector(r),
                    q: sys.q(),
                })
                .collect()
        })
        .collect();
    JointModel::new(alphabets, observables, (sys.q() as f64).log2(), cap)
}

pub fn instantiate_block(block: &Block, cap: u128) -> Result<JointModel> {
    match block {
        Block::Atoms(s) => instantiate_atoms(s, atom_scale(s), cap),
        Block::Linear(s) => instantiate_linear(s, cap),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetComparison {
    pub mask: Mask,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_exact")]
    pub symbolic: Option<Rational>,
    pub symbolic_bits: f64,
    pub numeric_bits: f64,
    pub difference: f64,
}

mod opt_exact {
    use super::*;
    use crate::rational::Exact;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.map(Exact).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        Ok(Option::<Exact>::deserialize(d)?.map(|e| e.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub states: u64,
    pub tolerance: f64,
    pub max_difference: f64,
    pub passed: bool,
    pub rows: Vec<SubsetComparison>,
}

impl EntropyReport {
    pub fn failures(&self) -> impl Iterator<Item = &SubsetComparison> {
        self.rows
            .iter()
            .filter(move |r| r.difference > self.tolerance)
    }
}

fn report(model: &JointModel, expected: Vec<(Option<Rational>, f64)>, tol: f64) -> EntropyReport {
    let numeric = model.entropy_table(Execution::default());
    let rows: Vec<SubsetComparison> = expected
        .into_iter()
        .zip(numeric)
        .enumerate()
        .map(
            |(m, ((symbolic, symbolic_bits), numeric_bits))| SubsetComparison {
                mask: m as Mask,
                symbolic,
                symbolic_bits,
                numeric_bits,
                difference: (symbolic_bits - numeric_bits).abs(),
            },
        )
        .collect();
    let max_difference = rows.iter().map(|r| r.difference).fold(0.0, f64::max);
    EntropyReport {
        states: model.states,
        tolerance: tol,
        max_difference,
        passed: max_difference <= tol,
        rows,
    }
}

/// Compares pmf entropies with `symbolic` (in function units, converted with
/// the model's bits-per-unit) on every subset.
pub fn verify_model(
    model: &JointModel,
    symbolic: &SetFunctionTable,
    tol: f64,
) -> Result<EntropyReport> {
    if symbolic.ground() != model.ground {
        return Err(Error::GroundMismatch(
            model.ground.len(),
            symbolic.ground().len(),
        ));
    }
    let expected = symbolic
        .values()
        .iter()
        .map(|v| (Some(*v), to_f64(v) * model.bits_per_unit))
        .collect();
    Ok(report(model, expected, tol))
}

/// Same comparison against expected values already in bits.
pub fn verify_bits(model: &JointModel, expected_bits: &[f64], tol: f64) -> Result<EntropyReport> {
    if expected_bits.len() != model.ground.subset_count() {
        return Err(Error::invalid(
            "expected_bits",
            "length does not match ground set",
        ));
    }
    Ok(report(
        model,
        expected_bits.iter().map(|&b| (None, b)).collect(),
        tol,
    ))
}

/// Blockwise concretization of a mixture: one model per block, each verified
/// against its own block table.
pub fn verify_mixture_blockwise(
    mix: &MixtureRealization,
    cap: u128,
    tol: f64,
) -> Result<Vec<EntropyReport>> {
    mix.blocks()
        .iter()
        .map(|b| {
            let model = instantiate_block(&b.block, cap)?;
            let table = SetFunctionTable::from_fn(mix.ground(), |m| b.block.entropy(m));
            verify_model(&model, &table, tol)
        })
        .collect()
}

/// Whole-mixture product space, checked against `Σ_t H_t(A)` in bits
/// (scales do not enter the joint distribution). Fails with a capacity error
/// when the product does not fit.
pub fn verify_mixture_product(
    mix: &MixtureRealization,
    cap: u128,
    tol: f64,
) -> Result<EntropyReport> {
    let models = mix
        .blocks()
        .iter()
        .map(|b| instantiate_block(&b.block, cap))
        .collect::<Result<Vec<_>>>()?;
    let product = JointModel::product(&models, cap)?;
    let expected: Vec<f64> = (0..mix.ground().subset_count())
        .map(|m| {
            mix.blocks()
                .iter()
                .zip(&models)
                .map(|(b, model)| to_f64(&b.block.entropy(m as Mask)) * model.bits_per_unit)
                .sum()
        })
        .collect();
    verify_bits(&product, &expected, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Paired {
    pub combinatorial_bits: f64,
    pub shannon_bits: f64,
    pub difference: f64,
}

impl Paired {
    fn new(combinatorial: Rational, bits_per_unit: f64, shannon_bits: f64) -> Self {
        let combinatorial_bits = to_f64(&combinatorial) * bits_per_unit;
        Paired {
            combinatorial_bits,
            shannon_bits,
            difference: (combinatorial_bits - shannon_bits).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCrossCheck {
    pub a: Mask,
    pub b: Mask,
    pub c: Mask,
    #[serde(with = "exact")]
    pub smi: Rational,
    #[serde(with = "exact")]
    pub cond_gain: Rational,
    #[serde(with = "exact")]
    pub scmi: Rational,
    pub mutual_information: Paired,
    pub conditional_entropy: Paired,
    pub conditional_mutual_information: Paired,
}

impl SimCrossCheck {
    pub fn max_difference(&self) -> f64 {
        self.mutual_information
            .difference
            .max(self.conditional_entropy.difference)
            .max(self.conditional_mutual_information.difference)
    }
}

/// Pairs `I_f(A;B)`, `H_f(A|B)`, `I_f(A;B|C)` with `I(X_A;X_B)`,
/// `H(X_A|X_B)`, `I(X_A;X_B|X_C)` computed from the pmf.
pub fn shannon_cross_check(
    model: &JointModel,
    f: &SetFunctionTable,
    a: Mask,
    b: Mask,
    c: Mask,
) -> Result<SimCrossCheck> {
    if f.ground() != model.ground {
        return Err(Error::GroundMismatch(model.ground.len(), f.ground().len()));
    }
    let smi = setfn::smi(f, a, b)?;
    let cond_gain = setfn::cond_gain(f, a, b)?;
    let scmi = setfn::scmi(f, a, b, c)?;
    let h = |m: Mask| model.entropy(m);
    let mi = h(a) + h(b) - h(a | b);
    let ce = h(a | b) - h(b);
    let cmi = h(a | c) + h(b | c) - h(c) - h(a | b | c);
    let unit = model.bits_per_unit;
    Ok(SimCrossCheck {
        a,
        b,
        c,
        smi,
        cond_gain,
        scmi,
        mutual_information: Paired::new(smi, unit, mi),
        conditional_entropy: Paired::new(cond_gain, unit, ce),
        conditional_mutual_information: Paired::new(scmi, unit, cmi),
    })
}

/// Converts a realization table given in units to bits for one model.
pub fn to_bits(table: &SetFunctionTable, model: &JointModel) -> Vec<f64> {
    table
        .values()
        .iter()
        .map(|v| v.to_f64().unwrap_or(f64::NAN) * model.bits_per_unit)
        .collect()
}
