//! The verification pipeline behind `entropic verify`.

use std::collections::BTreeSet;
use std::time::Instant;

use entropic_core::concretize::{
    atom_scale, instantiate_atoms, instantiate_block, instantiate_linear, shannon_cross_check,
    verify_mixture_product, verify_model, EntropyReport, JointModel, DEFAULT_CAP,
    DEFAULT_TOLERANCE,
};
use entropic_core::mixture::Block;
use entropic_core::rational::{display, Exact, Rational};
use entropic_core::setfn::{
    check_polymatroid, cond_gain, disjoint_triples, scmi, smi, PolymatroidReport,
};
use entropic_core::{realize, Error, Mask, Realization, SetFunction, SetFunctionTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::Input;
use crate::error::{CliError, Result, EXIT_CAPACITY, EXIT_FAIL, EXIT_PASS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Tabulate,
    Polymatroid,
    Realize,
    Symbolic,
    Concretize,
    Sim,
}

impl Stage {
    pub fn parse_list(text: &str) -> Result<BTreeSet<Stage>> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s {
                "tabulate" => Ok(Stage::Tabulate),
                "polymatroid" => Ok(Stage::Polymatroid),
                "realize" => Ok(Stage::Realize),
                "symbolic" => Ok(Stage::Symbolic),
                "concretize" => Ok(Stage::Concretize),
                "sim" => Ok(Stage::Sim),
                other => Err(CliError::Usage(format!("unknown stage {other:?}"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub stages: BTreeSet<Stage>,
    pub cap: u128,
    pub sim_samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            stages: [
                Stage::Tabulate,
                Stage::Polymatroid,
                Stage::Realize,
                Stage::Symbolic,
            ]
            .into_iter()
            .collect(),
            cap: DEFAULT_CAP,
            sim_samples: 0,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    CapacityExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub stage: Stage,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub mask: Mask,
    pub expected: Exact,
    pub realized: Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicSummary {
    pub subsets: usize,
    pub matched: usize,
    pub first_failure: Option<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub states: u64,
    pub max_difference: f64,
    pub passed: bool,
    pub first_failure: Option<Mask>,
}

impl From<&EntropyReport> for BlockSummary {
    fn from(r: &EntropyReport) -> Self {
        BlockSummary {
            states: r.states,
            max_difference: r.max_difference,
            passed: r.passed,
            first_failure: r.failures().next().map(|f| f.mask),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcretizationSummary {
    pub tolerance: f64,
    pub blocks: Vec<BlockSummary>,
    /// Whole-mixture product space, when it fits under the cap.
    pub product: Option<BlockSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimFailure {
    pub a: Mask,
    pub b: Mask,
    pub c: Mask,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub seed: u64,
    pub triples_available: u64,
    pub triples_checked: usize,
    /// Shannon comparisons were made against the concretized pmf.
    pub shannon: bool,
    pub max_shannon_difference: f64,
    pub first_failure: Option<SimFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: String,
    pub n: usize,
    pub source: String,
    pub realization: Option<String>,
    pub stages: Vec<StageResult>,
    pub polymatroid: Option<PolymatroidReport>,
    pub symbolic: Option<SymbolicSummary>,
    pub concretization: Option<ConcretizationSummary>,
    pub sim: Option<SimSummary>,
    pub passed: bool,
    pub wall_time_ms: u128,
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        if self.stages.iter().any(|s| s.status == Status::Fail) {
            EXIT_FAIL
        } else if self
            .stages
            .iter()
            .any(|s| s.status == Status::CapacityExceeded)
        {
            EXIT_CAPACITY
        } else {
            EXIT_PASS
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} (n = {}, {}): {}\n",
            self.family,
            self.n,
            self.source,
            if self.passed { "PASS" } else { "FAIL" }
        );
        for s in &self.stages {
            let status = match s.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
                Status::CapacityExceeded => "capacity",
            };
            out.push_str(&format!(
                "  {:<12} {:<8} {}\n",
                format!("{:?}", s.stage).to_lowercase(),
                status,
                s.detail
            ));
        }
        out.push_str(&format!("  wall time {} ms\n", self.wall_time_ms));
        out
    }
}

/// Pmf models for each independent block of a realization.
struct Concrete {
    blocks: Vec<(Rational, JointModel, SetFunctionTable)>,
}

fn concretize(real: &Realization, cap: u128) -> entropic_core::Result<Concrete> {
    let blocks = match real {
        Realization::Atoms(s) => {
            vec![(
                Rational::from_integer(1),
                instantiate_atoms(s, atom_scale(s), cap)?,
                s.tabulate(),
            )]
        }
        Realization::Linear(s) => {
            vec![(
                Rational::from_integer(1),
                instantiate_linear(s, cap)?,
                s.tabulate(),
            )]
        }
        Realization::Mixture(m) => m
            .blocks()
            .iter()
            .map(|b| {
                let table = match &b.block {
                    Block::Atoms(s) => s.tabulate(),
                    Block::Linear(s) => s.tabulate(),
                };
                Ok((b.scale, instantiate_block(&b.block, cap)?, table))
            })
            .collect::<entropic_core::Result<Vec<_>>>()?,
    };
    Ok(Concrete { blocks })
}

/// Largest gap, in bits, between each block's combinatorial measures and the
/// Shannon measures of its pmf.
fn shannon_gap(concrete: &Concrete, a: Mask, b: Mask, c: Mask) -> entropic_core::Result<f64> {
    let mut worst: f64 = 0.0;
    for (_, model, table) in &concrete.blocks {
        worst = worst.max(shannon_cross_check(model, table, a, b, c)?.max_difference());
    }
    Ok(worst)
}

fn pick_triples(n: usize, samples: usize, seed: u64) -> (u64, Vec<(Mask, Mask, Mask)>) {
    let available = 1u64 << (2 * n);
    let ground = entropic_core::GroundSet::new(n).expect("validated ground set");
    if available <= samples as u64 {
        return (available, disjoint_triples(ground).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = (0..samples)
        .map(|_| {
            let (mut a, mut b, mut c) = (0, 0, 0);
            for i in 0..n {
                match rng.gen_range(0..4) {
                    1 => a |= 1 << i,
                    2 => b |= 1 << i,
                    3 => c |= 1 << i,
                    _ => {}
                }
            }
            (a, b, c)
        })
        .collect();
    (available, picked)
}

/// Runs the enabled stages. Validation errors in the spec abort with an
/// error; stage failures are recorded in the report.
pub fn verify(input: &Input, opts: &VerifyOptions) -> Result<VerificationReport> {
    let started = Instant::now();
    let doc = input.spec();
    let spec = doc.to_spec()?;
    let n = spec.ground().len();
    let enabled = |s: Stage| opts.stages.contains(&s);
    let mut stages = Vec::new();
    let mut record = |stage, status, detail: String| {
        stages.push(StageResult {
            stage,
            status,
            detail,
        })
    };

    let needs_table = [
        Stage::Tabulate,
        Stage::Polymatroid,
        Stage::Symbolic,
        Stage::Sim,
    ]
    .into_iter()
    .any(enabled);
    let table = needs_table.then(|| spec.tabulate());
    if enabled(Stage::Tabulate) {
        record(
            Stage::Tabulate,
            Status::Pass,
            format!("{} subsets", 1usize << n),
        );
    }

    let mut polymatroid = None;
    if enabled(Stage::Polymatroid) {
        let t = table.as_ref().unwrap();
        let report = check_polymatroid(t);
        let (status, detail) = match report.witness {
            None => (Status::Pass, "normalized, monotone, submodular".to_string()),
            Some(w) => (
                Status::Fail,
                format!("violation {w:?} (re-verified: {})", w.confirms(t)),
            ),
        };
        record(Stage::Polymatroid, status, detail);
        polymatroid = Some(report);
    }

    let needs_realization = [
        Stage::Realize,
        Stage::Symbolic,
        Stage::Concretize,
        Stage::Sim,
    ]
    .into_iter()
    .any(enabled);
    let realization = if !needs_realization {
        None
    } else {
        match input {
            Input::Certificate(cert) => {
                let units_ok = cert.units == cert.realization.units();
                if enabled(Stage::Realize) {
                    let status = if units_ok { Status::Pass } else { Status::Fail };
                    record(
                        Stage::Realize,
                        status,
                        format!(
                            "{} realization loaded from certificate",
                            cert.realization.kind()
                        ),
                    );
                }
                Some(cert.realization.clone())
            }
            Input::Spec(_) => {
                let built = realize(&spec)?;
                if enabled(Stage::Realize) {
                    match &built {
                        Some(r) => record(
                            Stage::Realize,
                            Status::Pass,
                            format!("{} realization built", r.kind()),
                        ),
                        None => record(
                            Stage::Realize,
                            Status::Skipped,
                            "explicit tables have no construction".into(),
                        ),
                    }
                }
                built
            }
        }
    };
    if let Some(r) = &realization {
        if r.ground() != spec.ground() {
            return Err(CliError::Validation(Error::GroundMismatch(
                n,
                r.ground().len(),
            )));
        }
    }

    let realized_table = realization.as_ref().map(|r| r.tabulate());
    let mut symbolic = None;
    if enabled(Stage::Symbolic) {
        match (&realized_table, &table) {
            (Some(rt), Some(t)) => {
                let first = t.first_difference(rt)?;
                let matched = t
                    .values()
                    .iter()
                    .zip(rt.values())
                    .filter(|(x, y)| x == y)
                    .count();
                record(
                    Stage::Symbolic,
                    if first.is_none() {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    format!("{matched}/{} subsets equal", t.values().len()),
                );
                symbolic = Some(SymbolicSummary {
                    subsets: t.values().len(),
                    matched,
                    first_failure: first.map(|m| Mismatch {
                        mask: m,
                        expected: Exact(t.at(m)),
                        realized: Exact(rt.at(m)),
                    }),
                });
            }
            _ => record(Stage::Symbolic, Status::Skipped, "no realization".into()),
        }
    }

    let mut concretization = None;
    let mut concrete = None;
    if enabled(Stage::Concretize) || enabled(Stage::Sim) {
        if let Some(r) = &realization {
            match concretize(r, opts.cap) {
                Ok(c) => concrete = Some(c),
                Err(e @ Error::Capacity { .. }) if enabled(Stage::Concretize) => {
                    record(Stage::Concretize, Status::CapacityExceeded, e.to_string());
                }
                Err(Error::Capacity { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    if enabled(Stage::Concretize) {
        match (&concrete, &realization) {
            (Some(c), Some(r)) => {
                let blocks = c
                    .blocks
                    .iter()
                    .map(|(_, model, table)| {
                        verify_model(model, table, opts.tolerance).map(|r| BlockSummary::from(&r))
                    })
                    .collect::<entropic_core::Result<Vec<_>>>()?;
                let product = match r {
                    Realization::Mixture(m) if m.blocks().len() > 1 => {
                        match verify_mixture_product(m, opts.cap, opts.tolerance) {
                            Ok(rep) => Some(BlockSummary::from(&rep)),
                            Err(Error::Capacity { .. }) => None,
                            Err(e) => return Err(e.into()),
                        }
                    }
                    _ => None,
                };
                let passed =
                    blocks.iter().all(|b| b.passed) && product.as_ref().is_none_or(|p| p.passed);
                let worst = blocks.iter().map(|b| b.max_difference).fold(0.0, f64::max);
                record(
                    Stage::Concretize,
                    if passed { Status::Pass } else { Status::Fail },
                    format!(
                        "{} block(s), max |pmf - symbolic| = {worst:.3e} bits{}",
                        blocks.len(),
                        if product.is_some() {
                            ", product space checked"
                        } else {
                            ""
                        }
                    ),
                );
                concretization = Some(ConcretizationSummary {
                    tolerance: opts.tolerance,
                    blocks,
                    product,
                });
            }
            (None, None) => record(Stage::Concretize, Status::Skipped, "no realization".into()),
            _ => {}
        }
    }

    let mut sim = None;
    if enabled(Stage::Sim) {
        match (&table, &realized_table) {
            (Some(f), Some(rt)) => {
                let (available, triples) = pick_triples(n, opts.sim_samples, opts.seed);
                let mut first_failure = None;
                let mut worst: f64 = 0.0;
                for &(a, b, c) in &triples {
                    let comb = [smi(f, a, b)?, cond_gain(f, a, b)?, scmi(f, a, b, c)?];
                    let real = [smi(rt, a, b)?, cond_gain(rt, a, b)?, scmi(rt, a, b, c)?];
                    let mut reason = None;
                    if comb != real {
                        reason = Some(format!(
                            "combinatorial ({}, {}, {}) != realization ({}, {}, {})",
                            display(&comb[0]),
                            display(&comb[1]),
                            display(&comb[2]),
                            display(&real[0]),
                            display(&real[1]),
                            display(&real[2]),
                        ));
                    }
                    if let Some(c_model) = &concrete {
                        let gap = shannon_gap(c_model, a, b, c)?;
                        worst = worst.max(gap);
                        if reason.is_none() && gap > opts.tolerance {
                            reason = Some(format!("pmf-derived measures differ by {gap:.3e} bits"));
                        }
                    }
                    if first_failure.is_none() {
                        first_failure = reason.map(|reason| SimFailure { a, b, c, reason });
                    }
                }
                record(
                    Stage::Sim,
                    if first_failure.is_none() {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    format!(
                        "{}/{} disjoint triples (seed {}){}",
                        triples.len(),
                        available,
                        opts.seed,
                        if concrete.is_some() {
                            format!(", max Shannon difference {worst:.3e} bits")
                        } else {
                            ", exact comparison only".to_string()
                        }
                    ),
                );
                sim = Some(SimSummary {
                    seed: opts.seed,
                    triples_available: available,
                    triples_checked: triples.len(),
                    shannon: concrete.is_some(),
                    max_shannon_difference: worst,
                    first_failure,
                });
            }
            _ => record(Stage::Sim, Status::Skipped, "no realization".into()),
        }
    }

    let passed = stages
        .iter()
        .all(|s| matches!(s.status, Status::Pass | Status::Skipped));
    Ok(VerificationReport {
        family: doc.family().to_string(),
        n,
        source: match input {
            Input::Spec(_) => "spec".into(),
            Input::Certificate(_) => "certificate".into(),
        },
        realization: realization.map(|r| r.kind().to_string()),
        stages,
        polymatroid,
        symbolic,
        concretization,
        sim,
        passed,
        wall_time_ms: started.elapsed().as_millis(),
    })
}
