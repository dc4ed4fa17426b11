//! Realizations from mutually independent weighted atoms.
//!
//! Each ground element is a tuple of atoms. Repeating an atom in a tuple adds
//! nothing, so the joint entropy of a subset is the total weight of the union
//! of its atom sets.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{exact, int, Rational};
use crate::setfn::{elements, GroundSet, Mask, SetFunction};
use crate::zoo::{CoverageSpec, FacilityLocationSpec, GraphCutSpec};

/// Construction role of an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum AtomLabel {
    /// Private atom of ground element `i` (modular functions).
    Item { i: usize },
    /// Universe element `u` of a coverage function.
    Element { u: usize },
    /// Increment `B_r` of a nested-suffix block; `client` is set for
    /// facility location, where every client owns a block.
    Suffix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        client: Option<usize>,
        rank: usize,
    },
    /// Atom shared by both endpoints of edge `{i, j}`.
    Shared { i: usize, j: usize },
    /// Atom private to endpoint `vertex` of edge `{i, j}`.
    Private { i: usize, j: usize, vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub id: usize,
    #[serde(with = "exact")]
    pub weight: Rational,
    pub label: AtomLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAtomSystem", into = "RawAtomSystem")]
pub struct AtomSystem {
    ground: GroundSet,
    atoms: Vec<Atom>,
    vars: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawAtomSystem {
    atoms: Vec<Atom>,
    vars: Vec<Vec<usize>>,
}

impl TryFrom<RawAtomSystem> for AtomSystem {
    type Error = Error;

    fn try_from(raw: RawAtomSystem) -> Result<Self> {
        AtomSystem::new(raw.atoms, raw.vars)
    }
}

impl From<AtomSystem> for RawAtomSystem {
    fn from(sys: AtomSystem) -> Self {
        RawAtomSystem {
            atoms: sys.atoms,
            vars: sys.vars,
        }
    }
}

impl AtomSystem {
    /// Atom ids must be `0..atoms.len()` in order; `vars[i]` lists the atoms of
    /// ground element `i`.
    pub fn new(atoms: Vec<Atom>, mut vars: Vec<Vec<usize>>) -> Result<Self> {
        let ground = GroundSet::new(vars.len())?;
        for (pos, atom) in atoms.iter().enumerate() {
            if atom.id != pos {
                return Err(Error::invalid(
                    format!("atoms[{pos}].id"),
                    format!("expected {pos}, got {}", atom.id),
                ));
            }
            if atom.weight.is_negative() {
                return Err(Error::invalid(
                    format!("atoms[{pos}].weight"),
                    "must be nonnegative",
                ));
            }
        }
        for (i, v) in vars.iter_mut().enumerate() {
            if let Some(&bad) = v.iter().find(|&&a| a >= atoms.len()) {
                return Err(Error::invalid(
                    format!("vars[{i}]"),
                    format!("unknown atom id {bad}"),
                ));
            }
            v.sort_unstable();
            v.dedup();
        }
        Ok(AtomSystem {
            ground,
            atoms,
            vars,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn vars(&self) -> &[Vec<usize>] {
        &self.vars
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    /// Atom ids used by `mask`, ascending and deduplicated.
    pub fn atoms_of(&self, mask: Mask) -> Vec<usize> {
        let mut hit = vec![false; self.atoms.len()];
        for i in elements(mask) {
            for &a in &self.vars[i] {
                hit[a] = true;
            }
        }
        hit.iter()
            .enumerate()
            .filter_map(|(a, &h)| h.then_some(a))
            .collect()
    }

    /// Joint entropy of `X_A` in the system's unit.
    pub fn entropy(&self, mask: Mask) -> Rational {
        self.atoms_of(mask)
            .into_iter()
            .map(|a| self.atoms[a].weight)
            .sum()
    }

    /// Copy with one atom's weight replaced.
    pub fn with_atom_weight(&self, id: usize, weight: Rational) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        match atoms.get_mut(id) {
            Some(a) => a.weight = weight,
            None => return Err(Error::invalid("atom", format!("no atom with id {id}"))),
        }
        AtomSystem::new(atoms, self.vars.clone())
    }
}

impl SetFunction for AtomSystem {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn value(&self, mask: Mask) -> Rational {
        self.entropy(mask)
    }
}

/// Incrementally builds a system, dropping zero-weight atoms.
struct Builder {
    atoms: Vec<Atom>,
    vars: Vec<Vec<usize>>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            atoms: Vec::new(),
            vars: vec![Vec::new(); n],
        }
    }

    fn atom(&mut self, weight: Rational, label: AtomLabel) -> Option<usize> {
        if weight.is_zero() {
            return None;
        }
        let id = self.atoms.len();
        self.atoms.push(Atom { id, weight, label });
        Some(id)
    }

    fn finish(self) -> Result<AtomSystem> {
        AtomSystem::new(self.atoms, self.vars)
    }
}

fn nonnegative(field: &str, w: &[Rational]) -> Result<()> {
    match w.iter().position(|x| x.is_negative()) {
        Some(i) => Err(Error::invalid(
            format!("{field}[{i}]"),
            "must be nonnegative",
        )),
        None => Ok(()),
    }
}

/// Independent private atom per element: `H(X_A) = Σ_{i∈A} w_i`.
pub fn build_modular(weights: &[Rational]) -> Result<AtomSystem> {
    GroundSet::new(weights.len())?;
    nonnegative("weights", weights)?;
    let mut b = Builder::new(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        if let Some(id) = b.atom(w, AtomLabel::Item { i }) {
            b.vars[i].push(id);
        }
    }
    b.finish()
}

/// One atom per universe element; element `i` carries the atoms of its cover.
pub fn build_coverage(spec: &CoverageSpec) -> Result<AtomSystem> {
    let mut b = Builder::new(spec.covers().len());
    let ids: Vec<Option<usize>> = spec
        .weights()
        .iter()
        .enumerate()
        .map(|(u, &w)| b.atom(w, AtomLabel::Element { u }))
        .collect();
    for (i, cover) in spec.covers().iter().enumerate() {
        b.vars[i].extend(cover.iter().filter_map(|&u| ids[u]));
    }
    b.finish()
}

/// Order used to rank equal weights when sorting nonincreasingly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowerIndexFirst,
    HigherIndexFirst,
}

/// Indices sorted by nonincreasing weight.
fn rank_order(weights: &[Rational], tie: TieBreak) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    if tie == TieBreak::HigherIndexFirst {
        order.reverse();
    }
    // stable: equal weights keep the seed order above
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]));
    order
}

/// Adds a nested-suffix block realizing `A ↦ max_{a∈A} weights[a]`.
///
/// With weights sorted as `w_(1) >= .. >= w_(m)` and `w_(m+1) = 0`, atom `B_r`
/// has weight `w_(r) − w_(r+1)` and the element of rank `r` holds
/// `(B_r, .., B_m)`, so any subset's tuple is a function of its top-ranked member.
fn suffix_block(b: &mut Builder, weights: &[Rational], tie: TieBreak, client: Option<usize>) {
    let order = rank_order(weights, tie);
    let m = order.len();
    let mut ids = Vec::with_capacity(m);
    for r in 0..m {
        let next = if r + 1 < m {
            weights[order[r + 1]]
        } else {
            Rational::zero()
        };
        ids.push(b.atom(
            weights[order[r]] - next,
            AtomLabel::Suffix { client, rank: r },
        ));
    }
    for (r, &a) in order.iter().enumerate() {
        b.vars[a].extend(ids[r..].iter().flatten());
    }
}

pub fn build_max(weights: &[Rational]) -> Result<AtomSystem> {
    build_max_with(weights, TieBreak::default())
}

pub fn build_max_with(weights: &[Rational], tie: TieBreak) -> Result<AtomSystem> {
    GroundSet::new(weights.len())?;
    nonnegative("weights", weights)?;
    let mut b = Builder::new(weights.len());
    suffix_block(&mut b, weights, tie, None);
    b.finish()
}

/// Independent suffix block per client over that client's similarity row.
pub fn build_facility_location(spec: &FacilityLocationSpec) -> Result<AtomSystem> {
    build_facility_location_with(spec, TieBreak::default())
}

pub fn build_facility_location_with(
    spec: &FacilityLocationSpec,
    tie: TieBreak,
) -> Result<AtomSystem> {
    let rows = spec.similarity();
    let mut b = Builder::new(rows.len());
    for (client, row) in rows.iter().enumerate() {
        suffix_block(&mut b, row, tie, Some(client));
    }
    b.finish()
}

/// Per edge `{i, j}` of weight `w`: a shared atom of weight `2λw` held by both
/// endpoints and a private atom of weight `(1 − 2λ)w` for each endpoint.
pub fn build_graph_cut(spec: &GraphCutSpec) -> Result<AtomSystem> {
    let n = spec.similarity().len();
    let lambda = spec.lambda();
    let shared_frac = int(2) * lambda;
    let private_frac = Rational::one() - shared_frac;
    let mut b = Builder::new(n);
    for (i, j, w) in spec.edges() {
        if let Some(id) = b.atom(shared_frac * w, AtomLabel::Shared { i, j }) {
            b.vars[i].push(id);
            b.vars[j].push(id);
        }
        for vertex in [i, j] {
            if let Some(id) = b.atom(private_frac * w, AtomLabel::Private { i, j, vertex }) {
                b.vars[vertex].push(id);
            }
        }
    }
    b.finish()
}
