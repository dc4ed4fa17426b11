//! Seeded random instances of every family.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{int, Rational};
use crate::zoo::{
    ConcaveSpec, CoverageSpec, FacilityLocationSpec, FunctionSpec, GraphCutSpec, ModularSpec,
    SaturatedCoverageSpec, TruncationSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Coverage,
    FacilityLocation,
    Truncation,
    WeightedTruncation,
    ConcaveOverModular,
    SaturatedCoverage,
    GraphCut,
    Modular,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Coverage,
        Family::FacilityLocation,
        Family::Truncation,
        Family::WeightedTruncation,
        Family::ConcaveOverModular,
        Family::SaturatedCoverage,
        Family::GraphCut,
        Family::Modular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Coverage => "coverage",
            Family::FacilityLocation => "facility_location",
            Family::Truncation => "truncation",
            Family::WeightedTruncation => "weighted_truncation",
            Family::ConcaveOverModular => "concave_over_modular",
            Family::SaturatedCoverage => "saturated_coverage",
            Family::GraphCut => "graph_cut",
            Family::Modular => "modular",
        }
    }
}

/// Size knobs for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub min_n: usize,
    pub max_n: usize,
    /// Largest denominator of rational weights.
    pub max_den: i128,
    /// Upper bound on the integer part of rational weights.
    pub max_weight: i128,
    /// Upper bound on integer weights (truncations, saturated coverage, concave).
    pub max_int_weight: u64,
    pub max_universe: usize,
}

impl Shape {
    /// n in [1, 10], denominators up to 8.
    pub const STANDARD: Shape = Shape {
        min_n: 1,
        max_n: 10,
        max_den: 8,
        max_weight: 4,
        max_int_weight: 3,
        max_universe: 8,
    };

    /// Instances whose joint distributions can be enumerated.
    pub const SMALL: Shape = Shape {
        min_n: 1,
        max_n: 4,
        max_den: 2,
        max_weight: 1,
        max_int_weight: 2,
        max_universe: 4,
    };
}

pub struct Generator {
    seed: u64,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn n(&mut self, shape: Shape) -> usize {
        self.rng.gen_range(shape.min_n..=shape.max_n)
    }

    /// Nonnegative rational with denominator at most `max_den`; zero about
    /// one time in five.
    pub fn weight(&mut self, shape: Shape) -> Rational {
        if self.rng.gen_ratio(1, 5) {
            return int(0);
        }
        let den = self.rng.gen_range(1..=shape.max_den);
        let num = self.rng.gen_range(1..=shape.max_weight * den);
        Rational::new(num, den)
    }

    fn weights(&mut self, len: usize, shape: Shape) -> Vec<Rational> {
        (0..len).map(|_| self.weight(shape)).collect()
    }

    fn int_weights(&mut self, len: usize, shape: Shape) -> Vec<u64> {
        (0..len)
            .map(|_| self.rng.gen_range(0..=shape.max_int_weight))
            .collect()
    }

    fn covers(&mut self, n: usize, universe: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|_| (0..universe).filter(|_| self.rng.gen_bool(0.4)).collect())
            .collect()
    }

    pub fn coverage(&mut self, shape: Shape) -> CoverageSpec {
        let n = self.n(shape);
        let m = self.rng.gen_range(1..=shape.max_universe);
        let weights = self.weights(m, shape);
        let covers = self.covers(n, m);
        CoverageSpec::new(weights, covers).expect("generated coverage is valid")
    }

    pub fn facility_location(&mut self, shape: Shape) -> FacilityLocationSpec {
        let n = self.n(shape);
        let rows = (0..n).map(|_| self.weights(n, shape)).collect();
        FacilityLocationSpec::new(rows).expect("generated similarity is valid")
    }

    pub fn truncation(&mut self, shape: Shape) -> TruncationSpec {
        let n = self.n(shape);
        let k = self.rng.gen_range(1..=n as u64);
        TruncationSpec::cardinality(n, k).expect("generated truncation is valid")
    }

    pub fn weighted_truncation(&mut self, shape: Shape) -> TruncationSpec {
        let n = self.n(shape);
        let w = self.int_weights(n, shape);
        let total: u64 = w.iter().sum();
        let k = self.rng.gen_range(1..=total.max(1) + 1);
        TruncationSpec::weighted(w, k).expect("generated weighted truncation is valid")
    }

    /// Concave nondecreasing table on `0..=top` with `g(0) = 0`: nonincreasing
    /// nonnegative rational increments, summed.
    pub fn concave_table(&mut self, top: usize, max_den: i128) -> Vec<Rational> {
        let mut steps: Vec<Rational> = (0..top)
            .map(|_| {
                if self.rng.gen_ratio(1, 6) {
                    int(0)
                } else {
                    let den = self.rng.gen_range(1..=max_den);
                    Rational::new(self.rng.gen_range(1..=4 * den), den)
                }
            })
            .collect();
        steps.sort_by(|a, b| b.cmp(a));
        let mut g = Vec::with_capacity(top + 1);
        g.push(int(0));
        for s in steps {
            let last = *g.last().unwrap();
            g.push(last + s);
        }
        g
    }

    /// A table on `0..=top` (`top >= 2`) that breaks exactly one of
    /// normalization, monotonicity or concavity.
    pub fn non_concave_table(&mut self, top: usize, max_den: i128) -> Vec<Rational> {
        assert!(top >= 2, "need at least three points to break concavity");
        let mut g = self.concave_table(top, max_den);
        match self.rng.gen_range(0..3) {
            0 => {
                let bump = Rational::new(1, self.rng.gen_range(1..=max_den));
                for v in g.iter_mut() {
                    *v += bump;
                }
            }
            1 => {
                let t = self.rng.gen_range(1..=top);
                g[t] = g[t - 1] - Rational::new(1, max_den);
                for u in t + 1..=top {
                    g[u] = g[t];
                }
            }
            _ => {
                // make the step into t strictly larger than the step into t − 1
                let t = self.rng.gen_range(2..=top);
                let prev = g[t - 1] - g[t - 2];
                let raise = prev + Rational::new(1, max_den) - (g[t] - g[t - 1]);
                for v in g[t..].iter_mut() {
                    *v += raise;
                }
            }
        }
        g
    }

    pub fn concave_over_modular(&mut self, shape: Shape) -> ConcaveSpec {
        let n = self.n(shape);
        let w = self.int_weights(n, shape);
        let top: u64 = w.iter().sum();
        let g = self.concave_table(top as usize, shape.max_den);
        ConcaveSpec::new(w, g).expect("generated concave spec is valid")
    }

    pub fn saturated_coverage(&mut self, shape: Shape) -> SaturatedCoverageSpec {
        let n = self.n(shape);
        let m = self.rng.gen_range(1..=shape.max_universe);
        let w = self.int_weights(m, shape);
        let total: u64 = w.iter().sum();
        let kappa = self.rng.gen_range(0..=total + 1);
        let covers = self.covers(n, m);
        let cov = CoverageSpec::new(w.iter().map(|&x| int(x as i128)).collect(), covers)
            .expect("generated coverage is valid");
        SaturatedCoverageSpec::new(cov, kappa).expect("integer weights")
    }

    pub fn lambda(&mut self, max_den: i128) -> Rational {
        let den = self.rng.gen_range(1..=max_den);
        // 0 <= num/den <= 1/2
        Rational::new(self.rng.gen_range(0..=den / 2), den)
    }

    #[allow(clippy::needless_range_loop)]
    pub fn graph_cut(&mut self, shape: Shape) -> GraphCutSpec {
        let n = self.n(shape);
        let mut s = vec![vec![int(0); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if self.rng.gen_bool(0.6) {
                    let w = self.weight(shape);
                    s[i][j] = w;
                    s[j][i] = w;
                }
            }
        }
        let lambda = self.lambda(shape.max_den);
        GraphCutSpec::new(s, lambda).expect("generated graph is valid")
    }

    pub fn modular(&mut self, shape: Shape) -> ModularSpec {
        let n = self.n(shape);
        let w = self.weights(n, shape);
        ModularSpec::new(w).expect("generated weights are nonnegative")
    }

    pub fn instance(&mut self, family: Family, shape: Shape) -> FunctionSpec {
        match family {
            Family::Coverage => FunctionSpec::Coverage(self.coverage(shape)),
            Family::FacilityLocation => {
                FunctionSpec::FacilityLocation(self.facility_location(shape))
            }
            Family::Truncation => FunctionSpec::Truncation(self.truncation(shape)),
            Family::WeightedTruncation => FunctionSpec::Truncation(self.weighted_truncation(shape)),
            Family::ConcaveOverModular => {
                FunctionSpec::ConcaveOverModular(self.concave_over_modular(shape))
            }
            Family::SaturatedCoverage => {
                FunctionSpec::SaturatedCoverage(self.saturated_coverage(shape))
            }
            Family::GraphCut => FunctionSpec::GraphCut(self.graph_cut(shape)),
            Family::Modular => FunctionSpec::Modular(self.modular(shape)),
        }
    }

    /// Random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut self.rng);
        p
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::check_concave_table;

    #[test]
    fn same_seed_same_instances() {
        let mut a = Generator::new(7);
        let mut b = Generator::new(7);
        for f in Family::ALL {
            assert_eq!(
                a.instance(f, Shape::STANDARD),
                b.instance(f, Shape::STANDARD)
            );
        }
    }

    #[test]
    fn family_tags_match() {
        let mut g = Generator::new(1);
        for f in Family::ALL {
            assert_eq!(g.instance(f, Shape::STANDARD).family(), f.name());
        }
    }

    #[test]
    fn tables_are_concave_or_not_as_requested() {
        let mut g = Generator::new(3);
        for top in 2..20 {
            assert!(check_concave_table(&g.concave_table(top, 8)).is_ok());
            assert!(check_concave_table(&g.non_concave_table(top, 8)).is_err());
        }
    }

    #[test]
    fn lambda_in_range() {
        let mut g = Generator::new(11);
        for _ in 0..200 {
            let l = g.lambda(8);
            assert!(l >= int(0) && l <= Rational::new(1, 2));
        }
    }
}
