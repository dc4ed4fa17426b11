use entropic_core::atoms::{Atom, AtomLabel, AtomSystem};
use entropic_core::exec::Execution;
use entropic_core::mixture::{concave_coefficients, raw_coefficients, reconstruct};
use entropic_core::rational::{display, parse_rational, Rational};
use entropic_core::setfn::{check_polymatroid, check_polymatroid_with, is_submodular_lattice};
use entropic_core::{GroundSet, SetFunction, SetFunctionTable};
use num_traits::Signed;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (0i128..40, 1i128..=8).prop_map(|(n, d)| Rational::new(n, d))
}

fn concave_table() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), 0..30).prop_map(|mut steps| {
        steps.sort_by(|a, b| b.cmp(a));
        let mut g = vec![Rational::from_integer(0)];
        for s in steps {
            let last = *g.last().unwrap();
            g.push(last + s);
        }
        g
    })
}

fn small_table() -> impl Strategy<Value = SetFunctionTable> {
    (0usize..=4).prop_flat_map(|n| {
        prop::collection::vec(0i128..6, 1 << n).prop_map(move |mut v| {
            v[0] = 0;
            SetFunctionTable::from_values(
                GroundSet::new(n).unwrap(),
                v.into_iter().map(Rational::from_integer).collect(),
            )
            .unwrap()
        })
    })
}

fn atom_system() -> impl Strategy<Value = AtomSystem> {
    (1usize..=6, 0usize..=8).prop_flat_map(|(n, atoms)| {
        (
            prop::collection::vec(rational(), atoms),
            prop::collection::vec(prop::collection::vec(0..atoms.max(1), 0..4), n),
        )
            .prop_map(move |(weights, vars)| {
                let atoms: Vec<Atom> = weights
                    .into_iter()
                    .enumerate()
                    .map(|(id, weight)| Atom {
                        id,
                        weight,
                        label: AtomLabel::Element { u: id },
                    })
                    .collect();
                let vars = if atoms.is_empty() {
                    vec![vec![]; vars.len()]
                } else {
                    vars
                };
                AtomSystem::new(atoms, vars).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn concave_tables_telescope(g in concave_table()) {
        let c = concave_coefficients(&g).unwrap();
        prop_assert!(c.iter().all(|(_, ct)| !ct.is_negative()));
        for (x, gx) in g.iter().enumerate() {
            prop_assert_eq!(reconstruct(&c, x), *gx);
        }
    }

    #[test]
    fn raw_coefficients_reconstruct_any_normalized_table(
        steps in prop::collection::vec(-5i128..5, 0..20)
    ) {
        let mut g = vec![Rational::from_integer(0)];
        for s in steps {
            let last = *g.last().unwrap();
            g.push(last + Rational::from_integer(s));
        }
        let c = raw_coefficients(&g);
        for (x, gx) in g.iter().enumerate() {
            prop_assert_eq!(reconstruct(&c, x), *gx);
        }
        let bad = c.iter().any(|(_, ct)| ct.is_negative());
        prop_assert_eq!(bad, concave_coefficients(&g).is_err());
    }

    #[test]
    fn lattice_and_elemental_submodularity_agree(f in small_table()) {
        prop_assert_eq!(check_polymatroid(&f).submodular, is_submodular_lattice(&f));
    }

    #[test]
    fn witnesses_confirm_and_strategies_agree(f in small_table()) {
        let seq = check_polymatroid_with(&f, Execution::Sequential);
        let par = check_polymatroid_with(&f, Execution::Parallel);
        prop_assert_eq!(&seq, &par);
        prop_assert_eq!(seq.witness.is_some(), !seq.is_polymatroid());
        if let Some(w) = seq.witness {
            prop_assert!(w.confirms(&f));
        }
    }

    #[test]
    fn atom_systems_are_polymatroids(sys in atom_system()) {
        prop_assert!(check_polymatroid(&sys.tabulate()).is_polymatroid());
    }

    #[test]
    fn rationals_survive_display(num in -1000i128..1000, den in 1i128..100) {
        let r = Rational::new(num, den);
        prop_assert_eq!(parse_rational(&display(&r)).unwrap(), r);
    }
}
