//! Rescaling rational weights to the integers required by the truncation
//! families. Every function value of the rescaled spec is `scale` times the
//! original one.

use entropic_core::rational::{denominator_lcm, Exact, Rational};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::document::SpecDocument;
use crate::error::{CliError, Result};

fn scaled(values: &[Exact], factor: i128) -> Vec<Exact> {
    values.iter().map(|v| Exact(v.0 * factor)).collect()
}

/// Piecewise-linear interpolation of `g` (given on `0, 1, 2, ..`) at `x`.
fn interpolate(g: &[Exact], x: Rational) -> Option<Rational> {
    let floor = x.floor().to_integer().to_usize()?;
    let frac = x - Rational::from_integer(floor as i128);
    let lo = g.get(floor)?.0;
    if frac.is_zero() {
        return Some(lo);
    }
    let hi = g.get(floor + 1)?.0;
    Some(lo + (hi - lo) * frac)
}

/// Returns the rescaled document and the factor it was scaled by.
///
/// For concave-over-modular documents with fractional weights, `g` is read as
/// the piecewise-linear function through its integer points, which must cover
/// `0..=ceil(w(V))`; the rescaled table samples `scale · g(y / scale)` at every
/// integer `y` up to `scale · w(V)`.
pub fn auto_scale(doc: &SpecDocument) -> Result<(SpecDocument, i128)> {
    Ok(match doc {
        SpecDocument::WeightedTruncation { weights, k } => {
            let factor = denominator_lcm(weights.iter().map(|w| &w.0)).lcm(k.0.denom());
            (
                SpecDocument::WeightedTruncation {
                    weights: scaled(weights, factor),
                    k: Exact(k.0 * factor),
                },
                factor,
            )
        }
        SpecDocument::SaturatedCoverage {
            weights,
            covers,
            kappa,
        } => {
            let factor = denominator_lcm(weights.iter().map(|w| &w.0)).lcm(kappa.0.denom());
            (
                SpecDocument::SaturatedCoverage {
                    weights: scaled(weights, factor),
                    covers: covers.clone(),
                    kappa: Exact(kappa.0 * factor),
                },
                factor,
            )
        }
        SpecDocument::ConcaveOverModular { weights, g } => {
            let factor = denominator_lcm(weights.iter().map(|w| &w.0));
            if factor == 1 {
                return Ok((doc.clone(), 1));
            }
            let total: Rational = weights.iter().map(|w| w.0).sum();
            let top = (total * factor).to_integer();
            let table = (0..=top)
                .map(|y| {
                    interpolate(g, Rational::new(y, factor))
                        .map(|v| Exact(v * factor))
                        .ok_or_else(|| {
                            CliError::Usage(format!(
                                "g must give values on 0..={} to cover w(V) = {total}",
                                total.ceil()
                            ))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            (
                SpecDocument::ConcaveOverModular {
                    weights: scaled(weights, factor),
                    g: table,
                },
                factor,
            )
        }
        other => (other.clone(), 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use entropic_core::rational::{frac, int};
    use entropic_core::SetFunction;

    #[test]
    fn saturated_example_scales_by_six() {
        let doc = SpecDocument::SaturatedCoverage {
            weights: vec![Exact(frac(1, 2)), Exact(frac(1, 3))],
            covers: vec![vec![0], vec![1]],
            kappa: Exact(int(1)),
        };
        let (scaled_doc, factor) = auto_scale(&doc).unwrap();
        assert_eq!(factor, 6);
        assert_eq!(
            scaled_doc,
            SpecDocument::SaturatedCoverage {
                weights: vec![Exact(int(3)), Exact(int(2))],
                covers: vec![vec![0], vec![1]],
                kappa: Exact(int(6)),
            }
        );
    }

    #[test]
    fn integer_and_zero_weights_are_unchanged() {
        let doc = SpecDocument::WeightedTruncation {
            weights: vec![Exact(int(2)), Exact(int(1))],
            k: Exact(int(2)),
        };
        assert_eq!(auto_scale(&doc).unwrap(), (doc.clone(), 1));
        let zeros = SpecDocument::WeightedTruncation {
            weights: vec![Exact(int(0)), Exact(int(0))],
            k: Exact(int(1)),
        };
        assert_eq!(auto_scale(&zeros).unwrap().1, 1);
    }

    #[test]
    fn concave_tables_are_resampled() {
        // w = (1/2, 1/2), g = (0, 2, 3): scaled w = (1, 1), g' = 2·g(y/2)
        let doc = SpecDocument::ConcaveOverModular {
            weights: vec![Exact(frac(1, 2)), Exact(frac(1, 2))],
            g: vec![Exact(int(0)), Exact(int(2)), Exact(int(3))],
        };
        let (scaled_doc, factor) = auto_scale(&doc).unwrap();
        assert_eq!(factor, 2);
        let spec = scaled_doc.to_spec().unwrap();
        let t = spec.tabulate();
        // w({0}) = 1/2 → g = 1; w({0,1}) = 1 → g = 2
        assert_eq!(t.at(0b01), int(2));
        assert_eq!(t.at(0b11), int(4));
    }

    #[test]
    fn short_concave_table_is_reported() {
        let doc = SpecDocument::ConcaveOverModular {
            weights: vec![Exact(frac(3, 2))],
            g: vec![Exact(int(0)), Exact(int(1))],
        };
        assert!(auto_scale(&doc).is_err());
    }
}
