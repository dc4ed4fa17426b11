use thiserror::Error;

use crate::setfn::{Mask, MAX_GROUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} exceeds the maximum of {MAX_GROUND}")]
    GroundTooLarge(usize),

    #[error("subset {mask:#b} does not fit a ground set of size {n}")]
    MaskOutOfRange { mask: Mask, n: usize },

    #[error("element {element} is outside a ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("arguments must be disjoint: {first:#b} and {second:#b} share {common:#b}")]
    Overlap {
        first: Mask,
        second: Mask,
        common: Mask,
    },

    #[error("ground set sizes differ: {0} vs {1}")]
    GroundMismatch(usize, usize),

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("concave table is not {kind} at t = {t}")]
    NotConcave { t: usize, kind: ConcavityFault },

    #[error("state space of {states} outcomes exceeds the cap of {cap}")]
    Capacity { states: u128, cap: u128 },

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

/// Which property a rejected concave table broke first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcavityFault {
    Normalized,
    Nondecreasing,
    Concave,
}

impl std::fmt::Display for ConcavityFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConcavityFault::Normalized => "normalized (g(0) = 0)",
            ConcavityFault::Nondecreasing => "nondecreasing",
            ConcavityFault::Concave => "concave",
        })
    }
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
