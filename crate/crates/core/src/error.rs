use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The characteristic passed to a field constructor is not prime.
    NotPrime(u64),
    ReducibleModulus,
    /// Modulus has the wrong length or a zero leading coefficient.
    ModulusDegree {
        expected: u32,
        found: usize,
    },
    MissingModulus,
    /// A field element index outside `[0, q)`.
    ElemOutOfRange(u64),
    /// A point index outside `[0, q^n)`.
    PointOutOfRange(u64),
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    SpaceMismatch,
    /// An exhaustive operation would exceed the enumeration budget.
    BudgetExceeded {
        needed: u128,
        budget: u64,
    },
    /// A cube vertex lies outside the domain of the function.
    VertexOutsideDomain(u64),
    /// Rejection sampling gave up after its attempt budget.
    RejectionExhausted {
        attempts: u64,
        accepted: u64,
        wanted: u64,
    },
    EmptySet,
    InvalidArgument(String),
    /// Plurality vote at an anchor outside the domain ended in a tie.
    TiedVote {
        anchor: u64,
    },
    /// Anchors whose completion set came out empty during extension.
    EmptyVotes {
        anchors: alloc::vec::Vec<u64>,
    },
    /// A requested rank or bias target cannot be certified.
    Unreachable(String),
    /// No `l`-dimensional affine subspace inside `X` was found.
    SubspaceSearch {
        wanted: u32,
        reached: u32,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "characteristic {p} is not prime"),
            Error::ReducibleModulus => write!(f, "reducible modulus"),
            Error::ModulusDegree { expected, found } => write!(
                f,
                "modulus must have degree {expected} ({} coefficients), got {found} coefficients",
                expected + 1
            ),
            Error::MissingModulus => write!(f, "extension fields need an explicit modulus"),
            Error::ElemOutOfRange(x) => write!(f, "field element index {x} out of range"),
            Error::PointOutOfRange(x) => write!(f, "point index {x} out of range"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::SpaceMismatch => write!(f, "operands live in different spaces"),
            Error::BudgetExceeded { needed, budget } => {
                write!(f, "budget exceeded: {needed} steps needed, budget {budget}")
            }
            Error::VertexOutsideDomain(x) => write!(f, "vertex {x} outside the function's domain"),
            Error::RejectionExhausted { attempts, accepted, wanted } => write!(
                f,
                "rejection budget exhausted after {attempts} attempts: accepted {accepted} of {wanted} \
                 (measured acceptance {:.3e})",
                *accepted as f64 / (*attempts).max(1) as f64
            ),
            Error::EmptySet => write!(f, "empty subset"),
            Error::InvalidArgument(s) => write!(f, "invalid argument: {s}"),
            Error::TiedVote { anchor } => write!(f, "tied plurality vote at anchor {anchor}"),
            Error::EmptyVotes { anchors } => write!(
                f,
                "{} anchors have no sampled completions (first: {:?}); the set is not uniform enough to extend",
                anchors.len(),
                anchors.first()
            ),
            Error::Unreachable(s) => write!(f, "target unreachable: {s}"),
            Error::SubspaceSearch { wanted, reached } => {
                write!(f, "no {wanted}-dimensional affine subspace inside X found; deepest dimension reached {reached}")
            }
        }
    }
}

impl core::error::Error for Error {}

/// Fails with [`Error::BudgetExceeded`] when `needed > budget`.
pub(crate) fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}
