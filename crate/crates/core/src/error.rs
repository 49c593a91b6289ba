use std::fmt;

/// Errors shared by the exact modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two objects that must live in the same ambient space do not.
    DimensionMismatch { expected: usize, found: usize, context: &'static str },
    /// A flag argument is not an increasing chain ending at the ambient space.
    FlagNotNested,
    /// Two Lie elements belong to different free Lie bases.
    BasisMismatch,
    /// BCH is only supported up to nilpotency step 6.
    StepTooLarge { step: usize, max: usize },
    /// A structure-constant table fails antisymmetry or the Jacobi identity.
    InvalidStructure(String),
    /// The lower central series does not reach zero.
    NotNilpotent,
    /// The given subspace does not generate the Lie algebra.
    DoesNotGenerate,
    /// Candidate list for the ratio maximum was empty.
    EmptyCandidates,
    /// Two distinct argmax subspaces of maximal dimension were found; the
    /// submodularity hypotheses guarantee this cannot happen for a genuinely
    /// generic sample, so this is surfaced as a hard error.
    DuplicateArgmax { dim: usize },
    /// Malformed textual or JSON input.
    Parse(String),
    /// A guard on problem size or a precondition was violated.
    Precondition(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found, context } => {
                write!(f, "dimension mismatch in {context}: expected {expected}, found {found}")
            }
            Error::FlagNotNested => write!(f, "flag is not an increasing chain ending at the ambient space"),
            Error::BasisMismatch => write!(f, "operands belong to different free Lie bases"),
            Error::StepTooLarge { step, max } => write!(f, "nilpotency step {step} exceeds supported maximum {max}"),
            Error::InvalidStructure(msg) => write!(f, "invalid structure constants: {msg}"),
            Error::NotNilpotent => write!(f, "lower central series does not terminate at zero"),
            Error::DoesNotGenerate => write!(f, "subspace does not generate the Lie algebra"),
            Error::EmptyCandidates => write!(f, "candidate list is empty"),
            Error::DuplicateArgmax { dim } => {
                write!(f, "two distinct maximizers of dimension {dim}; candidate family violates uniqueness")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
