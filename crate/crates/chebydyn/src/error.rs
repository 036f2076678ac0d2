use crate::rat::Rat;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
///
/// `Domain` covers invalid arguments (out-of-range points, bad parameters),
/// `Guard` covers exceeded complexity limits on the exponential enumerators.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("guard violated: {0}")]
    Guard(String),

    #[error("map is not Markov on the constructed partition: {0}")]
    NotMarkov(String),

    /// The transfer-matrix eigenproblem at eigenvalue 1 has a kernel of
    /// dimension > 1: the map decomposes into independent ergodic components.
    /// The basis vectors are reported so the caller can select a component.
    #[error("degenerate kernel of dimension {}: map has independent ergodic components", basis.len())]
    DegenerateKernel { basis: Vec<Vec<Rat>> },

    /// Exact branch-table construction needs the shift angle as an exact
    /// rational multiple of pi.
    #[error("shift angle is not an exact rational multiple of pi")]
    NonRationalShift,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn guard(msg: impl Into<String>) -> Self {
        Error::Guard(msg.into())
    }

    /// Process exit code used by the command-line interface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Guard(_) => 3,
            _ => 2,
        }
    }
}
