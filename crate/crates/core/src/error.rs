use thiserror::Error;

/// Unified error type for the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The volume table has no entry for the requested surface type.
    #[error(
        "no volume polynomial for (g, n) = ({g}, {n}): the table covers \
         surface types with 1 <= 2g - 2 + n <= {m_max}"
    )]
    UnknownType { g: u32, n: u32, m_max: u32 },

    /// A polynomial was evaluated with the wrong number of boundary lengths.
    #[error("expected {expected} boundary lengths, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// Adaptive quadrature (or an inverse solve built on it) ran out of its
    /// subdivision budget before meeting the requested tolerance.
    #[error(
        "quadrature did not reach tolerance after {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error:e})"
    )]
    ToleranceNotMet {
        estimate: f64,
        error: f64,
        subdivisions: u32,
    },

    /// An exact integer computation left the i128 range.
    #[error("exact integer overflow computing C({r}, {k})")]
    BinomialOverflow { r: u32, k: u32 },

    /// The requested splitting complexity is outside `1..=floor((2g-2+n)/2)`.
    #[error("no splittings of complexity {m} for (g, n) = ({g}, {n})")]
    EmptyRange { g: u32, n: u32, m: u32 },

    /// A caller-supplied value violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A volume table file failed structural validation.
    #[error("invalid volume table: {0}")]
    InvalidTable(String),

    /// A volume table file could not be read.
    #[error("cannot read volume table {path}: {source}")]
    TableIo {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
