use alloc::string::String;
use core::fmt;

/// Which side of the collision a bath-level failure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => f.write_str("A"),
            Side::B => f.write_str("B"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `‖M − M†‖_F` exceeded the relative Hermiticity tolerance.
    NotHermitian {
        residual: f64,
    },
    /// `‖U†U − 𝟙‖_F` exceeded the unitarity tolerance.
    NotUnitary {
        residual: f64,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    NonFinite,
    EmptyMatrix,
    /// The exchange operator of a bath has a (near-)degenerate spectrum, so
    /// its measurement basis is ambiguous.
    DegenerateSpectrum {
        side: Side,
        gap: f64,
    },
    /// The interaction does not conserve every charge.
    CertificateFailure {
        worst: f64,
    },
    IndexOutOfRange {
        index: usize,
        len: usize,
    },
    MissingInteractionHamiltonian,
    SingularState {
        min_eigenvalue: f64,
    },
    InvalidBath(String),
    IncompatibleBaths(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (residual {residual:e})")
            }
            Error::NotUnitary { residual } => {
                write!(f, "matrix is not unitary (residual {residual:e})")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite => f.write_str("matrix has non-finite entries"),
            Error::EmptyMatrix => f.write_str("matrix dimension must be at least 1"),
            Error::DegenerateSpectrum { side, gap } => {
                write!(
                    f,
                    "exchange operator of bath {side} is degenerate (gap {gap:e})"
                )
            }
            Error::CertificateFailure { worst } => {
                write!(
                    f,
                    "interaction is not charge preserving (worst residual {worst:e})"
                )
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::MissingInteractionHamiltonian => {
                f.write_str("interaction Hamiltonian is required but only a unitary is available")
            }
            Error::SingularState { min_eigenvalue } => {
                write!(f, "state is singular (min eigenvalue {min_eigenvalue:e})")
            }
            Error::InvalidBath(msg) => write!(f, "invalid bath: {msg}"),
            Error::IncompatibleBaths(msg) => write!(f, "incompatible baths: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
