//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by constructors and operations.
///
/// Numerical routines distinguish precondition violations (bad inputs,
/// gapless points, undersized grids) from genuine non-convergence so that
/// callers can map them to different exit paths.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented precondition.
    InvalidInput(String),
    /// A matrix fails a structural invariant (Hermiticity, finiteness).
    NotHermitian { max_asymmetry: f64 },
    /// Non-finite entry where a finite number is required.
    NonFinite,
    /// The requested k-point sits on (or too close to) a band touching.
    GaplessPoint { k_frac: (f64, f64), gap: f64 },
    /// Parallel transport lost track of the band; the grid is too coarse.
    UnderResolved { overlap: f64 },
    /// An iterative solver hit its cap before reaching tolerance.
    NoConvergence { achieved: f64, tolerance: f64 },
    /// A Chern estimate did not round to an unambiguous integer.
    UnresolvedInteger { raw: f64 },
    /// Fermi level too close to an eigenvalue to define a projection.
    FermiOnEigenvalue { fermi: f64, nearest: f64 },
    /// Gram matrix of candidate Wannier seeds is numerically singular.
    IllConditioned { condition: f64 },
    /// A Bloch frame is discontinuous and cannot be Fourier transformed.
    DiscontinuousFrame { worst_link: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NotHermitian { max_asymmetry } => {
                write!(f, "matrix is not Hermitian (max |A - A†| entry {max_asymmetry:.3e})")
            }
            Error::NonFinite => write!(f, "non-finite entry"),
            Error::GaplessPoint { k_frac, gap } => write!(
                f,
                "bands touch near k = ({:.6}, {:.6}) fractional (gap {gap:.3e})",
                k_frac.0, k_frac.1
            ),
            Error::UnderResolved { overlap } => write!(
                f,
                "parallel-transport overlap {overlap:.3e} < 0.1; refine the k-grid"
            ),
            Error::NoConvergence { achieved, tolerance } => write!(
                f,
                "iteration cap reached: off-diagonal norm {achieved:.3e} (tolerance {tolerance:.3e})"
            ),
            Error::UnresolvedInteger { raw } => {
                write!(f, "Chern estimate {raw:.6} does not resolve to an integer")
            }
            Error::FermiOnEigenvalue { fermi, nearest } => write!(
                f,
                "fermi level {fermi:.9} within tolerance of eigenvalue {nearest:.9}"
            ),
            Error::IllConditioned { condition } => {
                write!(f, "Gram matrix condition number {condition:.3e} > 1e8; Delone set too dense")
            }
            Error::DiscontinuousFrame { worst_link } => write!(
                f,
                "Bloch frame has a non-removable discontinuity (worst link deviation {worst_link:.3})"
            ),
        }
    }
}

impl std::error::Error for Error {}
