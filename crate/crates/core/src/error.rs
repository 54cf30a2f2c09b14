use core::fmt;

/// Errors raised by the numerical and certification routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// |det| at or below the normalization tolerance.
    SingularInput { det_abs: f64 },
    /// A matrix entry or vector coordinate is NaN or infinite.
    NonFinite,
    /// Operand shapes do not fit the operation.
    Shape { expected: (usize, usize), found: (usize, usize) },
    /// Eigenvector basis condition estimate above the configured cap.
    IllConditioned { estimate: f64 },
    /// Subspaces live in different ambient spaces.
    AmbientMismatch { left: usize, right: usize },
    /// An operation that needs a unitary spectrum got an eigenvalue off the unit circle.
    NonUnitarySpectrum { modulus: f64 },
    ZeroVector,
    ZeroSubspace,
    /// Point is not fixed by the transformation (chordal residual recorded).
    NotFixed { residual: f64 },
    CoincidentPoints,
    /// Element does not preserve the (k,l) form.
    NotInPU,
    NotHermitian { defect: f64 },
    /// Vector is not of negative type for the (k,l) form.
    NotNegativeType,
    /// Quadric families need a Jordan block of size at least 2.
    SizeTooSmall { size: usize },
    NotParabolic,
    NotLoxodromic,
    /// A certificate invariant failed its numerical check.
    CertificateCheckFailed { what: &'static str, residual: f64 },
    /// The loxodromic contraction search found no admissible radius.
    CertificateSearchFailed,
    /// Power iteration did not settle within the step budget.
    NoConvergenceWithinBudget { defect: f64 },
    /// Wedge degree outside `1..=dim`.
    BadK { k: usize, dim: usize },
    WrongKind,
    MissingCertificate,
    EmptyInput,
    /// Iterative kernel (QR sweep, Jacobi) failed to converge.
    NoConvergence { routine: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// True for failures caused by conditioning or iteration budgets rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned { .. }
                | Error::CertificateCheckFailed { .. }
                | Error::CertificateSearchFailed
                | Error::NoConvergenceWithinBudget { .. }
                | Error::NoConvergence { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularInput { det_abs } => write!(f, "singular input (|det| = {det_abs:e})"),
            Error::NonFinite => write!(f, "non-finite entry"),
            Error::Shape { expected, found } => write!(
                f,
                "shape mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::IllConditioned { estimate } => {
                write!(f, "ill-conditioned eigenstructure (condition estimate {estimate:e})")
            }
            Error::AmbientMismatch { left, right } => {
                write!(f, "ambient dimensions differ ({left} vs {right})")
            }
            Error::NonUnitarySpectrum { modulus } => {
                write!(f, "eigenvalue of modulus {modulus} is not unitary")
            }
            Error::ZeroVector => write!(f, "zero vector"),
            Error::ZeroSubspace => write!(f, "zero-dimensional subspace"),
            Error::NotFixed { residual } => {
                write!(f, "point is not fixed (chordal residual {residual:e})")
            }
            Error::CoincidentPoints => write!(f, "points coincide projectively"),
            Error::NotInPU => write!(f, "element does not preserve the Hermitian form"),
            Error::NotHermitian { defect } => write!(f, "matrix is not Hermitian (defect {defect:e})"),
            Error::NotNegativeType => write!(f, "vector is not of negative type"),
            Error::SizeTooSmall { size } => write!(f, "Jordan size {size} is below 2"),
            Error::NotParabolic => write!(f, "element is not parabolic"),
            Error::NotLoxodromic => write!(f, "element is not loxodromic"),
            Error::CertificateCheckFailed { what, residual } => {
                write!(f, "certificate check failed: {what} (residual {residual:e})")
            }
            Error::CertificateSearchFailed => write!(f, "contraction radius search exhausted its budget"),
            Error::NoConvergenceWithinBudget { defect } => {
                write!(f, "power sequence did not converge within budget (defect {defect:e})")
            }
            Error::BadK { k, dim } => write!(f, "wedge degree {k} outside 1..={dim}"),
            Error::WrongKind => write!(f, "element has the wrong kind for this check"),
            Error::MissingCertificate => write!(f, "a parabolic certificate is required"),
            Error::EmptyInput => write!(f, "empty input"),
            Error::NoConvergence { routine } => write!(f, "{routine} did not converge"),
        }
    }
}

impl core::error::Error for Error {}
