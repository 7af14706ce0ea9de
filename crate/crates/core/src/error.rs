use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cusp: (0, 0) is not a point of P1(Q)")]
    ZeroCusp,
    #[error("singular matrix (determinant 0)")]
    SingularMatrix,
    #[error("matrix {0} is not in the semigroup S")]
    NotInS(String),
    #[error("segment {0} is not left primitive")]
    NotPrimitive(String),
    #[error("cusp {0} is not in the left half [-inf, 0]")]
    NotLeftCusp(String),
    #[error("expected a rational in [0, 1), got {0}")]
    NotInUnitInterval(String),
    #[error("cannot parse {input:?} as a rational: {reason} (at byte {position})")]
    Parse {
        input: String,
        position: usize,
        reason: String,
    },
    #[error("complex power of zero")]
    ZeroBase,
    #[error("point {z} lies on the branch cut (-inf, {r}]")]
    OnCut { z: Complex64, r: f64 },
    #[error("point {z} is outside the trusted evaluation domain: {reason}")]
    OutsideDomain { z: Complex64, reason: String },
    #[error("matrix {0} is outside the definition domain of the slash operator")]
    OutsideDefinitionDomain(String),
    #[error("pole of the Hurwitz zeta function at w = 1 ({0})")]
    Pole(String),
    #[error("eigenvalue problem failed: {0}")]
    Eigen(String),
    #[error("normalization degenerate: |psi(1)| = {0:e} before normalization")]
    NormalizationDegenerate(f64),
    #[error("eigen residual {0:e} exceeds the admissible 1e-5")]
    ResidualTooLarge(f64),
    #[error("|psi(z)| = {1:e} at z = {0} is too small to divide by")]
    SmallPsi(Complex64, f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
