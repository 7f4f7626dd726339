use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every pipeline in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree pair ({0}, {1}) is smaller than the polynomial's actual degree")]
    InvalidDegree(usize, usize),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("root {re:+.3e}{im:+.3e}i lies within the margin of the unit circle")]
    RootNearTorus { re: f64, im: f64 },
    #[error("moment quadrature did not converge up to grid {grid} (density has a pole on or near the torus)")]
    MomentDivergence { grid: usize },
    #[error("trigonometric polynomial is not positive on the sampling grid (min {min:.3e})")]
    NonPositiveDensity { min: f64 },
    #[error("moment ({j}, {k}) requested but table only covers |j| <= {jmax}, |k| <= {kmax}")]
    InsufficientMoments { j: i64, k: i64, jmax: usize, kmax: usize },
    #[error("moment form is not positive (smallest Gram eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },
    #[error("moment form is numerically degenerate: {0}")]
    DegenerateForm(String),
    #[error("matrix condition fails (max |A T^j B| = {max_violation:.3e})")]
    MatrixConditionFails { max_violation: f64 },
    #[error("d = {d} is not admissible; admissible range is [{lo}, {hi}]")]
    DNotAdmissible { d: usize, lo: usize, hi: usize },
    #[error("approximate gcd is unstable (relative residual {residual:.3e})")]
    GcdUnstable { residual: f64 },
    #[error("trigonometric polynomial is not factorable (max |A T^j B| = {max_violation:.3e})")]
    NotFactorable { max_violation: f64 },
    #[error("factorization residual {residual:.3e} exceeds tolerance")]
    FactorResidual { residual: f64 },
    #[error("polynomial shares a factor with its reflection")]
    CommonFactor,
    #[error("scaling limit did not reach tolerance (best residual {best_residual:.3e})")]
    NoConvergence { best_residual: f64 },
    #[error("polynomial is not a unimodular multiple of its reflection (residual {residual:.3e})")]
    NotSelfReflective { residual: f64 },
    #[error("polynomial has a factor in z alone")]
    ZOnlyFactor,
    #[error("leading w-coefficient vanishes on the sampling grid")]
    DegenerateSlice,
    #[error("zero set is not a generalized distinguished variety (worst ||w| - 1| = {worst:.3e})")]
    NotGdv { worst: f64 },
    #[error("sum-of-squares certificate failed: {0}")]
    CertificateFailed(String),
    #[error("determinantal fit residual {residual:.3e} exceeds tolerance")]
    FitResidualTooLarge { residual: f64 },
    #[error("strip moments disagree (residual {residual:.3e})")]
    StripMismatch { residual: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Exit-code class of an error, as used by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The question was well posed and the answer is "no".
    Negative,
    /// The input itself is malformed or violates a precondition.
    InvalidInput,
    /// A numerical procedure failed to reach its tolerance.
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            MatrixConditionFails { .. }
            | NotFactorable { .. }
            | NotGdv { .. }
            | NotSelfReflective { .. }
            | DNotAdmissible { .. }
            | CommonFactor
            | StripMismatch { .. } => ErrorClass::Negative,
            InvalidDegree(..)
            | ZeroPolynomial
            | NonPositiveDensity { .. }
            | InsufficientMoments { .. }
            | NotPositive { .. }
            | ZOnlyFactor
            | InvalidInput(_) => ErrorClass::InvalidInput,
            RootNearTorus { .. }
            | MomentDivergence { .. }
            | DegenerateForm(_)
            | GcdUnstable { .. }
            | FactorResidual { .. }
            | NoConvergence { .. }
            | DegenerateSlice
            | CertificateFailed(_)
            | FitResidualTooLarge { .. } => ErrorClass::Numerical,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Negative => 1,
            ErrorClass::InvalidInput => 2,
            ErrorClass::Numerical => 3,
        }
    }
}
