use thiserror::Error;

/// Failures raised by the library. Each variant maps to a stable name via
/// [`Error::name`], which the command-line driver writes into its error record.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("coexistence density undefined: a_s^2 - a_c^2 = {0:e}")]
    CoexistenceSingular(f64),
    #[error("kernel evaluated at |x| = {0:e}, below the singular cutoff")]
    SingularEvaluation(f64),
    #[error("operation needs M > 1")]
    DegenerateMassRatio,
    #[error("radius {0} lies outside every support")]
    SampleOutsideSupport(f64),
    #[error("no profile for this equilibrium kind")]
    UnsupportedKind,
    #[error("quadrature did not converge (estimated error {0:e})")]
    QuadratureNonConvergence(f64),
    #[error("threshold function value {value} outside ({lo}, {hi})")]
    FOutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("perturbation constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("equilibrium does not exist: {0}")]
    EquilibriumMissing(String),
    #[error("contour integral needs a nonzero mode")]
    ZeroMode,
    #[error("ratio alpha = {0} too close to 1")]
    NearSingularAlpha(f64),
    #[error("particles {0} and {1} closer than the collision cutoff")]
    ParticleCollision(usize, usize),
    #[error("time step fell below {0:e}")]
    StepUnderflow(f64),
    #[error("need at least {0} particles per species")]
    TooFewParticles(usize),
    #[error("eigenvalue iteration did not converge on a {0}x{0} matrix")]
    EigenNonConvergence(usize),
    #[error("argument {0} out of range")]
    OutOfRange(f64),
    #[error("separation map not monotone on [{0}, {1}]")]
    BracketingFailure(f64, f64),
}

impl Error {
    /// Variant name, used as a machine-readable error tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::CoexistenceSingular(_) => "CoexistenceSingular",
            Error::SingularEvaluation(_) => "SingularEvaluation",
            Error::DegenerateMassRatio => "DegenerateMassRatio",
            Error::SampleOutsideSupport(_) => "SampleOutsideSupport",
            Error::UnsupportedKind => "UnsupportedKind",
            Error::QuadratureNonConvergence(_) => "QuadratureNonConvergence",
            Error::FOutOfRange { .. } => "FOutOfRange",
            Error::ConstraintViolated(_) => "ConstraintViolated",
            Error::EquilibriumMissing(_) => "EquilibriumMissing",
            Error::ZeroMode => "ZeroMode",
            Error::NearSingularAlpha(_) => "NearSingularAlpha",
            Error::ParticleCollision(..) => "ParticleCollision",
            Error::StepUnderflow(_) => "StepUnderflow",
            Error::TooFewParticles(_) => "TooFewParticles",
            Error::EigenNonConvergence(_) => "EigenNonConvergence",
            Error::OutOfRange(_) => "OutOfRange",
            Error::BracketingFailure(..) => "BracketingFailure",
        }
    }

    /// True for errors caused by bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_) | Error::UnsupportedKind | Error::ZeroMode | Error::OutOfRange(_) | Error::DegenerateMassRatio
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
