use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report.
///
/// Variants are grouped by the layer that raises them; [`Error::name`] gives the
/// stable identifier used in CLI error bodies.
#[derive(Debug, Error)]
pub enum Error {
    // complex construction
    #[error("simplex {simplex:?} is missing its face {face:?}")]
    MissingFace { simplex: Vec<usize>, face: Vec<usize> },
    #[error("simplex {0:?} is listed twice")]
    DuplicateSimplex(Vec<usize>),
    #[error("simplex {0:?} is not a strictly increasing vertex tuple")]
    OrientationError(Vec<usize>),
    #[error("simplex {simplex:?} listed in dimension {dim} has the wrong number of vertices")]
    MalformedSimplex { simplex: Vec<usize>, dim: usize },
    #[error("composing the boundary twice is nonzero in dimension {0}")]
    BoundaryNotNilpotent(usize),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("degree {degree} is outside 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("not a simplicial automorphism: {0}")]
    NotSimplicialMap(String),
    #[error("cochain of degree {degree} has {got} coefficients, expected {expected}")]
    CochainLength { degree: usize, got: usize, expected: usize },

    // spectral
    #[error("degree {degree}: eigenvalue {eigenvalue} deviates by {deviation:e} from the coexact decomposition")]
    ConsistencyViolation { degree: usize, eigenvalue: f64, deviation: f64 },
    #[error("inconsistent spectra: {0}")]
    InconsistentSpectra(String),
    #[error("window endpoint {endpoint} is within {distance:e} of eigenvalue {eigenvalue}")]
    EndpointTooCloseToSpectrum { endpoint: f64, eigenvalue: f64, distance: f64 },
    #[error("invalid window ({0}, {1})")]
    InvalidWindow(f64, f64),
    #[error("subspaces live in ambient spaces of different size ({0} vs {1})")]
    AmbientMismatch(usize, usize),

    // gluing
    #[error("site {base:?} and {part:?} have different dimensions")]
    SiteDimensionMismatch { base: Vec<usize>, part: Vec<usize> },
    #[error("invalid attachment: {0}")]
    InvalidAttachment(String),
    #[error("spectra of degrees {0} and {1} cannot be merged")]
    DegreeMismatch(usize, usize),
    #[error("window endpoint {endpoint} touches eigenvalue {eigenvalue} at eps = {eps:e}")]
    WindowTouchesSpectrum { endpoint: f64, eigenvalue: f64, eps: f64 },
    #[error("no dumbbell gadget implemented for n = {n}, p = {p}")]
    UnsupportedDegree { n: usize, p: usize },
    #[error("eigenvalue is not simple (gap to neighbours {gap:e})")]
    EigenvalueNotSimple { gap: f64 },

    // diabolo
    #[error("window holds {count} eigenvalues instead of 2 (decrease eps)")]
    WindowPollution { count: usize },
    #[error("window subspace nearly orthogonal to the reference plane (smallest overlap {0:e})")]
    DegenerateOverlap(f64),
    #[error("effective form at ({0}, {1}) is within the guard of the degenerate form (|(x,y)| = {2:e})")]
    GuardViolated(f64, f64, f64),
    #[error("adaptive refinement exceeded its budget of {0} evaluations")]
    RefinementBudgetExceeded(usize),
    #[error("eigenvalue gap collapsed to {gap:e} at ({at0}, {at1})")]
    GapCollapsedOnLoop { gap: f64, at0: f64, at1: f64 },
    #[error("winding number of the domain boundary is zero")]
    NoCertificate,
    #[error("sub-rectangle boundary keeps hitting a degeneracy after {0} retries")]
    BoundaryDegeneracy(usize),
    #[error("volume {volume} exceeds the budget {budget}")]
    VolumeBudgetExceeded { volume: f64, budget: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    // prescription
    #[error("targets too close: {0}")]
    TargetsTooClose(String),
    #[error("no convergence after {iterations} iterations (deviation {deviation:e})")]
    NonConvergence { iterations: usize, deviation: f64 },

    // io
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::MissingFace { .. } => "MissingFace",
            Error::DuplicateSimplex(_) => "DuplicateSimplex",
            Error::OrientationError(_) => "OrientationError",
            Error::MalformedSimplex { .. } => "MalformedSimplex",
            Error::BoundaryNotNilpotent(_) => "BoundaryNotNilpotent",
            Error::InvalidWeights(_) => "InvalidWeights",
            Error::DegreeOutOfRange { .. } => "DegreeOutOfRange",
            Error::NonpositiveScale(_) => "NonpositiveScale",
            Error::NotSimplicialMap(_) => "NotSimplicialMap",
            Error::CochainLength { .. } => "CochainLength",
            Error::ConsistencyViolation { .. } => "ConsistencyViolation",
            Error::InconsistentSpectra(_) => "InconsistentSpectra",
            Error::EndpointTooCloseToSpectrum { .. } => "EndpointTooCloseToSpectrum",
            Error::InvalidWindow(..) => "InvalidWindow",
            Error::AmbientMismatch(..) => "AmbientMismatch",
            Error::SiteDimensionMismatch { .. } => "SiteDimensionMismatch",
            Error::InvalidAttachment(_) => "InvalidAttachment",
            Error::DegreeMismatch(..) => "DegreeMismatch",
            Error::WindowTouchesSpectrum { .. } => "WindowTouchesSpectrum",
            Error::UnsupportedDegree { .. } => "UnsupportedDegree",
            Error::EigenvalueNotSimple { .. } => "EigenvalueNotSimple",
            Error::WindowPollution { .. } => "WindowPollution",
            Error::DegenerateOverlap(_) => "DegenerateOverlap",
            Error::GuardViolated(..) => "GuardViolated",
            Error::RefinementBudgetExceeded(_) => "RefinementBudgetExceeded",
            Error::GapCollapsedOnLoop { .. } => "GapCollapsedOnLoop",
            Error::NoCertificate => "NoCertificate",
            Error::BoundaryDegeneracy(_) => "BoundaryDegeneracy",
            Error::VolumeBudgetExceeded { .. } => "VolumeBudgetExceeded",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::TargetsTooClose(_) => "TargetsTooClose",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// True for failures of a certificate or of a numerical search, as opposed
    /// to malformed input.
    pub fn is_certificate_failure(&self) -> bool {
        matches!(
            self,
            Error::NoCertificate
                | Error::BoundaryDegeneracy(_)
                | Error::GuardViolated(..)
                | Error::RefinementBudgetExceeded(_)
                | Error::GapCollapsedOnLoop { .. }
                | Error::WindowPollution { .. }
                | Error::DegenerateOverlap(_)
                | Error::VolumeBudgetExceeded { .. }
                | Error::NonConvergence { .. }
                | Error::ConsistencyViolation { .. }
                | Error::WindowTouchesSpectrum { .. }
        )
    }
}
