use thiserror::Error;

/// Errors raised by the geometry routines.
///
/// Validation variants name the violated invariant so front-ends can
/// report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not anti-Hermitian (defect {0:.3e})")]
    NotAntiHermitian(f64),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("not an orthogonal projection: {0}")]
    NotProjection(String),
    #[error("vector is not fixed by the projection (|Pf - f| = {0:.3e})")]
    NotFixedVector(f64),
    #[error("vector is not a unit vector (|f| = {0})")]
    NotUnit(f64),
    #[error("matrix is not codiagonal with respect to the projection (defect {0:.3e})")]
    NotCodiagonal(f64),
    #[error("Re<g, f> = {0:.3e} must vanish")]
    RealPairing(f64),
    #[error("tangent vector invariant violated: {0}")]
    TangentInvariant(String),
    #[error("matrix is singular or indefinite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("vectors are antipodal (|xi - eta| = {0})")]
    AntipodalVectors(f64),
    #[error("projections too far apart (|P - P0| = {0})")]
    TooFar(f64),
    #[error("point lies outside the chart: {0}")]
    OutOfChart(String),
    #[error("gamma vanishes (|gamma| = {0:.3e})")]
    DegenerateGamma(f64),
    #[error("free slot is not a contraction (|Z| = {0})")]
    NotContraction(f64),
    #[error("directions span a degenerate plane")]
    DegenerateSpan,
    #[error("solver diverged: {0}")]
    SolverDiverged(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("target outside the geodesic radius (distance lower bound {0})")]
    OutOfRadius(f64),
    #[error("sample grid too coarse (step {0})")]
    GridTooCoarse(f64),
    #[error("incompatible samples: {0}")]
    IncompatibleSamples(String),
}

pub type Result<T> = std::result::Result<T, Error>;
