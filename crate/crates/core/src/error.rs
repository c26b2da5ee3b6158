use thiserror::Error;

/// Errors reported by the library operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spatial dimension must be at least 2, got {0}")]
    DimensionTooSmall(u32),
    #[error("requires n > 1, got {0}")]
    InvalidRealDimension(f64),
    #[error("scale parameter must be positive, got {0}")]
    InvalidScale(f64),
    #[error("point must be nonzero")]
    ZeroPoint,
    #[error("spinor direction must be a unit vector (|n| = {0})")]
    NonUnitSpinor(f64),
    #[error("operation requires integer dimension, got n = {0}")]
    NonIntegerDimension(f64),
    #[error("evaluation at r = 0 undefined for winding S = {0}")]
    OriginUndefined(i32),
    #[error("coupling constants must be positive (beta1 = {0}, beta2 = {1})")]
    InvalidCouplings(f64, f64),
    #[error("S = -1/2 admits only the trivial solution; half-integer winding rejected")]
    HalfIntegerWinding,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("integration interval is empty (t0 = t1 = {0})")]
    EmptyInterval(f64),
    #[error("step size underflow at t = {t}: |f| + |g| = {amplitude:.3e} (blow-up)")]
    StepUnderflow { t: f64, amplitude: f64 },
    #[error("energy drift {drift:.3e} exceeds {limit:.3e}; trajectory untrusted")]
    EnergyDrift { drift: f64, limit: f64 },
    #[error("trajectory energy {0:.3e} is not zero; check requires the E = 0 level set")]
    NonzeroEnergy(f64),
    #[error("rho = {rho:.6e} exceeds (n/2)^(n-1) = {max:.6e}; sigma undefined")]
    RhoOutOfRange { rho: f64, max: f64 },
    #[error("angle undefined where f = 0")]
    AngleUndefined,
    #[error("trajectory has not decayed (terminal amplitude {0:.3e})")]
    NotDecayed(f64),
    #[error("windowed limit estimate did not converge (relative spread {0:.3e})")]
    LimitNotConverged(f64),
    #[error("decay-rate fit residual {0:.3e} too large")]
    DecayFitFailed(f64),
    #[error("grid must have at least 8 points per axis, got {0}")]
    GridTooCoarse(usize),
    #[error("grid box is degenerate on axis {0}")]
    DegenerateBox(usize),
    #[error("grid of {nodes} nodes x {spinor} components exceeds the memory cap of {cap} entries")]
    GridTooLarge { nodes: usize, spinor: usize, cap: usize },
    #[error("field contains non-finite values")]
    NonFiniteField,
    #[error("dimension mismatch: grid is {grid}-dimensional, representation is {rep}-dimensional")]
    DimensionMismatch { grid: usize, rep: usize },
    #[error("quadrature did not converge under refinement (last change {0:.3e})")]
    QuadratureNotConverged(f64),
    #[error("too few samples in fit window: {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("fit requires positive sample values")]
    NonPositiveSample,
    #[error("invalid fit window ({0}, {1})")]
    BadWindow(f64, f64),
    #[error("sample arrays have mismatched lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sphere radius must be at least 10, got {0}")]
    RadiusTooSmall(f64),
    #[error("leading-spinor estimate unstable under radius doubling (change {0:.3e})")]
    LeadingSpinorUnstable(f64),
    #[error("angular least-squares system is ill-conditioned")]
    IllConditionedAngularSystem,
}
