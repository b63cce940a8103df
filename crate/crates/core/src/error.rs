use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    /// Every `p_j` equals one, so `P - I` has no inverse.
    #[error("singular system: all exponents p_j equal 1")]
    SingularSystem,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not supercritical: alpha = {alpha} does not exceed n/2 = {half_n}")]
    NotSupercritical { alpha: String, half_n: String },

    #[error("the chain constant C~ needs lambda~ > 0")]
    ZeroLambda,

    #[error("data {data} does not exceed the blow-up threshold {threshold}")]
    BelowThreshold { threshold: f64, data: f64 },

    #[error("no root: the data functional vanishes on every tested radius")]
    NoRoot,

    #[error("step size underflow at t = {t} (h = {h})")]
    ToleranceFailure { t: f64, h: f64 },

    #[error("insufficient data: need {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("unsupported dimension n = {0} (only 1, 2, 3)")]
    UnsupportedDimension(u32),

    #[error("mesh too coarse: {nodes} nodes inside radius {radius} (need 32)")]
    MeshTooCoarse { nodes: usize, radius: f64 },

    #[error("time step collapsed at t = {t} (dt = {dt})")]
    StabilityFailure { t: f64, dt: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
