use crate::solver::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("spatial dimension must be >= 3, got {n}")]
    BadDim { n: i64 },
    #[error("dimension N={n} must be odd here")]
    NeedOdd { n: u32 },
    #[error("dimension N={n} must be even here (supported: 4, 6)")]
    NeedEven { n: u32 },
    #[error("invalid grid: {reason}")]
    BadGrid { reason: String },
    #[error("sample array length {len} != grid size {n}")]
    LengthMismatch { len: usize, n: usize },
    #[error("non-finite sample at node {index}")]
    NonFinite { index: usize },
    #[error("scale must be positive, got {value}")]
    BadScale { value: f64 },
    #[error("radius {r} outside grid coverage [{lo}, {hi}]")]
    OutsideGrid { r: f64, lo: f64, hi: f64 },
    #[error(
        "state support reaches the last grid node: estimated truncated tail \
         {tail:.3e} exceeds allowance {limit:.3e}"
    )]
    TailTruncation { tail: f64, limit: f64 },
    #[error("divergent integral: {what}")]
    Divergent { what: String },
    #[error("CFL ratio {cfl} outside (0, 0.9]")]
    BadCfl { cfl: f64 },
    #[error("domain of dependence guard: grid must reach r = {needed}, ends at {have}")]
    GridTooShort { needed: f64, have: f64 },
    #[error("type I blow-up suspected at t = {t}: sup|u| exceeded 1e6")]
    BlowUp { t: f64, partial: Box<Trajectory> },
    #[error("cone r > {cone} exits the usable grid region r < {usable} at t = {t}")]
    ConeExitsGrid { cone: f64, usable: f64, t: f64 },
    #[error("half-line grid too short: estimated kernel tail {tail:.3e} exceeds 1% of value {value:.3e}")]
    KernelTail { tail: f64, value: f64 },
    #[error("parameters violate hypotheses: {reason}")]
    RejectedInput { reason: String },
    #[error("trusted region insufficient: {reason}")]
    TrustedRegion { reason: String },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
