use alloc::string::String;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("integrand is not finite at t = {t}")]
    NonFiniteIntegrand { t: f64 },
    #[error("quadrature did not converge on [{a}, {b}] after {halvings} halvings")]
    QuadratureDiverged { a: f64, b: f64, halvings: usize },
    #[error("derivative of order {requested} requested from a curve of order {declared}")]
    OrderExceeded { requested: usize, declared: usize },
    #[error("invalid interval [{start}, {end}]")]
    InvalidInterval { start: f64, end: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("element outside the chart domain (distance {distance}, radius {radius})")]
    OutOfChart { distance: f64, radius: f64 },
    #[error("singular group element at t = {t}")]
    Singular { t: f64 },
    #[error("exponential overflowed for an algebra element of norm {norm}")]
    ExpOverflow { norm: f64 },
    #[error("{needed} steps needed but at most {max} allowed")]
    StepLimit { needed: usize, max: usize },
    #[error("series did not converge within {terms} terms (last term norm {last})")]
    SeriesDiverged { terms: usize, last: f64 },
    #[error("increment {n} violates the decay bound ({norm} > {bound})")]
    DecayViolation { n: usize, norm: f64, bound: f64 },
    #[error("hypothesis violated for seminorm `{seminorm}`, order {order}, step {h}: {value} > {bound}")]
    HypothesisViolation {
        seminorm: String,
        order: usize,
        h: f64,
        value: f64,
        bound: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
