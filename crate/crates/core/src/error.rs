use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {name} is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },

    #[error(
        "degenerate parameters: alpha1*beta2 = alpha2*beta1 ({lhs} = {rhs}); \
         the system reduces to a Riccati equation"
    )]
    DegenerateRiccati { lhs: f64, rhs: f64 },

    #[error("division by zero: |y| = {y:e} is within the divide tolerance")]
    DivisionByZero { y: f64 },

    #[error("initial condition lies on the forbidden set (v({index}) vanishes)")]
    ForbiddenOrbit { index: i64 },

    #[error("linear system for the complex-regime constants is singular")]
    SingularSystem,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("coefficient {name} = {value} is negative")]
    NegativeCoefficient { name: &'static str, value: f64 },
}
