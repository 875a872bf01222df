use crate::rat::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("non-invertible series")]
    NonInvertible,
    #[error("beyond truncation: exponent {exponent} is not below order {order}")]
    BeyondTruncation { exponent: Rational, order: Rational },
    #[error("insufficient truncation: requested order {requested}, available {available}")]
    InsufficientTruncation { requested: Rational, available: Rational },
    #[error("non-integral exponents")]
    NonIntegralExponents,
    #[error("zero factor: {0}")]
    ZeroFactor(String),
    #[error("divergent theta: alpha must be positive, got {0}")]
    DivergentTheta(Rational),
    #[error("not a Nahm matrix: {0}")]
    NotNahmMatrix(String),
    #[error("divergent hypergeometric sum: {0}")]
    DivergentSum(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid geta-list: {0}")]
    InvalidGeta(String),
    #[error("not a generalized eta-product at level {level}: classical factor (q^{level};q^{level})_inf has exponent {exponent}")]
    NotEtaProduct { level: i64, exponent: Rational },
    #[error("inconsistent C candidates: residuals {}", fmt_list(.0))]
    InconsistentC(Vec<Rational>),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown identity '{0}'")]
    UnknownIdentity(String),
    #[error("duplicate identity id '{0}'")]
    DuplicateIdentity(String),
    #[error("{0}")]
    Io(String),
}

fn fmt_list(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(|r| r.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}
