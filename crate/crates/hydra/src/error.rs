use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not an element of Z[1/2, i]")]
    NotGaussDyadic(String),
    #[error("{0} is not a unit of H2")]
    NotH2Unit(String),
    #[error("denominator divisible by {0}: image undefined")]
    UndefinedImage(u64),
    #[error("generator residue is zero mod {0}")]
    ZeroResidue(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("spec parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("expression error: {0}")]
    Expr(String),
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("{0} is not expressible over the generators")]
    NotAUnit(String),
    #[error("linear system: {0}")]
    Lp(String),
    #[error("fingerprint map not injective after {0} primes")]
    NoInjectivePrime(usize),
    #[error("{0}")]
    Check(String),
}

pub type Result<T> = std::result::Result<T, Error>;
