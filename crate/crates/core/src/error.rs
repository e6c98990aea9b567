use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus must be an odd prime, got {0}")]
    EvenModulus(u64),

    #[error("modulus {p} exceeds the configured limit {limit}")]
    ModulusTooLarge { p: u64, limit: u64 },

    #[error("residue {value} is outside [1, {max}]")]
    ResidueOutOfRange { value: i64, max: u64 },

    #[error("{value} is not invertible modulo {p}")]
    NotInvertible { value: i64, p: u64 },

    #[error("subgroup order {order} does not divide p - 1 = {group_order}")]
    OrderNotDivisor { order: u64, group_order: u64 },

    #[error("{a}/{p} is not a reduced fraction")]
    NotCoprime { a: u64, p: u64 },

    #[error("convergent index {n} out of range for a continued fraction of length {len}")]
    ConvergentIndex { n: usize, len: usize },

    #[error("denominator must be positive")]
    ZeroDenominator,

    #[error("box corner {0} is outside [0, 1]")]
    CornerOutOfRange(String),

    #[error("parameter c = {c} must lie in [1, p] for p = {p}")]
    ParameterOutOfRange { c: f64, p: u64 },

    #[error("character index {index} is out of range for modulus {p}")]
    CharacterIndex { index: u64, p: u64 },

    #[error("the principal character is not allowed here")]
    PrincipalCharacter,

    #[error("threshold must exceed 1, got {0}")]
    Threshold(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
