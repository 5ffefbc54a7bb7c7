//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("characteristic must be 0 or a prime, got {0}")]
    NonPrimeCharacteristic(u64),

    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("negative exponent {exponent} on non-invertible generator `{name}`")]
    NegativeExponent { name: String, exponent: i64 },

    #[error("element is not a monomial unit, cannot invert")]
    NotInvertible,

    #[error("elements belong to different rings")]
    RingMismatch,

    #[error("series have different variable sets")]
    VariableMismatch,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("coefficient of degree {degree} is beyond precision {precision}")]
    BeyondPrecision { degree: u32, precision: u32 },

    #[error("substituted series for `{0}` has a nonzero constant term")]
    NonzeroConstantTerm(String),

    #[error("denominator of {value} is divisible by p = {p}, reduction mod p undefined")]
    NotPIntegral { value: String, p: u64 },

    #[error("division by zero scalar")]
    DivisionByZero,

    #[error("formal group law axiom failed: {0}")]
    AxiomFailure(String),

    #[error("residual series has lowest term at degree {degree}, not a power of p = {p}")]
    LowestTermNotPPower { degree: u32, p: u64 },

    #[error("precision {precision} too low, need at least {needed}")]
    PrecisionTooLow { precision: u32, needed: u32 },

    #[error("p must be an odd prime, got {0}")]
    EvenOrNonPrime(u64),

    #[error("n must be at least 1")]
    HeightIndexZero,

    #[error("leading p-series coefficient v_{0}^E is not invertible")]
    LeadingCoefficientNotInvertible(u32),

    #[error("coefficient mismatch while equating s^{degree} terms: lhs = {lhs}, expected {rhs}")]
    CoefficientMismatch {
        degree: u32,
        lhs: String,
        rhs: String,
    },

    #[error("coefficient {0} cannot be expressed in bracket symbols [v_i^F]")]
    BracketEmbedding(String),

    #[error("rewrite rule `{name}` is not bidegree-homogeneous: lhs {lhs}, rhs {rhs}")]
    InhomogeneousRule {
        name: String,
        lhs: String,
        rhs: String,
    },

    #[error("rewrite rule `{0}` does not decrease the term order")]
    NonDecreasingRule(String),

    #[error("bidegree undefined: {0}")]
    BidegreeUndefined(String),

    #[error("unstable loop height {h} must satisfy 1 <= h < 2(p^n - 1) = {bound}")]
    HeightOutOfRange { h: u32, bound: u32 },

    #[error("stable class representative is not homogeneous of space label {0}")]
    BadClassLabel(i64),

    #[error("class representative not reachable at level {0}")]
    LevelUnreachable(i64),

    #[error("incompatible degree data: {0}")]
    IncompatibleDegrees(String),

    #[error("augmentation undefined on bracket symbols without a self-model identification")]
    AugmentationUndefined,

    #[error("invalid serialized data: {0}")]
    BadData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
