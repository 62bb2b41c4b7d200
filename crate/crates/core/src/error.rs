use thiserror::Error;

/// Errors raised by the arithmetic and cohomology routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("mismatched primes: {0} and {1}")]
    PrimeMismatch(u32, u32),

    #[error("division by a scalar that is zero at precision {prec}")]
    DivisionByZero { prec: i32 },

    #[error("{0} is not congruent to 1 mod p")]
    NotPrincipalUnit(String),

    #[error("{0} is divisible by p")]
    NotAUnit(String),

    #[error("p-adic integer required, got valuation {0}")]
    NotIntegral(i32),

    #[error("window underflow: {0}")]
    WindowUnderflow(String),

    #[error("no antiderivative: Res(f) has valuation {residue_val} below precision {prec}")]
    NoAntiderivative { residue_val: i32, prec: i32 },

    #[error("rank is ambiguous at precision: pivot valuation {pivot_val} within margin of precision {prec}")]
    RankAmbiguous { pivot_val: i32, prec: i32 },

    #[error("not a coboundary: inconsistent row with residual valuation {residual_val} (precision {prec})")]
    NotCoboundary { residual_val: i32, prec: i32 },

    #[error("precision exhausted: residual valuation {residual_val} too close to precision {prec}")]
    PrecisionExhausted { residual_val: i32, prec: i32 },

    #[error("ambiguous at precision: {0}")]
    Ambiguous(String),

    #[error("cup product degree {0} + {1} exceeds 2 or is unsupported")]
    DegreeOverflow(u8, u8),

    #[error("character mismatch: {0}")]
    CharacterMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no stabilization up to level {0}")]
    NoStabilization(u32),

    #[error("incompatible fiber family: {0}")]
    IncompatibleFamily(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
