use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not an odd prime below 2^32")]
    NotPrime(u64),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("no principal root of order {0}")]
    NoSuchRoot(u64),
    #[error("values and permissions differ in length")]
    LengthMismatch,
    #[error("write to read-only register {0}")]
    PermissionDenied(usize),
    #[error("register {0} out of range")]
    OutOfRange(usize),
    #[error("bad view range")]
    BadRange,
    #[error("write into fake padding at logical index {0}")]
    PaddingWrite(usize),
    #[error("exit_call without matching enter_call")]
    UnderflowExit,
    #[error("length is not a power of two")]
    BadLength,
    #[error("root order does not match transform length")]
    BadOrder,
    #[error("middle product needs size(f) >= size(g)")]
    SizeOrder,
    #[error("constant coefficient is not a unit")]
    NonUnitConstant,
    #[error("leading coefficient is not a unit")]
    NonUnitLeading,
    #[error("duplicate evaluation point")]
    DuplicatePoint,
    #[error("top coefficients of the accumulator are not zero")]
    PreconditionTopNonzero,
    #[error("low coefficients of the accumulator are not zero")]
    PreconditionLowNonzero,
    #[error("scratch space too small")]
    ScratchTooSmall,
    #[error("bad scratch size")]
    BadScratch,
    #[error("operand sizes violate the operation contract")]
    SizeContract,
    #[error("zero evaluation point with nonzero shift")]
    ZeroPointWithShift,
    #[error("bad transform parameters")]
    BadParams,
    #[error("lambda must be nonzero")]
    LambdaZero,
    #[error("bad slice bounds")]
    BadSlice,
    #[error("divisor is not a unit")]
    NonUnit,
    #[error("modulus is not monic")]
    NonMonicModulus,
    #[error("matrix has an all-zero row")]
    ZeroRow,
    #[error("matrix dimensions do not match")]
    DimMismatch,
    #[error("three-way overlap in 2D emission")]
    OverlapUnsupported,
    #[error("arena regions do not match program dimensions")]
    RegionMismatch,
    #[error("dimension is not a power of two")]
    NotPowerOfTwo,
    #[error("operand views overlap")]
    Aliasing,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Variant name, as printed by the command-line front end.
    pub fn name(&self) -> &'static str {
        use Error::*;
        match self {
            NotPrime(_) => "NotPrime",
            ZeroInverse => "ZeroInverse",
            NoSuchRoot(_) => "NoSuchRoot",
            LengthMismatch => "LengthMismatch",
            PermissionDenied(_) => "PermissionDenied",
            OutOfRange(_) => "OutOfRange",
            BadRange => "BadRange",
            PaddingWrite(_) => "PaddingWrite",
            UnderflowExit => "UnderflowExit",
            BadLength => "BadLength",
            BadOrder => "BadOrder",
            SizeOrder => "SizeOrder",
            NonUnitConstant => "NonUnitConstant",
            NonUnitLeading => "NonUnitLeading",
            DuplicatePoint => "DuplicatePoint",
            PreconditionTopNonzero => "PreconditionTopNonzero",
            PreconditionLowNonzero => "PreconditionLowNonzero",
            ScratchTooSmall => "ScratchTooSmall",
            BadScratch => "BadScratch",
            SizeContract => "SizeContract",
            ZeroPointWithShift => "ZeroPointWithShift",
            BadParams => "BadParams",
            LambdaZero => "LambdaZero",
            BadSlice => "BadSlice",
            NonUnit => "NonUnit",
            NonMonicModulus => "NonMonicModulus",
            ZeroRow => "ZeroRow",
            DimMismatch => "DimMismatch",
            OverlapUnsupported => "OverlapUnsupported",
            RegionMismatch => "RegionMismatch",
            NotPowerOfTwo => "NotPowerOfTwo",
            Aliasing => "Aliasing",
            Parse(_) => "Parse",
        }
    }
}
