use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension must be an odd prime no larger than {max} (got {0})", max = crate::arith::MAX_DIMENSION)]
    InvalidDimension(u64),

    #[error("division by zero in Z_{0}")]
    DivisionByZero(u64),

    /// Two nonzero values whose √d scales differ by an odd amount cannot be
    /// compared or added without expanding √d into the cyclotomic basis.
    #[error("incommensurable √d scales {0} and {1} (parities differ)")]
    IncommensurableScale(u32, u32),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u64, u64),

    #[error("labeling mismatch: expected {expected}, found {found}")]
    LabelingMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("state with norm² {0} cannot be normalized exactly")]
    NotExactlyNormalizable(String),

    /// An internal identity that must hold exactly did not.
    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
