use thiserror::Error;

use crate::group::GroupTag;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("group tag mismatch: {left} vs {right}")]
    TagMismatch { left: GroupTag, right: GroupTag },
    #[error("index ({j}, {k}) out of range for dimension {dim}")]
    IndexOutOfRange { j: usize, k: usize, dim: usize },
    #[error("degree norm {norm} inconsistent with rho {rho}")]
    InconsistentDegree { norm: f64, rho: f64 },
    #[error("degenerate degree: rho {rho} is below threshold {threshold}")]
    DegenerateDegree { rho: f64, threshold: f64 },
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NonHermitian(f64),
    #[error("unsupported homomorphism: {0}")]
    UnsupportedHomomorphism(String),
    #[error("representation and fiber vector disagree: {0}")]
    RepMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = LieError> = std::result::Result<T, E>;

pub(crate) fn check_tags(left: GroupTag, right: GroupTag) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(LieError::TagMismatch { left, right })
    }
}
