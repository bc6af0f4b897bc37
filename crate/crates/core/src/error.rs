use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid algebra {series}{rank}: {reason}")]
    InvalidAlgebra { series: char, rank: usize, reason: &'static str },

    #[error("weight has {got} labels, algebra rank is {expected}")]
    RankMismatch { expected: usize, got: usize },

    #[error("simple reflection index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),

    #[error("weight {weight:?} is not integrable at level {level}")]
    NotIntegrable { weight: Vec<i64>, level: u32 },

    #[error("{what} cap exceeded: need {required}, cap is {cap}")]
    CapExceeded { what: &'static str, required: u128, cap: u128 },

    #[error("singular point: |D_rho| = {magnitude:e} (closest wall: root {wall:?})")]
    SingularPoint { magnitude: f64, wall: Vec<i64> },

    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),

    #[error("{0} requires a simply-laced (ADE) algebra")]
    NotSimplyLaced(&'static str),

    #[error("modular parameter must have Im(tau) > 0, got {0}")]
    InvalidTau(f64),

    #[error("theta truncation needs {required} lattice points, cap is {cap}")]
    RadiusOverflow { required: u128, cap: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for the resource-limit family (CLI exit code 1).
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::RadiusOverflow { .. })
    }
}
