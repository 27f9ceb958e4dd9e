use thiserror::Error;

pub type Result<T, E = LatticeError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("lattices live in different ambient spaces")]
    AmbientMismatch,

    #[error("degenerate form: {0}")]
    Degenerate(String),

    #[error("lattice is not integral: {0}")]
    NotIntegral(String),

    #[error("lattice is not unimodular (det = {0})")]
    NotUnimodular(String),

    #[error("sublattice is not primitive: {0}")]
    NotPrimitive(String),

    #[error("subgroup is not isotropic: {0}")]
    NotIsotropic(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no such lattice: {0}")]
    Infeasible(String),

    #[error("enumeration budget exceeded: {what} needs {needed}, limit {limit}")]
    BudgetExceeded {
        what: String,
        needed: String,
        limit: String,
    },

    #[error("reduction stalled at {0:?}")]
    ReductionStalled(Vec<i64>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A mathematical assertion that should hold unconditionally failed.
    /// Never expected; signals either a bug or a counterexample.
    #[error("assertion failed: {0}")]
    Falsified(String),
}

impl LatticeError {
    pub fn is_falsification(&self) -> bool {
        matches!(
            self,
            LatticeError::Falsified(_) | LatticeError::ReductionStalled(_)
        )
    }
}

/// Returns `Falsified` with the given message unless `cond` holds.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(LatticeError::Falsified(msg()))
    }
}
