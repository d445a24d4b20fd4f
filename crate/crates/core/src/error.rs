use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports. Each variant maps to a stable
/// machine-readable code (see [`Error::code`]) used by the CLI report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode {mode} out of range for a {n_modes}-mode system")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("{n_modes} modes exceeds the configured cap of {cap}")]
    ModeCapExceeded { n_modes: usize, cap: usize },

    #[error("a fermionic system needs at least one mode")]
    NoModes,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid mode set: {0}")]
    InvalidModeSet(String),

    #[error("subsystem must not be empty")]
    EmptySubsystem,

    #[error("operator contains non-finite entries")]
    NonFinite,

    #[error("operator is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("state is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("parity superselection violated (residual {residual:e})")]
    SsrViolation { residual: f64 },

    #[error("operator is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not local to modes {modes:?} (residual {residual:e})")]
    NotLocal { modes: Vec<usize>, residual: f64 },

    #[error("subsystems {a:?} and {b:?} overlap")]
    Overlap { a: Vec<usize>, b: Vec<usize> },

    #[error("modes {sub:?} are not a subset of {sup:?}")]
    NotSubset { sub: Vec<usize>, sup: Vec<usize> },

    #[error("wedge of two parity-odd operators has no sign convention")]
    OddWedge,

    #[error("Heisenberg states differ")]
    HeisenbergStateMismatch,

    #[error("local ontic states are incompatible")]
    Incompatible,

    #[error("descriptors violate the canonical anticommutation relations (residual {residual:e})")]
    DescriptorAlgebra { residual: f64 },

    #[error("conjugated mode {mode} is not expressible in the modes {modes:?}")]
    NotRepresentable { mode: usize, modes: Vec<usize> },

    #[error("numerically degenerate input: {0}")]
    Degenerate(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::ModeOutOfRange { .. } => "mode_out_of_range",
            Error::ModeCapExceeded { .. } => "mode_cap_exceeded",
            Error::NoModes => "no_modes",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidModeSet(_) => "invalid_mode_set",
            Error::EmptySubsystem => "empty_subsystem",
            Error::NonFinite => "non_finite",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::TraceNotOne { .. } => "trace_not_one",
            Error::NotPositive { .. } => "not_positive",
            Error::SsrViolation { .. } => "ssr_violation",
            Error::NotUnitary { .. } => "not_unitary",
            Error::NotLocal { .. } => "not_local",
            Error::Overlap { .. } => "overlap",
            Error::NotSubset { .. } => "not_subset",
            Error::OddWedge => "odd_wedge",
            Error::HeisenbergStateMismatch => "heisenberg_state_mismatch",
            Error::Incompatible => "incompatible",
            Error::DescriptorAlgebra { .. } => "descriptor_algebra",
            Error::NotRepresentable { .. } => "not_representable",
            Error::Degenerate(_) => "degenerate",
            Error::Internal(_) => "internal",
        }
    }
}
