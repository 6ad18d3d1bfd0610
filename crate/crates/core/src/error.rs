//! Error types shared by the simulation core.

use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A constructor or operation received an out-of-domain parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested grating diffraction order is evanescent.
    #[error("evanescent diffraction order: lambda/d - sin(theta_i) = {bracket} not in (0, 1)")]
    EvanescentOrder { bracket: f64 },

    /// Time integration produced a non-finite state.
    #[error("integration failure at t = {last_good_t} ps: {reason}")]
    IntegrationFailure { last_good_t: f64, reason: String },

    /// The requested propagation state exceeds the configured memory budget.
    #[error("memory budget exceeded: state needs {needed} bytes, cap is {cap} bytes")]
    MemoryBudget { needed: usize, cap: usize },

    /// The truncated few-mode Hilbert space exceeds the dimension cap.
    #[error("Hilbert-space dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
