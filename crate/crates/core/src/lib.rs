// `!(x > 0)` is used on purpose throughout so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod scalar;
pub mod simcore;

pub use error::{Error, Result};
pub use scalar::Real;
pub mod analytics;
pub mod chainsim;
pub mod channel;
pub mod cli;
pub mod losscode;
pub mod minimize;

pub type PureStateF64 = simcore::PureState<f64>;
pub type PureStateF32 = simcore::PureState<f32>;
pub type DensityMatrixF64 = simcore::DensityMatrix<f64>;
pub type DensityMatrixF32 = simcore::DensityMatrix<f32>;
pub type TransponderParamsF64 = analytics::TransponderParams<f64>;
pub type RecoveryOutcomeF64 = losscode::RecoveryOutcome<f64>;
