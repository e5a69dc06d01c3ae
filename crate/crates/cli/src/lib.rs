//! Configuration-driven experiment runner for random walks on F_p^d ⋊ SL_d(F_p).

pub mod config;
pub mod output;
pub mod run;

pub use config::{ExperimentConfig, MeasureKind};
pub use run::{error_code, RunContext, ScanRow, ScanSummary, Status};
