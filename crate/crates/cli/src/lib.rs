//! Scenario files, simulation runs, certificates and verification reports.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod commands;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod render;
pub mod scenario;
pub mod suite;
pub mod verify;

pub use error::CliError;
pub use scenario::{CertificateConfig, Scenario, System};
pub use verify::{CriterionResult, RunReport, Verdict};
