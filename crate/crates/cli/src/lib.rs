//! Batch front end for `fock-wco`: JSON job configs in, JSON reports and
//! CSV matrices out.

pub mod config;
pub mod json;
pub mod pipeline;
pub mod sweep;

pub use config::{JobConfig, Task, UsageError};
pub use pipeline::{run, Outcome};
pub use sweep::{sweep, SweepSummary};
