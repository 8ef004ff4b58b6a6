//! JSON task runner over the `metgroup` library.
//!
//! A task config names a task, its group(s) and parameters; [`run`]
//! validates it, performs the computation and returns a report together
//! with the process exit status (0 true, 1 false, 2 inconclusive, 3 config
//! error).

pub mod catalog;
pub mod config;
pub mod groups;
pub mod report;
pub mod tasks;
pub mod verify;

pub use config::{CliError, TaskConfig, SCHEMA_VERSION};
pub use report::{run, without_runtime, RunOptions, RunOutput};
pub use verify::verify_report;
