//! One module per subcommand. Each resolves its configuration, writes its
//! files through [`Outputs`](crate::output::Outputs) and returns a JSON summary.

pub mod common;
pub mod constants;
pub mod coupling;
pub mod ergodicity;
pub mod figure1;
pub mod stationary;
pub mod strong_error;
pub mod verify;

use serde_json::Value;

/// What an experiment hands back to the runner.
pub struct Outcome {
    pub summary: Value,
    /// `Some` for experiments whose result is a pass/fail verdict.
    pub passed: Option<bool>,
}
