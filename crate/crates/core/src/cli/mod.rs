//! Configuration loading and the batch runner behind the binary.
//!
//! Configurations are TOML. Every physical quantity is a string carrying its
//! unit (`"27.2 kgf"`, `"60.3 mm"`); bare numbers are accepted only for
//! dimensionless values such as friction coefficients and gear ratios. Unknown
//! keys are errors, and validation reports every problem at once.

mod config;
mod run;
mod schema;

use std::fmt;

pub use config::{
    load_config, load_config_for, parse_config, ClampInput, Command, ForceUnit, Inputs, Overrides, RunConfig, SimulateInput,
    SweepInput, TopologyInput, CUTBACKS_MAX, DEFAULT_NODES, DEFAULT_OUT_DIR, ITERATIONS_RANGE, NODES_RANGE, RAMP_RANGE, TOL_RANGE,
};
pub use run::{run, write_rejection, RunOutcome, Status, SUMMARY_FILE};

/// One validation problem, located by its dotted key path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Dotted key path such as `capstan.mu`; empty for whole-file problems.
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}
