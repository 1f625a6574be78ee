//! Run configuration, persistence and the command registry behind the
//! `ilw-lab` binary.
//!
//! Every run writes into one output directory: a `manifest.toml` echoing the
//! resolved configuration, CSV files with frozen headers, versioned JSON
//! reports and a one-line `verdict` file. All files are replaced atomically.

mod commands;
mod config;
mod persist;

pub use commands::{
    exit_code, resolve_config, run, Command, CommandRegistry, Execution, Outputs, RunManifest, RunOutcome,
    RunStatus, MANIFEST_FILE,
};
pub use config::{key, parse_override, KeySpec, RunConfig, COMMON_KEYS, OUT_DIR_ENV};
pub use persist::{
    diagnostics_csv, read_report, report_csv, report_from_json, report_to_json, trajectory_csv, verdict_line,
    write_atomic, write_report, DIAGNOSTIC_HEADER, REPORT_HEADER, SCHEMA_VERSION, TRAJECTORY_HEADER,
};
