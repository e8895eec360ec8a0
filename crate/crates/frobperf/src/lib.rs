//! Script language, JSON reports and command line for `frobperf-core`.

pub mod dsl;
pub mod json;
pub mod session;

pub use frobperf_core as core;
pub use session::{Config, RunOutput, ScriptError, Session};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] frobperf_core::Error),
    #[error("invalid JSON input: {0}")]
    Json(String),
}

/// Parses and runs a script; the JSON document is serialized with sorted
/// keys and two-space indentation.
pub fn run_script(src: &str, base_dir: &std::path::Path, config: &Config) -> Result<RunOutput, ScriptError> {
    Ok(Session::parse(src, base_dir, config)?.run())
}

pub fn render(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
