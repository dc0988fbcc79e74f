//! Architecture descriptions, placement maps, validation and the
//! FPGA-to-ASIC area estimator.
//!
//! Architecture files are line oriented: `key = value` pairs grouped under
//! `[noc.<i>]`, `[adapter]`, `[module.<name>]`, `[sectors]` and `[telemetry]`
//! headers, with `#` starting a comment. Module section names may contain
//! `*` wildcards. Placement files hold one `module.port noc router [kind]`
//! entry per line.

mod arch;
mod area;
mod placement;
mod validate;

use thiserror::Error;

pub use arch::{NocConfig, RadArchitecture, SectorGrid, SectorKind, TelemetryConfig, DEFAULT_QUIESCENCE_CYCLES};
pub use area::{estimate_asic_area, AreaComposition, AreaError};
pub use placement::{ModuleKind, PlacementEntry, PlacementMap};
pub use validate::validate;

/// Parse errors. `line` is 1-based; 0 refers to a command-line override.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: missing required key `{key}`")]
    MissingRequiredKey { line: usize, key: String },
    #[error("line {line}: malformed value for `{key}`: {reason}")]
    MalformedValue { line: usize, key: String, reason: String },
    #[error("line {line}: port `{port}` is placed more than once")]
    DuplicatePort { line: usize, port: String },
    #[error("line {line}: router {router} is out of range for noc {noc} ({count} routers)")]
    RouterOutOfRange { line: usize, noc: usize, router: usize, count: usize },
    #[error("line {line}: noc {noc} does not exist ({count} nocs)")]
    UnknownNoc { line: usize, noc: usize, count: usize },
    #[error("line {line}: router {router} of noc {noc} already has {limit} ports attached")]
    OversubscribedRouter { line: usize, noc: usize, router: usize, limit: usize },
}

impl ConfigError {
    pub fn line(&self) -> usize {
        match self {
            ConfigError::UnknownKey { line, .. }
            | ConfigError::MissingRequiredKey { line, .. }
            | ConfigError::MalformedValue { line, .. }
            | ConfigError::DuplicatePort { line, .. }
            | ConfigError::RouterOutOfRange { line, .. }
            | ConfigError::UnknownNoc { line, .. }
            | ConfigError::OversubscribedRouter { line, .. } => *line,
        }
    }
}

/// Splits a line into content and drops `#` comments.
pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}
