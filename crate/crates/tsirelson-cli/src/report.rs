//! The machine-readable run report: a stable envelope around each command's
//! result payload.
//!
//! The report is deterministic: identical inputs (argv included) produce
//! byte-identical serialized reports. Timing is therefore never part of the
//! report; the binary prints elapsed time to stderr instead.

use serde::Serialize;
use serde_json::Value as Json;
use sha2::{Digest, Sha256};

/// Schema revision of the report envelope.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Where an input came from and what its bytes hashed to.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InputDigest {
    /// Role of the input in the command (`spec`, `spec-left`, `vector`, ...).
    pub role: String,
    /// `file:<path>` or `inline`.
    pub source: String,
    /// Lowercase hex SHA-256 of the raw input bytes.
    pub sha256: String,
}

impl InputDigest {
    pub fn from_file(role: &str, path: &str, bytes: &[u8]) -> Self {
        InputDigest {
            role: role.to_string(),
            source: format!("file:{path}"),
            sha256: hex_sha256(bytes),
        }
    }

    pub fn inline(role: &str, text: &str) -> Self {
        InputDigest {
            role: role.to_string(),
            source: "inline".to_string(),
            sha256: hex_sha256(text.as_bytes()),
        }
    }
}

/// The full machine-readable report emitted by `--format structured` and
/// `--out`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    /// Subcommand name.
    pub command: String,
    /// Echo of the command line (program name excluded).
    pub argv: Vec<String>,
    /// Digests of every input document consumed.
    pub inputs: Vec<InputDigest>,
    /// Resolved option values actually used (after flag / document / default
    /// precedence).
    pub options: Json,
    /// Command-specific result payload.
    pub result: Json,
}

impl RunReport {
    /// Serialize with stable field order and a trailing newline.
    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
