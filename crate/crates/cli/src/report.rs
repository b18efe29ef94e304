//! Report schema shared by every subcommand's JSON output, plus the plain
//! header line.

use std::collections::BTreeMap;

use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub parameters: BTreeMap<String, String>,
    pub rows: Vec<serde_json::Value>,
    pub verdicts: Vec<VerdictRecord>,
    pub version: &'static str,
}

impl Report {
    pub fn new(command: &'static str, parameters: &[(&str, String)]) -> Report {
        Report {
            command,
            parameters: parameters
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            version: VERSION,
        }
    }

    /// `# kolakoski <version> command=<name> key=value ...`
    pub fn header_line(&self) -> String {
        let mut line = format!("# kolakoski {} command={}", self.version, self.command);
        for (k, v) in &self.parameters {
            line.push_str(&format!(" {k}={v}"));
        }
        line.push('\n');
        line
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    /// Stable identifier, `<check>/<level>` or a spectral check name.
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compared: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

impl VerdictRecord {
    pub fn simple(name: impl Into<String>, passed: bool) -> VerdictRecord {
        VerdictRecord {
            name: name.into(),
            passed,
            level: None,
            compared: None,
            first_mismatch: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    /// `resource` for cap/time/overflow limits, `error` otherwise.
    pub kind: &'static str,
    pub message: String,
}

impl From<&kolakoski_core::Error> for ErrorRecord {
    fn from(err: &kolakoski_core::Error) -> Self {
        ErrorRecord {
            kind: if err.is_resource() {
                "resource"
            } else {
                "error"
            },
            message: err.to_string(),
        }
    }
}
