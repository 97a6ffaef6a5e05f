use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// One benchmark run. Fingerprints are deterministic for fixed parameters
/// and seed; seconds are informational only and never asserted.
#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub name: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seconds: f64,
    pub fingerprint: String,
    pub oracle_checked: bool,
}

impl BenchReport {
    pub fn new(name: &str) -> Self {
        BenchReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            seconds: 0.0,
            fingerprint: String::new(),
            oracle_checked: false,
        }
    }

    pub fn param_u64(&mut self, key: &str, v: u64) -> &mut Self {
        self.params.insert(key.to_string(), serde_json::json!(v));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Same content as the JSON form, one header line plus one data line;
    /// the params map is embedded as a compact `k=v` list.
    pub fn to_csv(&self) -> String {
        let params: Vec<String> =
            self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "name,params,seconds,fingerprint,oracle_checked\n{},{},{},{},{}",
            self.name,
            params.join(";"),
            self.seconds,
            self.fingerprint,
            self.oracle_checked
        )
    }

    pub fn to_human(&self) -> String {
        let params: Vec<String> =
            self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{} [{}] {:.3}s fingerprint={} oracle_checked={}",
            self.name,
            params.join(" "),
            self.seconds,
            self.fingerprint,
            self.oracle_checked
        )
    }
}

#[derive(Debug)]
pub enum CliError {
    /// An internal cross-check disagreed; exit code 2.
    Oracle(String),
    /// Any other failure; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Oracle(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Oracle(m) => write!(f, "oracle mismatch: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<algebra_core::Error> for CliError {
    fn from(e: algebra_core::Error) -> Self {
        CliError::Failure(format!("{e:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_csv_carry_identical_content() {
        let mut r = BenchReport::new("fateman");
        r.param_u64("n", 10);
        r.seconds = 1.25;
        r.fingerprint = "abc123".into();
        r.oracle_checked = true;
        let j: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(j["name"], "fateman");
        assert_eq!(j["params"]["n"], 10);
        assert_eq!(j["fingerprint"], "abc123");
        assert_eq!(j["oracle_checked"], true);
        let csv = r.to_csv();
        let data = csv.lines().nth(1).unwrap();
        assert_eq!(data, "fateman,n=10,1.25,abc123,true");
    }

    #[test]
    fn exit_codes_distinguish_oracle_failures() {
        assert_eq!(CliError::Oracle("x".into()).exit_code(), 2);
        assert_eq!(CliError::Failure("x".into()).exit_code(), 1);
    }
}
