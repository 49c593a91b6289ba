//! Machine-readable reports: command echo, byte-exact input echo with a
//! hash, exact results as `"p/q"` strings, floats at 12 significant digits.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub argv: Vec<String>,
    pub seed: u64,
    inputs: Map<String, Value>,
    results: Map<String, Value>,
    certificates: Map<String, Value>,
    pub flags: Vec<String>,
    pub warnings: Vec<String>,
}

/// 12 significant digits for every float that enters a report.
pub fn float_str(x: f64) -> String {
    format!("{x:.11e}")
}

impl Report {
    pub fn new(command: &str, argv: &[String], seed: u64) -> Report {
        Report {
            command: command.to_string(),
            argv: argv.to_vec(),
            seed,
            inputs: Map::new(),
            results: Map::new(),
            certificates: Map::new(),
            flags: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Echo one raw input byte-for-byte.
    pub fn add_input(&mut self, name: &str, path: Option<&str>, raw: &str) {
        self.inputs.insert(
            name.to_string(),
            json!({
                "path": path,
                "raw": raw,
            }),
        );
    }

    pub fn add_result(&mut self, name: &str, value: Value) {
        self.results.insert(name.to_string(), value);
    }

    pub fn add_certificate(&mut self, name: &str, value: Value) {
        self.certificates.insert(name.to_string(), value);
    }

    pub fn to_json(&self) -> Value {
        let mut hasher = Sha256::new();
        for (name, v) in &self.inputs {
            hasher.update(name.as_bytes());
            if let Some(raw) = v["raw"].as_str() {
                hasher.update(raw.as_bytes());
            }
        }
        let hash: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        json!({
            "command": self.command,
            "argv": self.argv,
            "seed": self.seed,
            "inputs": Value::Object(self.inputs.clone()),
            "inputs_sha256": hash,
            "results": Value::Object(self.results.clone()),
            "certificates": Value::Object(self.certificates.clone()),
            "flags": self.flags,
            "warnings": self.warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips_and_echoes_inputs() {
        let raw = "{\"dim\": 3,\n  \"x\": [1, 2]}";
        let mut r = Report::new("laws", &["laws".into(), "--k".into(), "2".into()], 7);
        r.add_input("algebra", Some("g.json"), raw);
        r.add_result("value", Value::String("4/9".into()));
        let j = r.to_json();
        let parsed: Value = serde_json::from_str(&j.to_string()).unwrap();
        assert_eq!(parsed["inputs"]["algebra"]["raw"].as_str().unwrap(), raw);
        assert_eq!(parsed["results"]["value"], Value::String("4/9".into()));
        assert_eq!(parsed["inputs_sha256"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn float_formatting_has_twelve_significant_digits() {
        assert_eq!(float_str(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(float_str(1234.5), "1.23450000000e3");
    }
}
