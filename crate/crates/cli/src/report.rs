//! Report assembly and rendering.
//!
//! The JSON rendering is the machine-readable contract: schema-versioned,
//! deterministic for a given spec and seed (keys are emitted in sorted
//! order and no wall-clock data is included). The text rendering is for
//! humans, carries the elapsed time, and promises no stability.

use serde_json::{Map, Value};
use std::time::Duration;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub verdict: String,
    pub seed: Option<u64>,
    /// Command-specific fields, merged into the top-level JSON object.
    pub body: Map<String, Value>,
    pub elapsed: Duration,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("schema".into(), Value::String(SCHEMA_VERSION.into()));
        map.insert("command".into(), Value::String(self.command.into()));
        map.insert("verdict".into(), Value::String(self.verdict.clone()));
        if let Some(seed) = self.seed {
            map.insert("seed".into(), serde_json::json!(seed));
        }
        for (k, v) in &self.body {
            map.insert(k.clone(), v.clone());
        }
        Value::Object(map)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("verdict: {}\n", self.verdict));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        for (key, value) in &self.body {
            out.push_str(&format!("{key}: {}\n", render_text_value(value)));
        }
        out.push_str(&format!("elapsed: {:?}\n", self.elapsed));
        out
    }
}

fn render_text_value(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(render_text_value).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Object(map) => {
            let parts: Vec<String> = map
                .iter()
                .map(|(k, v)| format!("{k}: {}", render_text_value(v)))
                .collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => other.to_string(),
    }
}
