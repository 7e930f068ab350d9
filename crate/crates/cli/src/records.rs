//! Self-describing JSONL records.

use serde::Serialize;
use serde_json::{Map, Value};

pub fn tool_version() -> String {
    format!("knotweave {}", env!("CARGO_PKG_VERSION"))
}

/// `{kind, tool, config, ...body}`.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    kind: String,
    tool: String,
    config: Value,
    #[serde(flatten)]
    body: Map<String, Value>,
}

impl Envelope {
    pub fn new(kind: &str, config: &Value, body: Value) -> Self {
        let body = match body {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        Self { kind: kind.into(), tool: tool_version(), config: config.clone(), body }
    }
}

/// Copies the keys of `extra` into `base` (both objects).
pub fn merge(base: &mut Value, extra: Value) {
    if let (Value::Object(b), Value::Object(e)) = (base, extra) {
        b.extend(e);
    }
}
