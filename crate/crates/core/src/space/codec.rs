//! Text format for spaces.
//!
//! A space is a JSON object `{"labels": [...], "d": [[...], ...]}` whose
//! distances are strings holding canonical rationals (`"p"` or `"p/q"`).
//! [`encode`] produces one canonical byte sequence per space.

use serde::Deserialize;

use super::{default_labels, MetricSpace, Rat, SpaceError};

#[derive(Deserialize)]
struct Document {
    labels: Option<Vec<String>>,
    d: Vec<Vec<Rat>>,
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn encode(space: &MetricSpace) -> String {
    let labels: Vec<String> = space.labels().iter().map(|l| json_string(l)).collect();
    let rows: Vec<String> = space
        .rows()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|r| format!("\"{r}\"")).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!(
        "{{\"labels\": [{}], \"d\": [{}]}}\n",
        labels.join(","),
        rows.join(",")
    )
}

pub fn decode(text: &str) -> Result<MetricSpace, SpaceError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| SpaceError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    from_value_doc(doc)
}

/// Decodes from an already-parsed JSON value (request bodies).
pub fn decode_value(value: serde_json::Value) -> Result<MetricSpace, SpaceError> {
    let doc: Document = serde_json::from_value(value).map_err(|e| SpaceError::Parse {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    from_value_doc(doc)
}

fn from_value_doc(doc: Document) -> Result<MetricSpace, SpaceError> {
    let labels = doc.labels.unwrap_or_else(|| default_labels(doc.d.len()));
    MetricSpace::new(doc.d, labels)
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(pos) => message[..pos].to_string(),
        None => message.to_string(),
    }
}
