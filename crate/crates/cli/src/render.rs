use std::fmt::Write;

use serde_json::Value;

use crate::{CommandOutcome, Status};

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn status_line(out: &CommandOutcome) -> &'static str {
    match out.status {
        Status::Ok => "ok",
        Status::Fail => "FAIL",
        Status::Error => "ERROR",
    }
}

fn table(payload: &Value, s: &mut String) {
    let pipeline_only = payload["pipeline_only"].as_bool().unwrap_or(false);
    let _ = writeln!(
        s,
        "{:<6}{:<12}{:<12}{:<12}match",
        "case", "expected", "closed", "pipeline"
    );
    for row in payload["cases"].as_array().into_iter().flatten() {
        let closed = if pipeline_only {
            "-".to_string()
        } else {
            scalar(&row["cs_closed"])
        };
        let _ = writeln!(
            s,
            "{:<6}{:<12}{:<12}{:<12}{}",
            scalar(&row["case"]),
            scalar(&row["expected"]),
            closed,
            scalar(&row["cs_pipeline"]),
            if row["match"].as_bool() == Some(true) { "yes" } else { "no" }
        );
    }
    let _ = writeln!(
        s,
        "{}/{} match",
        scalar(&payload["matched"]),
        scalar(&payload["total"])
    );
}

/// Plain-text rendering: the table for `verify-table`, `key: value` lines
/// for everything else.
pub fn render_human(command: &str, out: &CommandOutcome) -> String {
    let mut s = String::new();
    if command == "verify-table" && out.payload.is_object() {
        table(&out.payload, &mut s);
    } else if let Value::Object(map) = &out.payload {
        for (k, v) in map {
            let _ = writeln!(s, "{k}: {}", scalar(v));
        }
    }
    let _ = writeln!(s, "status: {}", status_line(out));
    for d in &out.diagnostics {
        let _ = writeln!(s, "  {d}");
    }
    s
}
