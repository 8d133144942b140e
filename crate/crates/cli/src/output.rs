//! Report rendering. JSON is the stable interface; text is a flattened
//! `key: value` view of the same report.

use clap::ValueEnum;
use serde_json::Value;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// `PTA_COLOR=1` colours text keys; anything else leaves output plain.
pub fn color_enabled() -> bool {
    std::env::var("PTA_COLOR").is_ok_and(|v| v == "1")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn render(report: &Value, format: Format, color: bool) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", report, &mut lines);
            lines
                .into_iter()
                .map(|(k, v)| {
                    if color {
                        format!("\x1b[1m{k}\x1b[0m: {v}\n")
                    } else {
                        format!("{k}: {v}\n")
                    }
                })
                .collect()
        }
    }
}
