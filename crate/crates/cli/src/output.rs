//! Output assembly: config echo, JSON/CSV writers, grid parsing.

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use std::io::Write;

/// Every run emits its effective configuration so the result is reproducible
/// from the artifact alone.
pub fn config_echo(command: &str, fields: Value) -> Value {
    let mut config = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut config, fields) {
        for (k, v) in src {
            dst.insert(k, v);
        }
    }
    config
}

/// JSON numbers lose non-finite values; tag them as strings where the
/// sentinel is meaningful.
pub fn finite_or_marker(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn write_output(out: &Option<String>, payload: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, payload).with_context(|| format!("writing {path}"))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(payload.as_bytes())?;
            if !payload.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

pub fn write_json(out: &Option<String>, doc: &Value) -> Result<()> {
    let payload = serde_json::to_string_pretty(doc)?;
    write_output(out, &payload)
}

/// Parse "start:stop:count" (log-spaced when start > 0, else linear) or a
/// comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("grid spec must be start:stop:count, got `{text}`");
        }
        let start: f64 = parts[0].parse().context("grid start")?;
        let stop: f64 = parts[1].parse().context("grid stop")?;
        let count: usize = parts[2].parse().context("grid count")?;
        if count < 2 || !(stop > start) {
            bail!("grid spec needs stop > start and count >= 2");
        }
        let pts = if start > 0.0 {
            let (lo, hi) = (start.ln(), stop.ln());
            (0..count)
                .map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp())
                .collect()
        } else {
            (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect()
        };
        Ok(pts)
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("grid entry `{s}`")))
            .collect()
    }
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("list entry `{s}`")))
        .collect()
}
