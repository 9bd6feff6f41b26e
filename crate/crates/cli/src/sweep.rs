//! Parameter sweeps over a worker pool; output order follows input order.

use anyhow::{bail, Context, Result};
use serde_json::Value;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub values: Vec<f64>,
}

/// Parse "name=v1,v2,...". Supported names: lambda, nu, u0, k.
pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    let Some((name, list)) = text.split_once('=') else {
        bail!("sweep spec must be name=v1,v2,..., got `{text}`");
    };
    let name = name.trim().to_string();
    if !["lambda", "nu", "u0", "k"].contains(&name.as_str()) {
        bail!("unsupported sweep parameter `{name}` (use lambda, nu, u0 or k)");
    }
    let values: Vec<f64> = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("sweep value `{s}`"))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    Ok(SweepSpec { name, values })
}

/// Substitute a {name} placeholder in an expression template.
pub fn substitute(template: &str, name: &str, value: f64) -> String {
    template.replace(&format!("{{{name}}}"), &format!("{value}"))
}

/// Run `worker` over the indices 0..count on `jobs` threads; results are
/// collected in input order. Each worker result is a (document, exit code).
pub fn run_jobs<F>(count: usize, jobs: usize, worker: F) -> Vec<(Value, u8)>
where
    F: Fn(usize) -> (Value, u8) + Sync,
{
    let jobs = if jobs == 0 {
        std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
    } else {
        jobs
    }
    .min(count.max(1));

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<(Value, u8)>>> = Mutex::new(vec![None; count]);

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let res = worker(i);
                results.lock().unwrap()[i] = Some(res);
            });
        }
    });

    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("worker filled every slot"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_sweeps() {
        let s = parse_sweep("lambda=1.5,2,3").unwrap();
        assert_eq!(s.name, "lambda");
        assert_eq!(s.values, vec![1.5, 2.0, 3.0]);
        assert!(parse_sweep("bogus=1").is_err());
    }

    #[test]
    fn substitution() {
        assert_eq!(substitute("zeta^{lambda}", "lambda", 2.5), "zeta^2.5");
    }

    #[test]
    fn jobs_preserve_input_order() {
        let out = run_jobs(16, 4, |i| (json!(i), 0));
        for (i, (v, _)) in out.iter().enumerate() {
            assert_eq!(v, &json!(i));
        }
    }
}
