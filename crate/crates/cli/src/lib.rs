//! Command implementations and the HTTP service behind the `qgraph` binary.

pub mod commands;
pub mod server;

use std::f64::consts::PI;

use qgraph::{MetricGraph, ParameterBinding, Result};

/// Parses a k value: `2.5`, `pi`, `4pi`, `0.5*pi` or the same with `π`.
pub fn parse_k(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let (number, factor) = if let Some(head) = t.strip_suffix("pi").or_else(|| t.strip_suffix('π')) {
        (head.trim_end_matches('*').trim(), PI)
    } else {
        (t, 1.0)
    };
    let value = if number.is_empty() { 1.0 } else { number.parse::<f64>().map_err(|_| format!("bad k value {s:?}"))? };
    let k = value * factor;
    if k.is_finite() {
        Ok(k)
    } else {
        Err(format!("bad k value {s:?}"))
    }
}

/// Parses `k0:k1:n`: `n` uniform intervals, `n + 1` samples.
pub fn parse_k_range(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected k0:k1:n, got {s:?}"));
    };
    let (k0, k1) = (parse_k(a)?, parse_k(b)?);
    let n: usize = n.trim().parse().map_err(|_| format!("bad sample count {n:?}"))?;
    if !(k1 > k0) || n < 1 {
        return Err("need k0 < k1 and at least one interval".into());
    }
    Ok((k0, k1, n))
}

/// Binds parameters, optionally contracts zero-length edges, normalizes and
/// validates.
pub fn prepare_graph(g: &MetricGraph, binding: &ParameterBinding, contract_zero: bool) -> Result<MetricGraph> {
    let mut bound = g.bind(binding)?;
    if contract_zero {
        bound = bound.contract_zero_edges();
    }
    let g = bound.normalized()?;
    g.ensure_valid()?;
    Ok(g)
}

/// Sizes the global worker pool from `QG_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("QG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
