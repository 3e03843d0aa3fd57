//! Graph file format.
//!
//! ```json
//! {"vertices": 4,
//!  "edges": [{"u": 1, "v": 2, "len": {"param": "c1", "scale": 1.0}},
//!            {"u": 2, "v": 3, "len": 3.141592653589793}],
//!  "allow_loops": false}
//! ```
//!
//! Edges are written in stored order, so reading back a written graph gives
//! the identical graph (and hence the identical bond basis).

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Edge, LengthExpr, MetricGraph, Param};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    vertices: usize,
    edges: Vec<RawEdge>,
    #[serde(default)]
    allow_loops: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    u: usize,
    v: usize,
    len: Value,
}

fn field_error(location: String, message: impl Into<String>) -> Error {
    Error::Parse { location, message: message.into() }
}

fn parse_length(value: &Value, at: &str) -> Result<LengthExpr> {
    match value {
        Value::Number(n) => n
            .as_f64()
            .map(LengthExpr::Fixed)
            .ok_or_else(|| field_error(at.into(), "length is not representable as f64")),
        Value::Object(map) => {
            let param = map
                .get("param")
                .and_then(Value::as_str)
                .ok_or_else(|| field_error(format!("{at}.param"), "missing parameter name"))?;
            let param: Param = param
                .parse()
                .map_err(|_| field_error(format!("{at}.param"), format!("unknown parameter {param:?}")))?;
            let scale = match map.get("scale") {
                None => 1.0,
                Some(s) => s
                    .as_f64()
                    .ok_or_else(|| field_error(format!("{at}.scale"), "scale must be a number"))?,
            };
            if let Some(extra) = map.keys().find(|k| *k != "param" && *k != "scale") {
                return Err(field_error(format!("{at}.{extra}"), "unknown field"));
            }
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(field_error(format!("{at}.scale"), "scale must be positive"));
            }
            Ok(LengthExpr::Param { param, scale })
        }
        _ => Err(field_error(at.into(), "expected a number or {\"param\": ..., \"scale\": ...}")),
    }
}

/// Parses a graph file. Syntax errors report line and column; semantic
/// errors report the offending field path. The graph is not validated.
pub fn graph_from_json(text: &str) -> Result<MetricGraph> {
    let raw: RawGraph = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    graph_from_raw(raw)
}

fn graph_from_raw(raw: RawGraph) -> Result<MetricGraph> {
    let edges = raw
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| Ok(Edge::new(e.u, e.v, parse_length(&e.len, &format!("edges[{i}].len"))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricGraph::new(raw.vertices, edges).with_loops(raw.allow_loops))
}

pub fn graph_to_value(g: &MetricGraph) -> Value {
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| {
            let len = match e.length {
                LengthExpr::Fixed(l) => json!(l),
                LengthExpr::Param { param, scale } => json!({"param": param.name(), "scale": scale}),
            };
            json!({"u": e.u, "v": e.v, "len": len})
        })
        .collect();
    json!({"vertices": g.vertex_count(), "edges": edges, "allow_loops": g.allow_loops()})
}

pub fn graph_to_json(g: &MetricGraph) -> String {
    graph_to_value(g).to_string()
}

pub fn graph_to_json_pretty(g: &MetricGraph) -> String {
    serde_json::to_string_pretty(&graph_to_value(g)).expect("graph values always serialize")
}

impl Serialize for MetricGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        graph_to_value(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MetricGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGraph::deserialize(d)?;
        graph_from_raw(raw).map_err(serde::de::Error::custom)
    }
}
