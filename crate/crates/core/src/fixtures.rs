//! Named graphs used by the CLI, the experiments and the test suites.

use std::f64::consts::PI;

use crate::graph::{Edge, LengthExpr, MetricGraph, Param};

/// Single edge of length one.
pub fn interval() -> MetricGraph {
    MetricGraph::path(2)
}

/// Equilateral triangle of total length one.
pub fn triangle() -> MetricGraph {
    MetricGraph::cycle(3)
}

/// Triangle with a pendant edge. Edge order and orientation reproduce the
/// published 8x8 scattering matrices exactly: edges `c1, pi, c1, c2`, with
/// vertex 1 of degree 3 and vertex 0 the pendant end.
pub fn fig1() -> MetricGraph {
    MetricGraph::new(
        4,
        vec![
            Edge::new(1, 2, LengthExpr::param(Param::C1)),
            Edge::new(2, 3, PI),
            Edge::new(3, 1, LengthExpr::param(Param::C1)),
            Edge::new(1, 0, LengthExpr::param(Param::C2)),
        ],
    )
}

/// Star with three arms of length 1/3.
pub fn star3() -> MetricGraph {
    MetricGraph::star(3)
}

/// Look up a fixture by name.
pub fn by_name(name: &str) -> Option<MetricGraph> {
    let g = match name {
        "interval" => interval(),
        "triangle" => triangle(),
        "fig1" => fig1(),
        "star3" => star3(),
        "path3" => MetricGraph::path(3),
        "path6" => MetricGraph::path(6),
        "grid2x3" => MetricGraph::grid(2, 3),
        "k4" => MetricGraph::complete(4),
        _ => return None,
    };
    Some(g)
}
