#![allow(dead_code)]

use std::f64::consts::PI;

use qgraph::fixtures;
use qgraph::spectrum::Root;
use qgraph::{MetricGraph, Param, ParameterBinding};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fig. 1 graph with c1 = c2 = pi, normalized to four edges of 1/4.
pub fn fig1_quarters() -> MetricGraph {
    let b = ParameterBinding::new().with(Param::C1, PI).with(Param::C2, PI);
    fixtures::fig1().normalize(&b).unwrap()
}

/// Every named fixture with concrete, normalized, rationally dependent lengths.
pub fn rational_fixtures() -> Vec<(&'static str, MetricGraph)> {
    ["interval", "triangle", "star3", "path3", "path6", "grid2x3", "k4"]
        .into_iter()
        .map(|n| (n, fixtures::by_name(n).unwrap().normalized().unwrap()))
        .chain([("fig1", fig1_quarters())])
        .collect()
}

/// Connected multigraph with at most `max_v` vertices and `max_e` edges,
/// integer lengths 1..=4 before normalization.
pub fn random_graph(seed: u64, max_v: usize, max_e: usize) -> MetricGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.gen_range(2..=max_v);
    let e = rng.gen_range(v - 1..=max_e.max(v - 1));
    let mut edges = Vec::new();
    for w in 1..v {
        edges.push((rng.gen_range(0..w), w, rng.gen_range(1..=4) as f64));
    }
    while edges.len() < e {
        let a = rng.gen_range(0..v);
        let b = rng.gen_range(0..v);
        if a != b {
            edges.push((a, b, rng.gen_range(1..=4) as f64));
        }
    }
    MetricGraph::from_lengths(v, &edges).normalized().unwrap()
}

/// Maximum position error between two root lists of equal length with equal
/// multiplicities, or `None` if they differ structurally.
pub fn compare_roots(a: &[Root], b: &[Root]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.multiplicity != y.multiplicity {
            return None;
        }
        worst = worst.max((x.k - y.k).abs());
    }
    Some(worst)
}

pub fn within(roots: &[Root], lo: f64, hi: f64) -> Vec<Root> {
    roots.iter().copied().filter(|r| r.k > lo && r.k <= hi).collect()
}
