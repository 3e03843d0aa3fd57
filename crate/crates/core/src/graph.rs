//! Compact metric multigraphs.
//!
//! A [`MetricGraph`] is a list of vertices `0..M` and a list of edges, each
//! carrying a positive length or a reference to one of the four symbolic
//! length slots `c1..c4`. Edge order is significant: it fixes the directed
//! bond basis used by every scattering matrix (see [`BondBasis`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sum of normalized lengths must equal one within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// One of the four symbolic length slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    C1,
    C2,
    C3,
    C4,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::C1, Param::C2, Param::C3, Param::C4];

    pub fn name(self) -> &'static str {
        match self {
            Param::C1 => "c1",
            Param::C2 => "c2",
            Param::C3 => "c3",
            Param::C4 => "c4",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c1" => Ok(Param::C1),
            "c2" => Ok(Param::C2),
            "c3" => Ok(Param::C3),
            "c4" => Ok(Param::C4),
            other => Err(Error::Parse {
                location: "param".into(),
                message: format!("unknown parameter {other:?}, expected c1..c4"),
            }),
        }
    }
}

/// Edge length: a concrete real or a scaled symbolic parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthExpr {
    Fixed(f64),
    Param { param: Param, scale: f64 },
}

impl LengthExpr {
    pub fn param(param: Param) -> Self {
        LengthExpr::Param { param, scale: 1.0 }
    }

    pub fn concrete(&self) -> Option<f64> {
        match *self {
            LengthExpr::Fixed(l) => Some(l),
            LengthExpr::Param { .. } => None,
        }
    }

    pub fn evaluate(&self, binding: &ParameterBinding) -> Result<f64> {
        match *self {
            LengthExpr::Fixed(l) => Ok(l),
            LengthExpr::Param { param, scale } => binding
                .get(param)
                .map(|v| v * scale)
                .ok_or_else(|| Error::UnboundParameter(param.name().to_string())),
        }
    }
}

impl From<f64> for LengthExpr {
    fn from(l: f64) -> Self {
        LengthExpr::Fixed(l)
    }
}

/// Concrete values for the symbolic length slots.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParameterBinding(BTreeMap<Param, f64>);

impl ParameterBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, param: Param, value: f64) -> Self {
        self.0.insert(param, value);
        self
    }

    pub fn set(&mut self, param: Param, value: f64) {
        self.0.insert(param, value);
    }

    pub fn get(&self, param: Param) -> Option<f64> {
        self.0.get(&param).copied()
    }

    /// Parses `c1=3.14,c2=0` (also accepts `;` or whitespace separators).
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = Self::new();
        for item in s.split([',', ';', ' ']).filter(|t| !t.trim().is_empty()) {
            let (name, value) = item.split_once('=').ok_or_else(|| Error::Parse {
                location: "binding".into(),
                message: format!("expected name=value, got {item:?}"),
            })?;
            let param: Param = name.trim().parse()?;
            let value: f64 = value.trim().parse().map_err(|_| Error::Parse {
                location: format!("binding.{param}"),
                message: format!("not a number: {value:?}"),
            })?;
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Parse {
                    location: format!("binding.{param}"),
                    message: "parameter values must be finite and nonnegative".into(),
                });
            }
            out.set(param, value);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: LengthExpr,
}

impl Edge {
    pub fn new(u: usize, v: usize, length: impl Into<LengthExpr>) -> Self {
        Edge { u, v, length: length.into() }
    }
}

/// A reason a graph is not run-ready.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoEdges,
    EndpointOutOfRange { edge: usize, vertex: usize },
    NonPositiveLength { edge: usize, length: f64 },
    InvalidScale { edge: usize, scale: f64 },
    SelfLoop { edge: usize },
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEdges => write!(f, "graph has no edges"),
            Violation::EndpointOutOfRange { edge, vertex } => {
                write!(f, "edge {edge} references missing vertex {vertex}")
            }
            Violation::NonPositiveLength { edge, length } => {
                write!(f, "edge {edge} has non-positive length {length}")
            }
            Violation::InvalidScale { edge, scale } => {
                write!(f, "edge {edge} has non-positive parameter scale {scale}")
            }
            Violation::SelfLoop { edge } => write!(f, "edge {edge} is a self-loop"),
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
        }
    }
}

/// Compact metric multigraph.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    allow_loops: bool,
}

impl MetricGraph {
    /// Builds a graph without validating it; see [`MetricGraph::validate`].
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Self {
        MetricGraph { vertex_count, edges, allow_loops: false }
    }

    pub fn with_loops(mut self, allow: bool) -> Self {
        self.allow_loops = allow;
        self
    }

    /// Graph with concrete lengths given as `(u, v, length)` triples.
    pub fn from_lengths(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Self {
        let edges = edges.iter().map(|&(u, v, l)| Edge::new(u, v, l)).collect();
        Self::new(vertex_count, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn allow_loops(&self) -> bool {
        self.allow_loops
    }

    pub fn is_concrete(&self) -> bool {
        self.edges.iter().all(|e| e.length.concrete().is_some())
    }

    pub fn parameters(&self) -> Vec<Param> {
        let mut ps: Vec<Param> = self
            .edges
            .iter()
            .filter_map(|e| match e.length {
                LengthExpr::Param { param, .. } => Some(param),
                LengthExpr::Fixed(_) => None,
            })
            .collect();
        ps.sort();
        ps.dedup();
        ps
    }

    /// Concrete edge lengths in edge order.
    pub fn lengths(&self) -> Result<Vec<f64>> {
        self.edges
            .iter()
            .map(|e| {
                e.length.concrete().ok_or_else(|| match e.length {
                    LengthExpr::Param { param, .. } => Error::UnboundParameter(param.to_string()),
                    LengthExpr::Fixed(_) => unreachable!(),
                })
            })
            .collect()
    }

    pub fn length(&self, edge: usize) -> Option<f64> {
        self.edges.get(edge).and_then(|e| e.length.concrete())
    }

    pub fn total_length(&self) -> Result<f64> {
        Ok(self.lengths()?.iter().sum())
    }

    /// Number of edge ends at `vertex`; loops count twice.
    pub fn degree(&self, vertex: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.u == vertex) + usize::from(e.v == vertex))
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for e in &self.edges {
            if e.u < self.vertex_count {
                d[e.u] += 1;
            }
            if e.v < self.vertex_count {
                d[e.v] += 1;
            }
        }
        d
    }

    pub fn bonds(&self) -> BondBasis {
        BondBasis::new(self)
    }

    /// Number of connected components, ignoring edges with invalid endpoints.
    pub fn component_count(&self) -> usize {
        let mut dsu = DisjointSets::new(self.vertex_count);
        for e in &self.edges {
            if e.u < self.vertex_count && e.v < self.vertex_count {
                dsu.union(e.u, e.v);
            }
        }
        dsu.count()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.vertex_count
    }

    /// Reports every violation; an empty list means the graph is run-ready.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.edges.is_empty() {
            out.push(Violation::NoEdges);
        }
        for (i, e) in self.edges.iter().enumerate() {
            for vertex in [e.u, e.v] {
                if vertex >= self.vertex_count {
                    out.push(Violation::EndpointOutOfRange { edge: i, vertex });
                }
            }
            match e.length {
                LengthExpr::Fixed(l) if !(l > 0.0 && l.is_finite()) => {
                    out.push(Violation::NonPositiveLength { edge: i, length: l });
                }
                LengthExpr::Param { scale, .. } if !(scale > 0.0 && scale.is_finite()) => {
                    out.push(Violation::InvalidScale { edge: i, scale });
                }
                _ => {}
            }
            if e.u == e.v && !self.allow_loops {
                out.push(Violation::SelfLoop { edge: i });
            }
        }
        let components = self.component_count();
        if components > 1 {
            out.push(Violation::Disconnected { components });
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(v))
        }
    }

    /// Substitutes parameter values. Zero-valued lengths are kept as-is; see
    /// [`MetricGraph::contract_zero_edges`].
    pub fn bind(&self, binding: &ParameterBinding) -> Result<MetricGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| Ok(Edge::new(e.u, e.v, e.length.evaluate(binding)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MetricGraph { edges, ..self.clone() })
    }

    /// Merges the endpoints of every zero-length edge and drops the edge.
    /// Surviving vertices are relabelled densely in their original order.
    pub fn contract_zero_edges(&self) -> MetricGraph {
        let mut dsu = DisjointSets::new(self.vertex_count);
        for e in &self.edges {
            if e.length.concrete() == Some(0.0) {
                dsu.union(e.u, e.v);
            }
        }
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            let r = dsu.find(v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.length.concrete() != Some(0.0))
            .map(|e| Edge { u: label[dsu.find(e.u)], v: label[dsu.find(e.v)], ..*e })
            .collect();
        MetricGraph { vertex_count: next, edges, allow_loops: self.allow_loops }
    }

    /// Binds parameters and rescales so the total length is one.
    ///
    /// A graph whose total is already within [`NORMALIZATION_TOL`] of one is
    /// returned unchanged, which makes normalization idempotent.
    pub fn normalize(&self, binding: &ParameterBinding) -> Result<MetricGraph> {
        let bound = self.bind(binding)?;
        let lengths = bound.lengths()?;
        if let Some((edge, &length)) =
            lengths.iter().enumerate().find(|(_, l)| !(**l > 0.0 && l.is_finite()))
        {
            return Err(Error::InvalidGraph(vec![Violation::NonPositiveLength { edge, length }]));
        }
        let total: f64 = lengths.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidGraph(vec![Violation::NoEdges]));
        }
        if (total - 1.0).abs() <= NORMALIZATION_TOL {
            return Ok(bound);
        }
        Ok(bound.scaled(1.0 / total))
    }

    /// Normalizes a graph that has no symbolic lengths.
    pub fn normalized(&self) -> Result<MetricGraph> {
        self.normalize(&ParameterBinding::new())
    }

    /// Multiplies every concrete length by `factor`.
    pub fn scaled(&self, factor: f64) -> MetricGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| match e.length {
                LengthExpr::Fixed(l) => Edge::new(e.u, e.v, l * factor),
                LengthExpr::Param { .. } => *e,
            })
            .collect();
        MetricGraph { edges, ..self.clone() }
    }

    /// Orients every edge as `u <= v` and sorts edges by `(u, v, length)`.
    pub fn canonical(&self) -> MetricGraph {
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge { u: e.u.min(e.v), v: e.u.max(e.v), length: e.length })
            .collect();
        edges.sort_by(|a, b| {
            (a.u, a.v)
                .cmp(&(b.u, b.v))
                .then_with(|| length_sort_key(&a.length).total_cmp(&length_sort_key(&b.length)))
        });
        MetricGraph { edges, ..self.clone() }
    }

    /// Appends an edge; `v == vertex_count` creates a new pendant vertex.
    pub fn with_edge(&self, u: usize, v: usize, length: f64) -> MetricGraph {
        let mut g = self.clone();
        g.vertex_count = g.vertex_count.max(u + 1).max(v + 1);
        g.edges.push(Edge::new(u, v, length));
        g
    }

    /// Removes an edge and any vertex left isolated, relabelling densely.
    pub fn without_edge(&self, edge: usize) -> MetricGraph {
        let mut edges = self.edges.clone();
        edges.remove(edge);
        let mut used = vec![false; self.vertex_count];
        for e in &edges {
            used[e.u] = true;
            used[e.v] = true;
        }
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            if used[v] {
                label[v] = next;
                next += 1;
            }
        }
        let edges = edges.into_iter().map(|e| Edge { u: label[e.u], v: label[e.v], ..e }).collect();
        MetricGraph { vertex_count: next, edges, allow_loops: self.allow_loops }
    }

    /// Number of edges joining `a` and `b` (either orientation).
    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| (e.u == a && e.v == b) || (e.u == b && e.v == a))
            .count()
    }

    pub fn is_equilateral(&self, tol: f64) -> bool {
        match self.lengths() {
            Ok(ls) if !ls.is_empty() => {
                let first = ls[0];
                ls.iter().all(|l| (l - first).abs() <= tol * first)
            }
            _ => false,
        }
    }

    /// True if the graph is a simple complete graph on its vertex set.
    pub fn is_complete(&self) -> bool {
        let m = self.vertex_count;
        if m < 2 || self.edges.len() != m * (m - 1) / 2 {
            return false;
        }
        (0..m).all(|a| (a + 1..m).all(|b| self.multiplicity(a, b) == 1))
    }

    /// True if the graph is a simple path.
    pub fn is_path(&self) -> bool {
        if !self.is_tree() {
            return false;
        }
        self.degrees().iter().all(|&d| d <= 2)
    }

    // Standard families, all with total length one.

    pub fn path(vertices: usize) -> MetricGraph {
        assert!(vertices >= 2);
        let n = vertices - 1;
        let edges: Vec<_> = (0..n).map(|i| (i, i + 1, 1.0 / n as f64)).collect();
        Self::from_lengths(vertices, &edges)
    }

    pub fn cycle(vertices: usize) -> MetricGraph {
        assert!(vertices >= 3);
        let l = 1.0 / vertices as f64;
        let edges: Vec<_> = (0..vertices).map(|i| (i, (i + 1) % vertices, l)).collect();
        Self::from_lengths(vertices, &edges)
    }

    pub fn star(arms: usize) -> MetricGraph {
        assert!(arms >= 1);
        let l = 1.0 / arms as f64;
        let edges: Vec<_> = (1..=arms).map(|i| (0, i, l)).collect();
        Self::from_lengths(arms + 1, &edges)
    }

    pub fn complete(vertices: usize) -> MetricGraph {
        assert!(vertices >= 2);
        let n = vertices * (vertices - 1) / 2;
        let l = 1.0 / n as f64;
        let mut edges = Vec::with_capacity(n);
        for a in 0..vertices {
            for b in a + 1..vertices {
                edges.push((a, b, l));
            }
        }
        Self::from_lengths(vertices, &edges)
    }

    /// `rows x cols` grid graph.
    pub fn grid(rows: usize, cols: usize) -> MetricGraph {
        assert!(rows * cols >= 2);
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        let l = 1.0 / edges.len() as f64;
        let edges: Vec<_> = edges.into_iter().map(|(a, b)| (a, b, l)).collect();
        Self::from_lengths(rows * cols, &edges)
    }

    /// Two complete graphs `K_m` joined by a single bridge; all edges equal.
    pub fn dumbbell(m: usize) -> MetricGraph {
        assert!(m >= 2);
        let mut edges = Vec::new();
        for offset in [0, m] {
            for a in 0..m {
                for b in a + 1..m {
                    edges.push((offset + a, offset + b));
                }
            }
        }
        edges.push((m - 1, m));
        let l = 1.0 / edges.len() as f64;
        let edges: Vec<_> = edges.into_iter().map(|(a, b)| (a, b, l)).collect();
        Self::from_lengths(2 * m, &edges)
    }
}

fn length_sort_key(l: &LengthExpr) -> f64 {
    match *l {
        LengthExpr::Fixed(x) => x,
        // Symbolic lengths sort after all concrete ones, by slot then scale.
        LengthExpr::Param { param, scale } => f64::MAX / 8.0 * (1.0 + param as u8 as f64) + scale,
    }
}

/// Directed bond basis.
///
/// Edge `n` contributes bond `2n` (from `u` to `v`) and bond `2n + 1`
/// (from `v` to `u`). A bond is identified with the edge end it leaves
/// from, so the vertex scattering matrix couples bonds that share their
/// origin vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondBasis {
    bonds: Vec<Bond>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

impl BondBasis {
    pub fn new(g: &MetricGraph) -> Self {
        let m = g.vertex_count();
        let mut bonds = Vec::with_capacity(2 * g.edge_count());
        let mut outgoing = vec![Vec::new(); m];
        let mut incoming = vec![Vec::new(); m];
        for (n, e) in g.edges().iter().enumerate() {
            for (from, to) in [(e.u, e.v), (e.v, e.u)] {
                let b = bonds.len();
                bonds.push(Bond { edge: n, from, to });
                outgoing[from].push(b);
                incoming[to].push(b);
            }
        }
        BondBasis { bonds, outgoing, incoming }
    }

    pub fn len(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty()
    }

    pub fn bond(&self, b: usize) -> Bond {
        self.bonds[b]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn reverse(&self, b: usize) -> usize {
        b ^ 1
    }

    /// Bonds leaving `vertex`, in increasing index order.
    pub fn outgoing(&self, vertex: usize) -> &[usize] {
        &self.outgoing[vertex]
    }

    /// Bonds arriving at `vertex`, in increasing index order.
    pub fn incoming(&self, vertex: usize) -> &[usize] {
        &self.incoming[vertex]
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    sets: usize,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), sets: n }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.sets -= 1;
        }
    }

    fn count(&self) -> usize {
        self.sets
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;
    use std::f64::consts::PI;

    #[test]
    fn validate_minimal_graph() {
        assert!(MetricGraph::from_lengths(2, &[(0, 1, 1.0)]).validate().is_empty());
    }

    #[test]
    fn validate_negative_length() {
        let v = MetricGraph::from_lengths(2, &[(0, 1, -1.0)]).validate();
        assert_eq!(v, vec![Violation::NonPositiveLength { edge: 0, length: -1.0 }]);
    }

    #[test]
    fn validate_disconnected() {
        let v = MetricGraph::from_lengths(4, &[(0, 1, 1.0), (2, 3, 1.0)]).validate();
        assert_eq!(v, vec![Violation::Disconnected { components: 2 }]);
    }

    #[test]
    fn validate_bad_endpoint_and_loop() {
        let g = MetricGraph::from_lengths(2, &[(0, 1, 1.0), (1, 5, 1.0), (0, 0, 1.0)]);
        let v = g.validate();
        assert!(v.contains(&Violation::EndpointOutOfRange { edge: 1, vertex: 5 }));
        assert!(v.contains(&Violation::SelfLoop { edge: 2 }));
        assert!(!g.clone().with_loops(true).validate().contains(&Violation::SelfLoop { edge: 2 }));
    }

    #[test]
    fn normalize_triangle_of_pi() {
        let g = MetricGraph::from_lengths(3, &[(0, 1, PI), (1, 2, PI), (2, 0, PI)]);
        let n = g.normalized().unwrap();
        for l in n.lengths().unwrap() {
            assert!((l - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_fig1_with_binding() {
        let b = ParameterBinding::new().with(Param::C1, PI).with(Param::C2, PI);
        let n = fig1().normalize(&b).unwrap();
        assert_eq!(n.lengths().unwrap(), vec![0.25; 4]);
    }

    #[test]
    fn normalize_single_edge() {
        let n = MetricGraph::from_lengths(2, &[(0, 1, 7.0)]).normalized().unwrap();
        assert_eq!(n.lengths().unwrap(), vec![1.0]);
    }

    #[test]
    fn normalize_requires_binding() {
        let b = ParameterBinding::new().with(Param::C1, PI);
        assert_eq!(fig1().normalize(&b), Err(Error::UnboundParameter("c2".into())));
    }

    #[test]
    fn degrees() {
        assert_eq!(MetricGraph::path(3).degree(1), 2);
        assert_eq!(fig1().degree(1), 3);
        let g = fig1();
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
        let loopy = MetricGraph::from_lengths(1, &[(0, 0, 1.0)]).with_loops(true);
        assert_eq!(loopy.degree(0), 2);
    }

    #[test]
    fn bond_basis_reversal() {
        let g = MetricGraph::path(3);
        let bb = g.bonds();
        assert_eq!(bb.len(), 4);
        for b in 0..bb.len() {
            assert_eq!(bb.reverse(bb.reverse(b)), b);
            let (x, y) = (bb.bond(b), bb.bond(bb.reverse(b)));
            assert_eq!((x.from, x.to, x.edge), (y.to, y.from, y.edge));
        }
        for v in 0..3 {
            assert_eq!(bb.incoming(v).len(), g.degree(v));
            assert_eq!(bb.outgoing(v).len(), g.degree(v));
        }
    }

    #[test]
    fn contract_zero_edge_gives_triangle() {
        let b = ParameterBinding::new().with(Param::C1, PI).with(Param::C2, 0.0);
        let g = fig1().bind(&b).unwrap().contract_zero_edges();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.validate().is_empty());
        assert!(g.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn without_edge_drops_isolated_vertex() {
        let g = MetricGraph::path(4).without_edge(2);
        assert_eq!(g.vertex_count(), 3);
        assert!(g.is_path());
        let t = MetricGraph::cycle(3).without_edge(0);
        assert_eq!(t.vertex_count(), 3);
        assert!(t.is_path());
    }

    #[test]
    fn families() {
        assert!(MetricGraph::complete(4).is_complete());
        assert!(!MetricGraph::cycle(4).is_complete());
        assert!(MetricGraph::cycle(3).is_complete());
        let grid = MetricGraph::grid(2, 3);
        assert_eq!((grid.vertex_count(), grid.edge_count()), (6, 7));
        let d = MetricGraph::dumbbell(3);
        assert_eq!((d.vertex_count(), d.edge_count()), (6, 7));
        assert!(d.is_connected());
        for g in [grid, d, MetricGraph::star(5), MetricGraph::path(6)] {
            assert!((g.total_length().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn binding_parse() {
        let b = ParameterBinding::parse("c1=3.5, c2=0").unwrap();
        assert_eq!(b.get(Param::C1), Some(3.5));
        assert_eq!(b.get(Param::C2), Some(0.0));
        assert!(ParameterBinding::parse("c9=1").is_err());
        assert!(ParameterBinding::parse("c1").is_err());
    }

    #[test]
    fn canonical_sorts_and_orients() {
        let g = MetricGraph::from_lengths(3, &[(2, 1, 0.5), (1, 0, 0.25), (0, 1, 0.25)]);
        let c = g.canonical();
        let pairs: Vec<_> = c.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 1), (1, 2)]);
        assert_eq!(c.canonical(), c);
    }
}
