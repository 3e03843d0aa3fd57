//! Spectrum-driven evolution.
//!
//! Each step enumerates every child reachable from the parent by one move,
//! rescales each child to total length one, scores its spectrum against the
//! active goal and keeps the best child. Selection is a sequential reduction
//! over the candidates in generation order, so the outcome does not depend
//! on how scoring was scheduled.

mod cycle;
pub mod experiments;
mod run;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goals::{score, Goal, Score};
use crate::graph::MetricGraph;
use crate::spectrum::{spectrum_for_count, ModeChoice, RootSearchOptions, Spectrum};

pub use cycle::{are_isomorphic, detect_cycle, detect_cycle_within, Cycle};
pub use run::{run, EvolutionStep, RootsConfig, RunConfig, RunLog, Runner, RunStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    /// New vertex joined to an existing one.
    Pendant,
    /// New edge between two existing vertices.
    Between,
    /// Remove an edge, keeping the graph connected.
    Delete,
}

/// Length of an added edge, before the child is rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthRule {
    /// `1 / N` with `N` the parent's edge count.
    #[default]
    ParentEdges,
    /// `1 / (N + 1)`.
    ChildEdges,
    Fixed(f64),
}

/// Which half of an alternating run comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    #[default]
    Add,
    Delete,
}

fn default_moves() -> Vec<Move> {
    vec![Move::Pendant, Move::Between]
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovePolicy {
    #[serde(default = "default_moves")]
    pub moves: Vec<Move>,
    #[serde(default)]
    pub trees_only: bool,
    /// Alternate between an add step and a delete step.
    #[serde(default)]
    pub alternate: bool,
    #[serde(default)]
    pub alternate_first: StepKind,
    #[serde(default)]
    pub allow_loops: bool,
    #[serde(default = "yes")]
    pub allow_parallel: bool,
    #[serde(default)]
    pub length_rule: LengthRule,
    /// Seeded subsampling cap on candidates per step; off when `None`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_candidates: Option<usize>,
}

impl Default for MovePolicy {
    fn default() -> Self {
        MovePolicy {
            moves: default_moves(),
            trees_only: false,
            alternate: false,
            alternate_first: StepKind::Add,
            allow_loops: false,
            allow_parallel: true,
            length_rule: LengthRule::ParentEdges,
            max_candidates: None,
        }
    }
}

impl MovePolicy {
    pub fn with_moves(moves: &[Move]) -> Self {
        MovePolicy { moves: moves.to_vec(), ..Default::default() }
    }

    pub fn trees() -> Self {
        MovePolicy { moves: vec![Move::Pendant], trees_only: true, ..Default::default() }
    }

    pub fn alternating() -> Self {
        MovePolicy { alternate: true, ..Default::default() }
    }

    fn additive(&self) -> impl Iterator<Item = Move> + '_ {
        self.moves.iter().copied().filter(|m| *m != Move::Delete)
    }

    pub fn validate(&self) -> Result<()> {
        if self.moves.is_empty() {
            return Err(Error::Config("move policy enables no move".into()));
        }
        if self.alternate && self.additive().next().is_none() {
            return Err(Error::Config("alternating policy needs an additive move".into()));
        }
        if let LengthRule::Fixed(l) = self.length_rule {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Config("fixed edge length must be positive".into()));
            }
        }
        if self.max_candidates == Some(0) {
            return Err(Error::Config("max_candidates must be positive".into()));
        }
        Ok(())
    }

    /// Moves used at global step `step`.
    pub fn moves_for_step(&self, step: usize) -> Vec<Move> {
        if !self.alternate {
            return self.moves.clone();
        }
        let first_is_add = self.alternate_first == StepKind::Add;
        if (step % 2 == 0) == first_is_add {
            self.additive().collect()
        } else {
            vec![Move::Delete]
        }
    }
}

/// How a candidate was obtained from its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum MoveDesc {
    Pendant { vertex: usize },
    Between { a: usize, b: usize },
    Delete { edge: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub graph: MetricGraph,
    pub desc: MoveDesc,
}

fn new_edge_length(parent: &MetricGraph, rule: LengthRule) -> f64 {
    let n = parent.edge_count() as f64;
    match rule {
        LengthRule::ParentEdges => 1.0 / n,
        LengthRule::ChildEdges => 1.0 / (n + 1.0),
        LengthRule::Fixed(l) => l,
    }
}

/// Children for an explicit move set, in canonical order: pendant moves by
/// vertex, then between moves by vertex pair, then deletions by edge.
pub fn candidates_for(parent: &MetricGraph, policy: &MovePolicy, moves: &[Move]) -> Result<Vec<Candidate>> {
    let parent = parent.normalized()?;
    let m = parent.vertex_count();
    let len = new_edge_length(&parent, policy.length_rule);
    let allow_loops = policy.allow_loops && !policy.trees_only;
    let mut out = Vec::new();

    if moves.contains(&Move::Pendant) {
        for v in 0..m {
            out.push((parent.with_edge(v, m, len), MoveDesc::Pendant { vertex: v }));
        }
    }
    if moves.contains(&Move::Between) && !policy.trees_only {
        for a in 0..m {
            let start = if allow_loops { a } else { a + 1 };
            for b in start..m {
                if !policy.allow_parallel && parent.multiplicity(a, b) > 0 {
                    continue;
                }
                let child = parent.with_edge(a, b, len).with_loops(allow_loops || parent.allow_loops());
                out.push((child, MoveDesc::Between { a, b }));
            }
        }
    }
    if moves.contains(&Move::Delete) && parent.edge_count() > 1 {
        for e in 0..parent.edge_count() {
            let child = parent.without_edge(e);
            if child.is_connected() {
                out.push((child, MoveDesc::Delete { edge: e }));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoLegalMove);
    }
    out.into_iter()
        .map(|(g, desc)| Ok(Candidate { graph: g.normalized()?, desc }))
        .collect()
}

/// Children for every move the policy enables (ignoring alternation).
pub fn candidates(parent: &MetricGraph, policy: &MovePolicy) -> Result<Vec<Candidate>> {
    candidates_for(parent, policy, &policy.moves)
}

/// Scores closer than this (relative) are ties.
pub const TIE_TOL: f64 = 1e-10;

/// Index of the smallest score; earlier candidates win ties. Failed
/// candidates (`None`) are skipped.
pub fn select(scores: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        let Some(s) = *s else { continue };
        match best {
            Some((_, b)) if s >= b - TIE_TOL * b.abs().max(1.0) => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

/// Outcome of scoring one candidate.
#[derive(Debug, Clone)]
pub struct Scored {
    pub candidate: Candidate,
    pub result: Result<(Spectrum, Score)>,
}

/// Scores candidates in parallel; order is preserved.
pub fn score_candidates(
    cands: Vec<Candidate>,
    goal: &Goal,
    count: usize,
    mode: ModeChoice,
    opts: &RootSearchOptions,
    fixed_k_max: bool,
) -> Vec<Scored> {
    cands
        .into_par_iter()
        .map(|c| {
            let result = evaluate(&c.graph, goal, count, mode, opts, fixed_k_max);
            Scored { candidate: c, result }
        })
        .collect()
}

pub(crate) fn evaluate(
    g: &MetricGraph,
    goal: &Goal,
    count: usize,
    mode: ModeChoice,
    opts: &RootSearchOptions,
    fixed_k_max: bool,
) -> Result<(Spectrum, Score)> {
    let spec = if fixed_k_max {
        crate::spectrum::compute_spectrum(g, mode, opts)?
    } else {
        spectrum_for_count(g, count.max(9), mode, opts)?
    };
    let mut s = score(goal, &spec)?;
    if s.eigenvalues.len() < count {
        s.eigenvalues = spec.eigenvalues(count)?;
    }
    Ok((spec, s))
}

/// Seeded subsample of `n` candidate indices, returned in increasing order.
pub(crate) fn subsample(n: usize, cap: usize, seed: u64, step: usize) -> Vec<usize> {
    if n <= cap {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut idx = sample(&mut rng, n, cap).into_vec();
    idx.sort_unstable();
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn path3_pendant_and_between() {
        let c = candidates(&MetricGraph::path(3), &MovePolicy::default()).unwrap();
        assert_eq!(c.len(), 6);
        let pendants = c.iter().filter(|c| matches!(c.desc, MoveDesc::Pendant { .. })).count();
        assert_eq!(pendants, 3);
        // New raw edge 1/2 next to two edges of 1/2: each child is equilateral.
        for cand in &c {
            assert!(cand.graph.is_equilateral(1e-12));
            assert!((cand.graph.total_length().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_deletions() {
        let c = candidates(&fixtures::triangle(), &MovePolicy::with_moves(&[Move::Delete])).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|c| c.graph.is_path() && c.graph.edge_count() == 2));
    }

    #[test]
    fn trees_only_is_pendant_only() {
        let policy = MovePolicy { moves: vec![Move::Pendant, Move::Between], trees_only: true, ..Default::default() };
        let c = candidates(&MetricGraph::path(3), &policy).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|c| c.graph.is_tree()));
    }

    #[test]
    fn bridges_are_not_deleted() {
        let c = candidates(&MetricGraph::path(4), &MovePolicy::with_moves(&[Move::Delete])).unwrap();
        // Only the two end edges can go; the middle one would disconnect.
        assert_eq!(c.len(), 2);
        let single = MetricGraph::path(2);
        assert_eq!(
            candidates(&single, &MovePolicy::with_moves(&[Move::Delete])),
            Err(Error::NoLegalMove)
        );
    }

    #[test]
    fn no_parallel_when_disallowed() {
        let policy = MovePolicy { moves: vec![Move::Between], allow_parallel: false, ..Default::default() };
        let c = candidates(&fixtures::triangle(), &policy);
        assert_eq!(c, Err(Error::NoLegalMove));
    }

    #[test]
    fn loops_when_allowed() {
        let policy = MovePolicy { moves: vec![Move::Between], allow_loops: true, ..Default::default() };
        let c = candidates(&MetricGraph::path(2), &policy).unwrap();
        // (0,0), (0,1), (1,1)
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|c| c.graph.validate().is_empty()));
    }

    #[test]
    fn alternation() {
        let p = MovePolicy::alternating();
        assert_eq!(p.moves_for_step(0), vec![Move::Pendant, Move::Between]);
        assert_eq!(p.moves_for_step(1), vec![Move::Delete]);
        let q = MovePolicy { alternate_first: StepKind::Delete, ..p };
        assert_eq!(q.moves_for_step(0), vec![Move::Delete]);
    }

    #[test]
    fn selection_prefers_first_on_ties() {
        assert_eq!(select(&[Some(2.0), Some(1.0), Some(1.0)]), Some(1));
        assert_eq!(select(&[None, Some(3.0)]), Some(1));
        assert_eq!(select(&[None, None]), None);
    }

    #[test]
    fn subsample_is_seeded_and_sorted() {
        let a = subsample(50, 10, 7, 3);
        assert_eq!(a, subsample(50, 10, 7, 3));
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(subsample(5, 10, 7, 3), vec![0, 1, 2, 3, 4]);
    }
}
