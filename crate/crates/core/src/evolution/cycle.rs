use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::run::RunLog;
use crate::graph::MetricGraph;

const LENGTH_QUANTUM: f64 = 1e-9;
const SCORE_TOL: f64 = 1e-9;

type PairLengths = BTreeMap<(usize, usize), Vec<i64>>;

fn quantize(l: f64) -> i64 {
    (l / LENGTH_QUANTUM).round() as i64
}

fn pair_lengths(g: &MetricGraph) -> Option<PairLengths> {
    let mut map = PairLengths::new();
    for (e, edge) in g.edges().iter().enumerate() {
        let l = g.length(e)?;
        let key = (edge.u.min(edge.v), edge.u.max(edge.v));
        map.entry(key).or_default().push(quantize(l));
    }
    for v in map.values_mut() {
        v.sort_unstable();
    }
    Some(map)
}

fn lengths_between<'a>(m: &'a PairLengths, a: usize, b: usize) -> &'a [i64] {
    m.get(&(a.min(b), a.max(b))).map_or(&[], Vec::as_slice)
}

/// Isomorphism of metric graphs: a vertex bijection carrying every edge
/// to an edge of the same length (lengths compared to 1e-9).
pub fn are_isomorphic(g: &MetricGraph, h: &MetricGraph) -> bool {
    let n = g.vertex_count();
    if n != h.vertex_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    let (Some(pg), Some(ph)) = (pair_lengths(g), pair_lengths(h)) else {
        return false;
    };
    let mut all_g: Vec<i64> = pg.values().flatten().copied().collect();
    let mut all_h: Vec<i64> = ph.values().flatten().copied().collect();
    all_g.sort_unstable();
    all_h.sort_unstable();
    if all_g != all_h {
        return false;
    }
    let signature = |m: &PairLengths, d: usize, v: usize| {
        let mut ls: Vec<i64> =
            m.iter().filter(|((a, b), _)| *a == v || *b == v).flat_map(|(_, l)| l.iter().copied()).collect();
        ls.sort_unstable();
        (d, ls)
    };
    let sig_g: Vec<_> = (0..n).map(|v| signature(&pg, g.degree(v), v)).collect();
    let sig_h: Vec<_> = (0..n).map(|v| signature(&ph, h.degree(v), v)).collect();
    let mut sorted_g = sig_g.clone();
    let mut sorted_h = sig_h.clone();
    sorted_g.sort();
    sorted_h.sort();
    if sorted_g != sorted_h {
        return false;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(sig_g[v].0));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        i: usize,
        order: &[usize],
        map: &mut [usize],
        used: &mut [bool],
        ctx: (&PairLengths, &PairLengths, &[(usize, Vec<i64>)], &[(usize, Vec<i64>)]),
    ) -> bool {
        let (pg, ph, sig_g, sig_h) = ctx;
        let Some(&v) = order.get(i) else { return true };
        for w in 0..map.len() {
            if used[w] || sig_g[v] != sig_h[w] {
                continue;
            }
            if lengths_between(pg, v, v) != lengths_between(ph, w, w) {
                continue;
            }
            let consistent = order[..i].iter().all(|&u| lengths_between(pg, u, v) == lengths_between(ph, map[u], w));
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if extend(i + 1, order, map, used, ctx) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }

    extend(0, &order, &mut map, &mut used, (&pg, &ph, &sig_g, &sig_h))
}

/// The chosen graph at step `start + period` repeats the one at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub start: usize,
    pub period: usize,
}

/// First repetition among the chosen graphs of a log: the smallest t with
/// some s < t whose graph is isomorphic and whose score matches.
pub fn detect_cycle(log: &RunLog) -> Option<Cycle> {
    detect_cycle_within(log, log.steps.len())
}

/// As [`detect_cycle`], looking only at the first `horizon` steps.
pub fn detect_cycle_within(log: &RunLog, horizon: usize) -> Option<Cycle> {
    let steps = &log.steps[..horizon.min(log.steps.len())];
    for t in 1..steps.len() {
        for s in 0..t {
            let (a, b) = (&steps[s], &steps[t]);
            let close = (a.score - b.score).abs() <= SCORE_TOL * a.score.abs().max(1.0);
            if close && are_isomorphic(&a.chosen, &b.chosen) {
                return Some(Cycle { start: s, period: t - s });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, LengthExpr};

    fn g(n: usize, edges: &[(usize, usize, f64)]) -> MetricGraph {
        MetricGraph::new(n, edges.iter().map(|&(u, v, l)| Edge::new(u, v, LengthExpr::Fixed(l))).collect())
    }

    #[test]
    fn relabelled_star_is_isomorphic() {
        let a = g(4, &[(0, 1, 0.2), (0, 2, 0.3), (0, 3, 0.5)]);
        let b = g(4, &[(3, 2, 0.5), (3, 0, 0.2), (1, 3, 0.3)]);
        assert!(are_isomorphic(&a, &b));
    }

    #[test]
    fn lengths_matter() {
        let a = g(3, &[(0, 1, 0.4), (1, 2, 0.6)]);
        let b = g(3, &[(0, 1, 0.5), (1, 2, 0.5)]);
        assert!(!are_isomorphic(&a, &b));
    }

    #[test]
    fn placement_of_lengths_matters() {
        // path with lengths 1,2,1 versus 1,1,2
        let a = g(4, &[(0, 1, 0.25), (1, 2, 0.5), (2, 3, 0.25)]);
        let b = g(4, &[(0, 1, 0.25), (1, 2, 0.25), (2, 3, 0.5)]);
        assert!(!are_isomorphic(&a, &b));
        assert!(are_isomorphic(&b, &g(4, &[(3, 2, 0.25), (2, 1, 0.25), (1, 0, 0.5)])));
    }

    #[test]
    fn parallel_edges_counted() {
        let a = g(2, &[(0, 1, 0.5), (0, 1, 0.5)]);
        let b = g(3, &[(0, 1, 0.5), (1, 2, 0.5)]);
        assert!(!are_isomorphic(&a, &b));
        assert!(are_isomorphic(&MetricGraph::cycle(5), &MetricGraph::cycle(5)));
        assert!(!are_isomorphic(&MetricGraph::cycle(6), &g(6, &[(0, 1, 1. / 6.), (1, 2, 1. / 6.), (2, 0, 1. / 6.), (3, 4, 1. / 6.), (4, 5, 1. / 6.), (5, 3, 1. / 6.)])));
    }
}
