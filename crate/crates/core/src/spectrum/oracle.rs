//! Independent eigenvalue formulation for cross-validation.
//!
//! On edge `n` (coordinate `x` from `u` to `v`) write
//! `f_n(x) = A_n cos(k x) + B_n sin(k x)`. Continuity and the vanishing sum
//! of outward derivatives at every vertex give `2N` homogeneous equations in
//! the `2N` unknowns; `k > 0` is an eigenvalue exactly when this matrix is
//! singular, with the kernel dimension as multiplicity. No scattering matrix
//! is involved.

use nalgebra::DMatrix;

use super::scan::{scan_profile, SingularProfile};
use super::{RootSearchOptions, Spectrum, SpectrumMode};
use crate::error::Result;
use crate::graph::MetricGraph;

pub struct OracleSystem {
    vertex_count: usize,
    /// `(u, v, length)` per edge.
    edges: Vec<(usize, usize, f64)>,
}

impl OracleSystem {
    pub fn new(g: &MetricGraph) -> Result<Self> {
        g.ensure_valid()?;
        let lengths = g.lengths()?;
        let edges = g.edges().iter().zip(lengths).map(|(e, l)| (e.u, e.v, l)).collect();
        Ok(OracleSystem { vertex_count: g.vertex_count(), edges })
    }

    /// Matching-condition matrix at `k`. Derivative rows are divided by `k`.
    pub fn matrix(&self, k: f64) -> DMatrix<f64> {
        let n = 2 * self.edges.len();
        // Per edge end: (vertex, value coefficients, derivative coefficients)
        // over the unknowns (A_n, B_n).
        let mut ends: Vec<Vec<(usize, [f64; 2], [f64; 2])>> = vec![Vec::new(); self.vertex_count];
        for (e, &(u, v, l)) in self.edges.iter().enumerate() {
            let (s, c) = (k * l).sin_cos();
            ends[u].push((e, [1.0, 0.0], [0.0, -1.0]));
            ends[v].push((e, [c, s], [-s, c]));
        }
        let mut m = DMatrix::zeros(n, n);
        let mut row = 0;
        for at in ends.iter().filter(|a| !a.is_empty()) {
            let (e0, val0, _) = at[0];
            for &(e, val, _) in &at[1..] {
                m[(row, 2 * e0)] += val0[0];
                m[(row, 2 * e0 + 1)] += val0[1];
                m[(row, 2 * e)] -= val[0];
                m[(row, 2 * e + 1)] -= val[1];
                row += 1;
            }
            for &(e, _, der) in at {
                m[(row, 2 * e)] += der[0];
                m[(row, 2 * e + 1)] += der[1];
            }
            row += 1;
        }
        debug_assert_eq!(row, n);
        m
    }
}

impl SingularProfile for OracleSystem {
    fn singular_values(&self, k: f64) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix(k).singular_values().iter().copied().collect();
        s.sort_by(f64::total_cmp);
        s
    }

    fn min_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.2).fold(f64::INFINITY, f64::min)
    }
}

/// Roots in `(0, k_max]` of the matching-condition system, default options.
pub fn oracle_roots(g: &MetricGraph, k_max: f64) -> Result<Spectrum> {
    oracle_roots_with(g, &RootSearchOptions::default().with_k_max(k_max))
}

pub fn oracle_roots_with(g: &MetricGraph, opts: &RootSearchOptions) -> Result<Spectrum> {
    let sys = OracleSystem::new(g)?;
    let roots = scan_profile(&sys, opts)?;
    Ok(Spectrum::from_positive_roots(roots, opts.k_max, SpectrumMode::Scan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::PI;

    #[test]
    fn interval_is_neumann() {
        let s = oracle_roots(&fixtures::interval(), 10.0).unwrap();
        let got: Vec<_> = s.positive_roots().iter().map(|r| (r.k, r.multiplicity)).collect();
        assert_eq!(got.len(), 3);
        for (i, (k, m)) in got.iter().enumerate() {
            assert!((k - (i + 1) as f64 * PI).abs() < 1e-9);
            assert_eq!(*m, 1);
        }
    }

    #[test]
    fn triangle_is_circle() {
        let s = oracle_roots(&fixtures::triangle(), 13.0).unwrap();
        let got: Vec<_> = s.positive_roots().iter().map(|r| (r.k, r.multiplicity)).collect();
        assert_eq!(got.len(), 2);
        for (i, (k, m)) in got.iter().enumerate() {
            assert!((k - 2.0 * (i + 1) as f64 * PI).abs() < 1e-9);
            assert_eq!(*m, 2);
        }
    }

    #[test]
    fn matrix_is_square_with_loops_and_parallel_edges() {
        let g = MetricGraph::from_lengths(2, &[(0, 1, 0.3), (0, 1, 0.3), (1, 1, 0.4)]).with_loops(true);
        let sys = OracleSystem::new(&g).unwrap();
        let m = sys.matrix(2.0);
        assert_eq!(m.shape(), (6, 6));
    }
}
