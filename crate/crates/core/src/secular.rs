//! Bond scattering matrices and the secular function.
//!
//! With the bond basis of [`BondBasis`], the edge scattering matrix maps a
//! bond to its reversal with phase `exp(i k l)`, and the vertex scattering
//! matrix couples the bonds leaving a common vertex through the standard
//! (Kirchhoff) block `-I + (2/d) J`. Eigenvalues `lambda = k^2 > 0` are the
//! zeros of `D(k) = det(S_e(k) S_v - I)`.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::graph::{BondBasis, MetricGraph};

pub type C64 = Complex<f64>;

/// Default relative threshold for counting vanishing singular values.
pub const DEFAULT_MULTIPLICITY_TOL: f64 = 1e-6;

/// Standard vertex scattering block of a vertex of degree `d`.
pub fn vertex_block(d: usize) -> Result<DMatrix<f64>> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    let off = 2.0 / d as f64;
    Ok(DMatrix::from_fn(d, d, |i, j| if i == j { off - 1.0 } else { off }))
}

/// Real `2N x 2N` vertex scattering matrix in the bond basis.
pub fn assemble_vertex_scattering(g: &MetricGraph) -> DMatrix<f64> {
    let bonds = g.bonds();
    vertex_scattering_for(g, &bonds)
}

fn vertex_scattering_for(g: &MetricGraph, bonds: &BondBasis) -> DMatrix<f64> {
    let n = bonds.len();
    let mut sv = DMatrix::zeros(n, n);
    for v in 0..g.vertex_count() {
        let at = bonds.outgoing(v);
        if at.is_empty() {
            continue;
        }
        let d = at.len();
        let off = 2.0 / d as f64;
        for (i, &bi) in at.iter().enumerate() {
            for (j, &bj) in at.iter().enumerate() {
                sv[(bi, bj)] = if i == j { off - 1.0 } else { off };
            }
        }
    }
    sv
}

/// Complex `2N x 2N` edge scattering matrix at (possibly complex) `k`.
pub fn assemble_edge_scattering(g: &MetricGraph, k: C64) -> Result<DMatrix<C64>> {
    let lengths = g.lengths()?;
    let n = 2 * lengths.len();
    let mut se = DMatrix::zeros(n, n);
    for (e, &l) in lengths.iter().enumerate() {
        let phase = (C64::i() * k * l).exp();
        se[(2 * e + 1, 2 * e)] = phase;
        se[(2 * e, 2 * e + 1)] = phase;
    }
    Ok(se)
}

/// Evaluates `S_e(k) S_v - I`, its determinant and its singular values for a
/// fixed graph. Immutable; every call allocates its own workspace, so calls
/// at different `k` may run in parallel.
#[derive(Debug, Clone)]
pub struct SecularEvaluator {
    graph: MetricGraph,
    bonds: BondBasis,
    bond_lengths: Vec<f64>,
    sv: DMatrix<f64>,
}

impl SecularEvaluator {
    pub fn new(g: &MetricGraph) -> Result<Self> {
        g.ensure_valid()?;
        let lengths = g.lengths()?;
        let bonds = g.bonds();
        let sv = vertex_scattering_for(g, &bonds);
        let bond_lengths = bonds.bonds().iter().map(|b| lengths[b.edge]).collect();
        Ok(SecularEvaluator { graph: g.clone(), bonds, bond_lengths, sv })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn bonds(&self) -> &BondBasis {
        &self.bonds
    }

    pub fn dim(&self) -> usize {
        self.bonds.len()
    }

    pub fn vertex_scattering(&self) -> &DMatrix<f64> {
        &self.sv
    }

    pub fn edge_scattering(&self, k: C64) -> DMatrix<C64> {
        let n = self.dim();
        let mut se = DMatrix::zeros(n, n);
        for b in 0..n {
            se[(self.bonds.reverse(b), b)] = (C64::i() * k * self.bond_lengths[b]).exp();
        }
        se
    }

    /// `S_e(k) S_v`, unitary for real `k`.
    pub fn transfer(&self, k: C64) -> DMatrix<C64> {
        // Row rev(b) of S_e S_v is exp(i k l_b) times row b of S_v.
        let n = self.dim();
        let mut u = DMatrix::zeros(n, n);
        for b in 0..n {
            let phase = (C64::i() * k * self.bond_lengths[b]).exp();
            let r = self.bonds.reverse(b);
            for c in 0..n {
                let s = self.sv[(b, c)];
                if s != 0.0 {
                    u[(r, c)] = phase * s;
                }
            }
        }
        u
    }

    /// `S_e(k) S_v - I`.
    pub fn secular_matrix(&self, k: C64) -> DMatrix<C64> {
        let mut m = self.transfer(k);
        for i in 0..self.dim() {
            m[(i, i)] -= C64::new(1.0, 0.0);
        }
        m
    }

    /// `D(k)` by LU factorization with partial pivoting.
    pub fn det(&self, k: C64) -> C64 {
        self.secular_matrix(k).lu().determinant()
    }

    pub fn det_real(&self, k: f64) -> C64 {
        self.det(C64::new(k, 0.0))
    }

    /// Singular values of `S_e(k) S_v - I` in ascending order.
    pub fn singular_values(&self, k: f64) -> Vec<f64> {
        let mut s: Vec<f64> =
            self.secular_matrix(C64::new(k, 0.0)).singular_values().iter().copied().collect();
        s.sort_by(f64::total_cmp);
        s
    }

    pub fn sigma_min(&self, k: f64) -> f64 {
        self.singular_values(k)[0]
    }

    /// Number of singular values below `rel_tol * sigma_max` at `k`.
    pub fn multiplicity_at(&self, k: f64, rel_tol: f64) -> usize {
        let s = self.singular_values(k);
        let cut = rel_tol * s.last().copied().unwrap_or(0.0).max(1.0);
        s.iter().filter(|&&x| x < cut).count()
    }
}

/// One row of the secular plot export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotSample {
    pub k: f64,
    pub sigma_min: f64,
    pub det: C64,
}

/// Samples `sigma_min` and `D(k)` at `k0 + i (k1 - k0) / n` for
/// `i = 0..=n`, i.e. `n` intervals and `n + 1` rows.
pub fn plot_samples(ev: &SecularEvaluator, k0: f64, k1: f64, n: usize) -> Vec<PlotSample> {
    use rayon::prelude::*;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let k = if n == 0 { k0 } else { k0 + (k1 - k0) * i as f64 / n as f64 };
            PlotSample { k, sigma_min: ev.sigma_min(k), det: ev.det_real(k) }
        })
        .collect()
}
