//! Per-period enumeration for rationally dependent edge lengths.
//!
//! When every length is a multiple `p_n l0` of a base length, each entry of
//! `S_e(k)` is a power of `z = exp(i k l0)` and `D` is a polynomial in `z`
//! of degree `2 sum p_n`. Its coefficients are recovered exactly by sampling
//! `D` on the roots of unity and taking an inverse DFT.
//!
//! The roots themselves are taken from an equivalent normal eigenproblem:
//! subdividing edge `n` into `p_n` pieces of length `l0` (degree-two
//! vertices are transparent) gives `D_sub(z) = det(z T - I)` with the real
//! orthogonal `T = J S_v`, so the roots are the conjugated eigenvalues of
//! `T`. Eigenvalues of a normal matrix stay well conditioned even when they
//! are highly degenerate, which a polynomial root finder cannot offer. The
//! interpolated polynomial then certifies the degree and every root.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use rustfft::FftPlanner;

use super::{Root, Spectrum, SpectrumMode};
use crate::error::{Error, Result};
use crate::graph::{Edge, MetricGraph};
use crate::rational::RationalStructure;
use crate::secular::{assemble_vertex_scattering, SecularEvaluator, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeOptions {
    /// Eigenvalues of `T` closer than this in the z-plane form one root.
    pub cluster_radius: f64,
    /// A cluster is kept when its centre satisfies `||z| - 1| < unit_tol`.
    pub unit_tol: f64,
    /// Relative size below which the leading coefficient counts as zero.
    pub degree_tol: f64,
    /// Largest polynomial degree `2 sum p_n` attempted.
    pub max_degree: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions { cluster_radius: 1e-6, unit_tol: 1e-8, degree_tol: 1e-8, max_degree: 1024 }
    }
}

/// Coefficients of `D` as a polynomial in `z = exp(i k l0)`, lowest first.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularPolynomial {
    pub coefficients: Vec<C64>,
    pub base_length: f64,
}

impl SecularPolynomial {
    /// Samples `D` at the `deg + 1` roots of unity and inverts the DFT.
    pub fn interpolate(g: &MetricGraph, rs: &RationalStructure) -> Result<Self> {
        let ev = SecularEvaluator::new(g)?;
        let degree = 2 * rs.total_multiple() as usize;
        let n = degree + 1;
        let mut samples: Vec<C64> = (0..n)
            .map(|j| {
                // z_j = exp(2 pi i j / n) corresponds to k = 2 pi j / (n l0).
                let k = 2.0 * PI * j as f64 / (n as f64 * rs.base_length);
                ev.det_real(k)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut samples);
        let coefficients = samples.into_iter().map(|c| c / n as f64).collect();
        Ok(SecularPolynomial { coefficients, base_length: rs.base_length })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> C64 {
        self.coefficients[self.degree()]
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coefficients.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn scale(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Fails when the numerical degree falls short of the nominal one.
    pub fn check_degree(&self, rel_tol: f64) -> Result<()> {
        let leading = self.leading().norm();
        if leading <= rel_tol * self.scale() {
            return Err(Error::DegenerateLeadingCoefficient { leading });
        }
        Ok(())
    }
}

/// Equilateral refinement: edge `n` becomes a chain of `p_n` edges of
/// length `l0`.
fn subdivide(g: &MetricGraph, rs: &RationalStructure) -> MetricGraph {
    let mut vertex_count = g.vertex_count();
    let mut edges = Vec::new();
    for (e, &p) in g.edges().iter().zip(&rs.multiples) {
        let mut from = e.u;
        for _ in 1..p {
            let mid = vertex_count;
            vertex_count += 1;
            edges.push(Edge::new(from, mid, rs.base_length));
            from = mid;
        }
        edges.push(Edge::new(from, e.v, rs.base_length));
    }
    MetricGraph::new(vertex_count, edges).with_loops(g.allow_loops())
}

/// Roots `k` in one period `[0, 2 pi / l0)` with multiplicities. The root
/// at `k = 0` carries the order of `z = 1` as a polynomial root, which is
/// also the multiplicity of every `k = j * period`, `j >= 1`.
/// Eigenvalues of a real orthogonal matrix. Unshifted QR can stall on
/// matrices whose eigenvalues all share one modulus, so a real shift moves
/// them off the unit circle first.
fn orthogonal_eigenvalues(t: DMatrix<f64>) -> Result<Vec<C64>> {
    let n = t.nrows();
    for shift in [0.0, 0.375, -0.625, 1.25] {
        let shifted = &t + DMatrix::<f64>::identity(n, n) * shift;
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, 60 * n.max(10)) {
            return Ok(schur.complex_eigenvalues().iter().map(|z| z - shift).collect());
        }
    }
    Err(Error::NoConvergence("eigenvalues of the bond transfer matrix".into()))
}

pub(crate) fn period_roots(g: &MetricGraph, rs: &RationalStructure, opts: &LatticeOptions) -> Result<Vec<Root>> {
    let degree = 2 * rs.total_multiple() as usize;
    if degree > opts.max_degree {
        return Err(Error::LatticeTooLarge { degree });
    }
    let poly = SecularPolynomial::interpolate(g, rs)?;
    poly.check_degree(opts.degree_tol)?;

    let fine = subdivide(g, rs);
    let sv = assemble_vertex_scattering(&fine);
    let n = sv.nrows();
    // T = J S_v, where J swaps the two bonds of every edge.
    let t = DMatrix::from_fn(n, n, |r, c| sv[(r ^ 1, c)]);
    let mut zs: Vec<C64> = orthogonal_eigenvalues(t)?.iter().map(|mu| mu.inv()).collect();

    // Angles in [0, 2 pi); values just below 2 pi belong to z = 1.
    let angle = |z: &C64| {
        let a = z.arg().rem_euclid(2.0 * PI);
        if (z - C64::new(1.0, 0.0)).norm() < opts.cluster_radius { 0.0 } else { a }
    };
    zs.sort_by(|a, b| angle(a).total_cmp(&angle(b)));

    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for z in zs {
        match clusters.last_mut() {
            Some(c) if (c[c.len() - 1] - z).norm() < opts.cluster_radius => c.push(z),
            _ => clusters.push(vec![z]),
        }
    }
    // Wrap-around: a cluster straddling z = 1 from below.
    if clusters.len() > 1 {
        let last = clusters.last().unwrap()[0];
        if (last - clusters[0][0]).norm() < opts.cluster_radius {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail);
        }
    }

    let scale = poly.coefficients.iter().map(|c| c.norm()).sum::<f64>();
    let mut roots = Vec::with_capacity(clusters.len());
    for c in clusters {
        let centre = c.iter().sum::<C64>() / c.len() as f64;
        if (centre.norm() - 1.0).abs() >= opts.unit_tol {
            continue;
        }
        let on_circle = centre / centre.norm();
        if poly.eval(on_circle).norm() > 1e-6 * scale {
            return Err(Error::RefinementFailure {
                lo: angle(&on_circle) / rs.base_length,
                hi: angle(&on_circle) / rs.base_length,
                sigma: poly.eval(on_circle).norm(),
            });
        }
        roots.push(Root { k: angle(&on_circle) / rs.base_length, multiplicity: c.len() });
    }
    roots.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(roots)
}

/// Spectrum over `n_periods` periods, `[0, n_periods * 2 pi / l0)`.
pub fn find_roots_rational(g: &MetricGraph, rs: &RationalStructure, n_periods: usize) -> Result<Spectrum> {
    find_rational(g, rs, n_periods, None, &LatticeOptions::default())
}

/// Spectrum on `[0, k_max]`, using as many periods as needed.
pub fn find_roots_rational_to(
    g: &MetricGraph,
    rs: &RationalStructure,
    k_max: f64,
    opts: &LatticeOptions,
) -> Result<Spectrum> {
    let n_periods = (k_max / rs.period()).floor() as usize + 1;
    find_rational(g, rs, n_periods, Some(k_max), opts)
}

fn find_rational(
    g: &MetricGraph,
    rs: &RationalStructure,
    n_periods: usize,
    k_max: Option<f64>,
    opts: &LatticeOptions,
) -> Result<Spectrum> {
    g.ensure_valid()?;
    let base = period_roots(g, rs, opts)?;
    let period = rs.period();
    let mut roots = Vec::with_capacity(base.len() * n_periods);
    for j in 0..n_periods {
        let shift = period * j as f64;
        for r in &base {
            roots.push(Root { k: r.k + shift, multiplicity: r.multiplicity });
        }
    }
    let limit = k_max.unwrap_or(period * n_periods as f64);
    if k_max.is_some() {
        roots.retain(|r| r.k <= limit * (1.0 + 1e-12));
    }
    Ok(Spectrum::from_positive_roots(roots, limit, SpectrumMode::Rational))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{Param, ParameterBinding};
    use crate::rational::rational_structure;

    fn rational(g: &MetricGraph, periods: usize) -> Spectrum {
        let rs = rational_structure(g, 1e-9).unwrap();
        find_roots_rational(g, &rs, periods).unwrap()
    }

    #[test]
    fn interval_per_period() {
        let g = fixtures::interval();
        let rs = rational_structure(&g, 1e-9).unwrap();
        let base = period_roots(&g, &rs, &LatticeOptions::default()).unwrap();
        assert_eq!(base.len(), 2);
        assert!(base[0].k.abs() < 1e-12 && base[0].multiplicity == 1);
        assert!((base[1].k - PI).abs() < 1e-12 && base[1].multiplicity == 1);
        let s = rational(&g, 3);
        let ks: Vec<f64> = s.positive_roots().iter().map(|r| r.k).collect();
        for (i, k) in ks.iter().enumerate() {
            assert!((k - (i + 1) as f64 * PI).abs() < 1e-11);
        }
        assert_eq!(ks.len(), 5);
    }

    #[test]
    fn triangle_per_period() {
        let s = rational(&fixtures::triangle(), 2);
        let got: Vec<(f64, usize)> = s.positive_roots().iter().map(|r| (r.k, r.multiplicity)).collect();
        let want = [(2.0 * PI, 2), (4.0 * PI, 2), (6.0 * PI, 2), (8.0 * PI, 2), (10.0 * PI, 2)];
        assert_eq!(got.len(), want.len());
        for ((k, m), (wk, wm)) in got.iter().zip(want) {
            assert!((k - wk).abs() < 1e-10);
            assert_eq!(*m, wm);
        }
    }

    #[test]
    fn polynomial_reproduces_determinant_off_grid() {
        let b = ParameterBinding::new().with(Param::C1, PI).with(Param::C2, PI);
        let g = fixtures::fig1().normalize(&b).unwrap();
        let rs = rational_structure(&g, 1e-9).unwrap();
        let poly = SecularPolynomial::interpolate(&g, &rs).unwrap();
        assert_eq!(poly.degree(), 8);
        assert!((poly.leading().norm() - 1.0).abs() < 1e-12);
        assert!((poly.coefficients[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        let ev = SecularEvaluator::new(&g).unwrap();
        for k in [0.37, 5.1, 19.9] {
            let z = (C64::i() * k * rs.base_length).exp();
            assert!((poly.eval(z) - ev.det_real(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn complete_graph_high_multiplicity() {
        // Equilateral K5: cos(k l) = -1/4 with multiplicity 4 in the first band.
        let g = MetricGraph::complete(5);
        let s = rational(&g, 1);
        let k1 = 10.0 * (-0.25f64).acos();
        let first = s.positive_roots()[0];
        assert!((first.k - k1).abs() < 1e-10, "{first:?}");
        assert_eq!(first.multiplicity, 4);
    }

    #[test]
    fn total_multiplicity_matches_degree() {
        let g = MetricGraph::from_lengths(4, &[(0, 1, 0.25), (1, 2, 0.5), (2, 0, 0.125), (2, 3, 0.125)]);
        let rs = rational_structure(&g, 1e-9).unwrap();
        let base = period_roots(&g, &rs, &LatticeOptions::default()).unwrap();
        let total: usize = base.iter().map(|r| r.multiplicity).sum();
        assert_eq!(total as u64, 2 * rs.total_multiple());
    }
}
