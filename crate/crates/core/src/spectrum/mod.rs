//! Eigenvalue enumeration.
//!
//! Two independent routes produce a [`Spectrum`]:
//!
//! * [`find_roots_scan`] samples `sigma_min(k)` of the secular matrix on a
//!   uniform grid and refines every local minimum by golden-section search.
//! * [`find_roots_rational`] handles rationally dependent lengths. With
//!   `z = exp(i k l0)` the secular function is a polynomial in `z` and the
//!   spectrum is periodic with period `2 pi / l0`, so one period determines
//!   every eigenvalue.
//!
//! [`oracle_roots`] is a third, matrix-independent formulation used for
//! cross-validation.

mod lattice;
mod oracle;
mod scan;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::rational::{rational_structure, DEFAULT_RATIONAL_TOL};
use crate::secular::DEFAULT_MULTIPLICITY_TOL;

pub use lattice::{find_roots_rational, find_roots_rational_to, LatticeOptions, SecularPolynomial};
pub use oracle::{oracle_roots, oracle_roots_with, OracleSystem};
pub use scan::{find_roots_scan, golden_section_min, SingularProfile};

/// A positive `k` root with its multiplicity, or the zero eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub k: f64,
    pub multiplicity: usize,
}

impl Root {
    pub fn lambda(&self) -> f64 {
        self.k * self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    Scan,
    Rational,
}

/// Sorted k-roots with multiplicities, valid on `[0, k_max]`. The first root
/// is always `k = 0` with multiplicity one (connected graphs only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    roots: Vec<Root>,
    k_max: f64,
    mode: SpectrumMode,
}

impl Spectrum {
    /// Builds a spectrum from positive roots, prepending `k = 0`.
    pub fn from_positive_roots(mut positive: Vec<Root>, k_max: f64, mode: SpectrumMode) -> Self {
        positive.retain(|r| r.k > 0.0 && r.multiplicity > 0);
        positive.sort_by(|a, b| a.k.total_cmp(&b.k));
        let mut roots = Vec::with_capacity(positive.len() + 1);
        roots.push(Root { k: 0.0, multiplicity: 1 });
        roots.extend(positive);
        Spectrum { roots, k_max, mode }
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Roots with `k > 0`.
    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[1..]
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn mode(&self) -> SpectrumMode {
        self.mode
    }

    /// Multiplicity-expanded k-values, `0` first.
    pub fn k_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots.iter().flat_map(|r| std::iter::repeat_n(r.k, r.multiplicity))
    }

    pub fn available(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// First `count` multiplicity-expanded k-values.
    pub fn k_prefix(&self, count: usize) -> Result<Vec<f64>> {
        let available = self.available();
        if available < count {
            return Err(Error::InsufficientRange { requested: count, available });
        }
        Ok(self.k_values().take(count).collect())
    }

    /// First `count` eigenvalues `lambda = k^2`, starting with `lambda_0 = 0`.
    pub fn eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        Ok(self.k_prefix(count)?.into_iter().map(|k| k * k).collect())
    }

    /// Multiplicity-counted number of roots in `(0, k]`.
    pub fn count_up_to(&self, k: f64) -> usize {
        self.positive_roots().iter().filter(|r| r.k <= k).map(|r| r.multiplicity).sum()
    }

    /// Restricts the spectrum to `[0, k_max]`.
    pub fn truncated(&self, k_max: f64) -> Spectrum {
        let roots = self.roots.iter().copied().filter(|r| r.k <= k_max).collect();
        Spectrum { roots, k_max: k_max.min(self.k_max), mode: self.mode }
    }
}

/// Eigenvalue enumeration (free function form).
pub fn eigenvalues(spec: &Spectrum, count: usize) -> Result<Vec<f64>> {
    spec.eigenvalues(count)
}

/// Scan-mode root search parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RootSearchOptions {
    /// Upper end of the search interval.
    pub k_max: f64,
    /// Grid step; `None` uses `min_edge_length * pi / 20`.
    pub scan_step: Option<f64>,
    /// A refined minimum below this is a root.
    pub zero_threshold: f64,
    /// A refined minimum above this is a near miss, not a root. Values in
    /// between raise `RefinementFailure`.
    pub separation_threshold: f64,
    /// Singular values below `multiplicity_tol * sigma_max` count towards
    /// the multiplicity.
    pub multiplicity_tol: f64,
    pub max_refine_iterations: usize,
}

impl Default for RootSearchOptions {
    fn default() -> Self {
        RootSearchOptions {
            k_max: 12.0 * PI,
            scan_step: None,
            zero_threshold: 1e-8,
            separation_threshold: 1e-4,
            multiplicity_tol: DEFAULT_MULTIPLICITY_TOL,
            max_refine_iterations: 200,
        }
    }
}

impl RootSearchOptions {
    pub fn with_k_max(mut self, k_max: f64) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.k_max) {
            return Err(Error::Config("k_max must be positive".into()));
        }
        if let Some(h) = self.scan_step {
            if !positive(h) {
                return Err(Error::Config("scan step must be positive".into()));
            }
        }
        if !positive(self.zero_threshold) || !positive(self.multiplicity_tol) {
            return Err(Error::Config("thresholds must be positive".into()));
        }
        if self.separation_threshold <= self.zero_threshold {
            return Err(Error::Config("separation threshold must exceed zero threshold".into()));
        }
        Ok(())
    }
}

/// How [`compute_spectrum`] chooses between the two routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    #[default]
    Auto,
    Scan,
    Rational,
}

/// Computes the spectrum on `[0, opts.k_max]`. `Auto` uses the rational
/// route when the lengths admit one and falls back to scanning otherwise.
pub fn compute_spectrum(g: &MetricGraph, mode: ModeChoice, opts: &RootSearchOptions) -> Result<Spectrum> {
    opts.validate()?;
    g.ensure_valid()?;
    match mode {
        ModeChoice::Scan => scan_graph(g, opts),
        ModeChoice::Rational => {
            let rs = rational_structure(g, DEFAULT_RATIONAL_TOL).ok_or(Error::NotRational)?;
            find_roots_rational_to(g, &rs, opts.k_max, &LatticeOptions::default())
        }
        ModeChoice::Auto => match rational_structure(g, DEFAULT_RATIONAL_TOL) {
            Some(rs) => find_roots_rational_to(g, &rs, opts.k_max, &LatticeOptions::default())
                .or_else(|_| scan_graph(g, opts)),
            None => scan_graph(g, opts),
        },
    }
}

fn scan_graph(g: &MetricGraph, opts: &RootSearchOptions) -> Result<Spectrum> {
    let ev = crate::secular::SecularEvaluator::new(g)?;
    find_roots_scan(&ev, opts)
}

/// Smallest spectrum holding at least `count` eigenvalues: starts from the
/// Weyl estimate plus a 20% margin and doubles `k_max` until enough roots
/// are found.
pub fn spectrum_for_count(
    g: &MetricGraph,
    count: usize,
    mode: ModeChoice,
    opts: &RootSearchOptions,
) -> Result<Spectrum> {
    let total = g.total_length()?;
    let mut k_max = (1.2 * PI * count.max(2) as f64 / total).max(opts.k_max.min(PI));
    for _ in 0..12 {
        let spec = compute_spectrum(g, mode, &opts.clone().with_k_max(k_max))?;
        if spec.available() >= count {
            return Ok(spec);
        }
        k_max *= 2.0;
    }
    let spec = compute_spectrum(g, mode, &opts.clone().with_k_max(k_max))?;
    spec.k_prefix(count)?;
    Ok(spec)
}

/// Result of comparing the root count with the Weyl term `K L / pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylCount {
    pub count: usize,
    pub expected: f64,
    pub deviation: f64,
}

/// Multiplicity-counted roots in `(0, k]` against `k / pi` (total length one).
pub fn weyl_check(spec: &Spectrum, k: f64) -> Result<WeylCount> {
    if k > spec.k_max() * (1.0 + 1e-12) {
        return Err(Error::InsufficientRange { requested: 0, available: spec.available() });
    }
    let count = spec.count_up_to(k + 1e-9 * k.max(1.0));
    let expected = k / PI;
    Ok(WeylCount { count, expected, deviation: count as f64 - expected })
}
