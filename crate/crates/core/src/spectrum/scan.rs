use rayon::prelude::*;

use super::{Root, RootSearchOptions, Spectrum, SpectrumMode};
use crate::error::{Error, Result};
use crate::secular::SecularEvaluator;

/// A real `k`-dependent matrix whose rank drops exactly at the eigenvalues.
pub trait SingularProfile: Sync {
    /// Singular values at `k`, ascending.
    fn singular_values(&self, k: f64) -> Vec<f64>;

    /// Shortest edge length, which sets the default scan resolution.
    fn min_edge_length(&self) -> f64;

    fn sigma_min(&self, k: f64) -> f64 {
        self.singular_values(k)[0]
    }
}

impl SingularProfile for SecularEvaluator {
    fn singular_values(&self, k: f64) -> Vec<f64> {
        SecularEvaluator::singular_values(self, k)
    }

    fn min_edge_length(&self) -> f64 {
        self.graph().lengths().unwrap_or_default().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Golden-section minimisation of `f` on `[a, b]`. Stops when the bracket is
/// narrower than `x_tol` or after `max_iter` steps; returns `(x, f(x))`.
pub fn golden_section_min(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    x_tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= x_tol {
            break;
        }
        if fc < fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Scan-and-refine root search on any [`SingularProfile`].
pub(crate) fn scan_profile<P: SingularProfile>(profile: &P, opts: &RootSearchOptions) -> Result<Vec<Root>> {
    opts.validate()?;
    let step = opts.scan_step.unwrap_or(profile.min_edge_length() * std::f64::consts::PI / 20.0);
    let n = (opts.k_max / step).ceil() as usize + 2;
    let samples: Vec<f64> = (0..=n).into_par_iter().map(|i| profile.sigma_min(i as f64 * step)).collect();

    let candidates: Vec<usize> = (1..n)
        .filter(|&i| samples[i] <= samples[i - 1] && samples[i] < samples[i + 1])
        .collect();

    let refined: Vec<Result<Option<Root>>> = candidates
        .par_iter()
        .map(|&i| {
            let (lo, hi) = ((i - 1) as f64 * step, (i + 1) as f64 * step);
            let x_tol = 1e-14 * hi.max(1.0);
            let (k, sigma) =
                golden_section_min(|k| profile.sigma_min(k), lo, hi, x_tol, opts.max_refine_iterations);
            if sigma < opts.zero_threshold {
                let s = profile.singular_values(k);
                let cut = opts.multiplicity_tol * s.last().copied().unwrap_or(0.0).max(1.0);
                let multiplicity = s.iter().filter(|&&x| x < cut).count().max(1);
                Ok(Some(Root { k, multiplicity }))
            } else if sigma > opts.separation_threshold {
                Ok(None)
            } else {
                Err(Error::RefinementFailure { lo, hi, sigma })
            }
        })
        .collect();

    let mut roots: Vec<Root> = Vec::new();
    for r in refined {
        let Some(root) = r? else { continue };
        if root.k < 0.5 * step || root.k > opts.k_max * (1.0 + 1e-12) + 1e-9 {
            continue;
        }
        match roots.last_mut() {
            Some(prev) if (root.k - prev.k).abs() <= 1e-9 * root.k.max(1.0) => {
                prev.multiplicity = prev.multiplicity.max(root.multiplicity);
            }
            _ => roots.push(root),
        }
    }
    Ok(roots)
}

/// All roots in `(0, k_max]` of the secular function, found by scanning
/// `sigma_min` and refining each local minimum.
pub fn find_roots_scan(ev: &SecularEvaluator, opts: &RootSearchOptions) -> Result<Spectrum> {
    let roots = scan_profile(ev, opts)?;
    Ok(Spectrum::from_positive_roots(roots, opts.k_max, SpectrumMode::Scan))
}
