//! Detection of rationally dependent edge lengths.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::graph::MetricGraph;

/// Largest denominator accepted when approximating a length ratio.
pub const DEFAULT_DENOMINATOR_CAP: u64 = 64;

/// Default relative tolerance for `|l_n - p_n l0| <= tol * l_n`.
pub const DEFAULT_RATIONAL_TOL: f64 = 1e-9;

/// Every edge length is an integer multiple of a common base length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalStructure {
    pub base_length: f64,
    pub multiples: Vec<u64>,
}

impl RationalStructure {
    /// Period of the spectrum in k.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.base_length
    }

    pub fn total_multiple(&self) -> u64 {
        self.multiples.iter().sum()
    }
}

/// Best rational approximation `p/q` of `x > 0` with `q <= cap` satisfying
/// `|x - p/q| <= tol * x`, from the continued-fraction convergents.
pub fn approximate_ratio(x: f64, tol: f64, cap: u64) -> Option<(u64, u64)> {
    if !(x > 0.0 && x.is_finite()) {
        return None;
    }
    let (mut h_prev, mut h) = (1u64, x.floor() as u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut rem = x - x.floor();
    loop {
        if (x - h as f64 / k as f64).abs() <= tol * x {
            return (h > 0).then_some((h, k));
        }
        if rem < 1e-300 {
            return None;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        let a = a as u64;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > cap {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Finds `l0` and integers `p_n` with `l_n = p_n l0`, or `None` when some
/// ratio `l_n / l_0` has no rational approximation with denominator at most
/// `cap` inside `tol`.
pub fn rational_structure_with_cap(g: &MetricGraph, tol: f64, cap: u64) -> Option<RationalStructure> {
    let lengths = g.lengths().ok()?;
    let reference = *lengths.first()?;
    let mut ratios = Vec::with_capacity(lengths.len());
    for &l in &lengths {
        ratios.push(approximate_ratio(l / reference, tol, cap)?);
    }
    let mut lcm = 1u64;
    for &(_, q) in &ratios {
        lcm = lcm.checked_mul(q / gcd(lcm, q))?;
    }
    let mut multiples: Vec<u64> =
        ratios.iter().map(|&(p, q)| p.checked_mul(lcm / q)).collect::<Option<_>>()?;
    let common = multiples.iter().fold(0, |acc, &p| gcd(acc, p));
    for p in &mut multiples {
        *p /= common;
    }
    let total: u64 = multiples.iter().sum();
    let base_length = lengths.iter().sum::<f64>() / total as f64;
    let fits = lengths
        .iter()
        .zip(&multiples)
        .all(|(&l, &p)| (l - p as f64 * base_length).abs() <= tol * l);
    fits.then_some(RationalStructure { base_length, multiples })
}

pub fn rational_structure(g: &MetricGraph, tol: f64) -> Option<RationalStructure> {
    rational_structure_with_cap(g, tol, DEFAULT_DENOMINATOR_CAP)
}
