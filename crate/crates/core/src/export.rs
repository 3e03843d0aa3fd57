//! CSV writers. Numbers use the shortest representation that round-trips.

use std::fmt::Write as _;

use crate::secular::PlotSample;
use crate::spectrum::Spectrum;

/// `k,multiplicity,lambda`, one row per distinct root including k = 0.
pub fn spectrum_csv(spec: &Spectrum) -> String {
    let mut out = String::from("k,multiplicity,lambda\n");
    for r in spec.roots() {
        let _ = writeln!(out, "{},{},{}", r.k, r.multiplicity, r.k * r.k);
    }
    out
}

/// `k,sigma_min,re_det,im_det`.
pub fn plot_csv(samples: &[PlotSample]) -> String {
    let mut out = String::from("k,sigma_min,re_det,im_det\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{},{}", s.k, s.sigma_min, s.det.re, s.det.im);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::spectrum::{compute_spectrum, ModeChoice, RootSearchOptions};

    #[test]
    fn interval_rows() {
        let spec = compute_spectrum(&fixtures::interval(), ModeChoice::Scan, &RootSearchOptions::default().with_k_max(7.0))
            .unwrap();
        let csv = spectrum_csv(&spec);
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "k,multiplicity,lambda");
        assert_eq!(rows.len(), 4);
        let pi: f64 = rows[2].split(',').next().unwrap().parse().unwrap();
        assert!((pi - std::f64::consts::PI).abs() < 1e-8);
    }
}
