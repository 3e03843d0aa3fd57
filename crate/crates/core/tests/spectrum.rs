mod common;

use std::f64::consts::PI;

use common::{fig1_quarters, within};
use qgraph::fixtures;
use qgraph::rational::rational_structure;
use qgraph::secular::SecularEvaluator;
use qgraph::spectrum::{
    compute_spectrum, find_roots_rational, find_roots_scan, oracle_roots, spectrum_for_count, ModeChoice,
    RootSearchOptions, SpectrumMode,
};
use qgraph::{Error, MetricGraph, ParameterBinding};

fn opts(k_max: f64) -> RootSearchOptions {
    RootSearchOptions::default().with_k_max(k_max)
}

#[test]
fn star_roots_and_multiplicities() {
    let g = fixtures::star3();
    let ev = SecularEvaluator::new(&g).unwrap();
    let spec = find_roots_scan(&ev, &opts(15.0)).unwrap();
    let got: Vec<(f64, usize)> = spec.positive_roots().iter().map(|r| (r.k, r.multiplicity)).collect();
    let expected = [(1.5 * PI, 2), (3.0 * PI, 1), (4.5 * PI, 2)];
    assert_eq!(got.len(), 3, "{got:?}");
    for ((k, m), (ek, em)) in got.iter().zip(expected) {
        assert!((k - ek).abs() < 1e-8);
        assert_eq!(*m, em);
    }
}

#[test]
fn interval_eigenvalue_prefix() {
    let spec = spectrum_for_count(&fixtures::interval(), 3, ModeChoice::Scan, &RootSearchOptions::default()).unwrap();
    let ev = spec.eigenvalues(3).unwrap();
    assert_eq!(ev[0], 0.0);
    assert!((ev[1] - PI * PI).abs() < 1e-7);
    assert!((ev[2] - 4.0 * PI * PI).abs() < 1e-7);
}

#[test]
fn short_range_reports_insufficient() {
    let spec = compute_spectrum(&fixtures::interval(), ModeChoice::Scan, &opts(4.0)).unwrap();
    assert!(matches!(spec.eigenvalues(5), Err(Error::InsufficientRange { requested: 5, available: 2 })));
}

#[test]
fn fig1_contains_eight_pi_thirds() {
    let g = fig1_quarters();
    for mode in [ModeChoice::Scan, ModeChoice::Rational] {
        let spec = compute_spectrum(&g, mode, &opts(10.0)).unwrap();
        assert!(spec.positive_roots().iter().any(|r| (r.k - 8.0 * PI / 3.0).abs() < 1e-8), "{mode:?}");
    }
}

#[test]
fn unbound_parameter_is_rejected() {
    let b = ParameterBinding::parse("c1=3.14159265").unwrap();
    match fixtures::fig1().normalize(&b) {
        Err(Error::UnboundParameter(p)) => assert_eq!(p, "c2"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn disconnected_graph_is_rejected() {
    let g = MetricGraph::from_lengths(4, &[(0, 1, 0.5), (2, 3, 0.5)]);
    assert!(matches!(SecularEvaluator::new(&g), Err(Error::InvalidGraph(_))));
}

#[test]
fn oracle_agrees_on_irrational_lengths() {
    let g = MetricGraph::from_lengths(3, &[(0, 1, 1.0), (1, 2, 2f64.sqrt()), (2, 0, 3f64.sqrt())]).normalized().unwrap();
    assert!(rational_structure(&g, 1e-9).is_none());
    let spec = compute_spectrum(&g, ModeChoice::Auto, &opts(40.0)).unwrap();
    assert_eq!(spec.mode(), SpectrumMode::Scan);
    let oracle = oracle_roots(&g, 40.0).unwrap();
    let a = within(spec.roots(), 0.0, 39.0);
    let b = within(oracle.roots(), 0.0, 39.0);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.multiplicity, y.multiplicity);
        assert!((x.k - y.k).abs() < 1e-7);
    }
}

#[test]
fn rational_mode_periodicity() {
    let g = MetricGraph::from_lengths(3, &[(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)]).normalized().unwrap();
    let rs = rational_structure(&g, 1e-9).unwrap();
    assert_eq!(rs.multiples, vec![1, 2, 3]);
    let spec = find_roots_rational(&g, &rs, 3).unwrap();
    let p = rs.period();
    let one = within(spec.roots(), 0.0, p - 1e-9);
    let two = within(spec.roots(), p, 2.0 * p - 1e-9);
    assert_eq!(one.len(), two.len());
    for (a, b) in one.iter().zip(&two) {
        assert!((b.k - a.k - p).abs() < 1e-9);
        assert_eq!(a.multiplicity, b.multiplicity);
    }
    let per_period: usize = within(spec.roots(), 0.0, p).iter().map(|r| r.multiplicity).sum();
    assert_eq!(per_period, 2 * 6);
}

#[test]
fn dumbbell_gap_ratio_grows() {
    let ratio = |m| {
        let ev = spectrum_for_count(&MetricGraph::dumbbell(m), 3, ModeChoice::Auto, &RootSearchOptions::default())
            .unwrap()
            .eigenvalues(3)
            .unwrap();
        ev[2] / ev[1]
    };
    assert!(ratio(4) > ratio(3));
}
