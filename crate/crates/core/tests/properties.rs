mod common;

use common::random_graph;
use nalgebra::DMatrix;
use proptest::prelude::*;
use qgraph::evolution::{candidates, select, Move, MovePolicy};
use qgraph::goals::{spectral_distance, DistanceSpace, TargetSpectrum};
use qgraph::secular::{SecularEvaluator, C64};
use qgraph::spectrum::{compute_spectrum, ModeChoice, Root, RootSearchOptions, Spectrum, SpectrumMode};
use qgraph::MetricGraph;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

/// Random connected graph with irrational-looking lengths.
fn jittered(seed: u64, jitter: &[f64]) -> MetricGraph {
    let g = random_graph(seed, 5, 7);
    let edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.u, e.v, g.length(i).unwrap() * (1.0 + jitter[i % jitter.len()])))
        .collect();
    MetricGraph::from_lengths(g.vertex_count(), &edges)
}

fn random_tree(seed: u64, n: usize) -> MetricGraph {
    let edges: Vec<(usize, usize, f64)> =
        (1..n).map(|w| (((seed as usize).wrapping_mul(31 + w)) % w, w, 1.0 + (w % 3) as f64)).collect();
    MetricGraph::from_lengths(n, &edges).normalized().unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn normalize_is_idempotent(seed in 0u64..10_000, jitter in prop::collection::vec(0.0f64..2.0, 7)) {
        let g = jittered(seed, &jitter).normalized().unwrap();
        let again = g.normalized().unwrap();
        prop_assert_eq!(&g, &again);
        prop_assert!((g.total_length().unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn degrees_sum_to_twice_edges(seed in 0u64..10_000) {
        let g = random_graph(seed, 6, 10);
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn bond_transfer_is_unitary(seed in 0u64..10_000, k in 0.0f64..200.0) {
        let ev = SecularEvaluator::new(&random_graph(seed, 5, 7)).unwrap();
        let u = ev.transfer(C64::new(k, 0.0));
        let n = u.nrows();
        let err = (&u * u.adjoint() - DMatrix::<C64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12, "{}", err);
    }

    #[test]
    fn roots_scale_inversely_with_length(seed in 0u64..10_000) {
        let g = random_graph(seed, 4, 5);
        let opts = RootSearchOptions::default().with_k_max(20.0);
        let base = compute_spectrum(&g, ModeChoice::Scan, &opts).unwrap();
        let doubled = compute_spectrum(&g.scaled(2.0), ModeChoice::Scan, &opts.clone().with_k_max(10.0)).unwrap();
        let a: Vec<Root> = base.positive_roots().iter().copied().filter(|r| r.k < 19.5).collect();
        let b: Vec<Root> = doubled.positive_roots().iter().copied().filter(|r| r.k < 9.75).collect();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.multiplicity, y.multiplicity);
            prop_assert!((x.k - 2.0 * y.k).abs() <= 1e-8);
        }
    }

    #[test]
    fn determinant_modulus_ignores_labels(seed in 0u64..10_000, k in 0.1f64..60.0, rot in 0usize..5) {
        let g = random_graph(seed, 5, 7);
        let n = g.vertex_count();
        let relabel = |v: usize| (v + rot) % n;
        let mut edges: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| (relabel(e.v), relabel(e.u), g.length(i).unwrap()))
            .collect();
        edges.reverse();
        let h = MetricGraph::from_lengths(n, &edges);
        let a = SecularEvaluator::new(&g).unwrap().det_real(k).norm();
        let b = SecularEvaluator::new(&h).unwrap().det_real(k).norm();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn distance_is_a_metric(
        ks in prop::collection::vec(0.5f64..30.0, 3),
        x in prop::collection::vec(0.0f64..900.0, 3),
        y in prop::collection::vec(0.0f64..900.0, 3),
    ) {
        let mut ks = ks;
        ks.sort_by(f64::total_cmp);
        let roots: Vec<Root> = ks.iter().map(|&k| Root { k, multiplicity: 1 }).collect();
        let spec = Spectrum::from_positive_roots(roots, 31.0, SpectrumMode::Scan);
        let own = spec.eigenvalues(4).unwrap();
        let target = |v: &[f64]| {
            let mut t: Vec<f64> = std::iter::once(0.0).chain(v.iter().copied()).collect();
            t.sort_by(f64::total_cmp);
            TargetSpectrum::new(t, DistanceSpace::Lambda).unwrap()
        };
        let tx = target(&x);
        let ty = target(&y);
        let dx = spectral_distance(&spec, &tx).unwrap();
        let dy = spectral_distance(&spec, &ty).unwrap();
        let dxy = tx.values().iter().zip(ty.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(dx >= 0.0);
        prop_assert_eq!(spectral_distance(&spec, &TargetSpectrum::new(own, DistanceSpace::Lambda).unwrap()).unwrap(), 0.0);
        prop_assert!(dx <= dy + dxy + 1e-9);
    }

    #[test]
    fn selection_ignores_affine_rescaling(
        scores in prop::collection::vec(-1e3f64..1e3, 1..20),
        a in 0.1f64..10.0,
        b in -100.0f64..100.0,
    ) {
        let opt: Vec<Option<f64>> = scores.iter().map(|&s| Some(s)).collect();
        let mapped: Vec<Option<f64>> = scores.iter().map(|&s| Some(a * s + b)).collect();
        let i = select(&opt).unwrap();
        let j = select(&mapped).unwrap();
        // Both picks are minimal; they agree unless two scores tie closely.
        prop_assert!((scores[i] - scores[j]).abs() <= 1e-6 * scores[i].abs().max(1.0));
    }

    #[test]
    fn tree_growth_stays_in_trees(seed in 0u64..10_000, n in 2usize..8) {
        let tree = random_tree(seed, n);
        prop_assert!(tree.is_tree());
        for c in candidates(&tree, &MovePolicy::trees()).unwrap() {
            prop_assert!(c.graph.is_tree());
        }
    }

    #[test]
    fn candidates_are_normalized(seed in 0u64..10_000) {
        let parent = random_graph(seed, 5, 7);
        let policy = MovePolicy::with_moves(&[Move::Pendant, Move::Between, Move::Delete]);
        for c in candidates(&parent, &policy).unwrap() {
            prop_assert!((c.graph.total_length().unwrap() - 1.0).abs() <= 1e-12);
            prop_assert!(c.graph.is_connected());
            let de = c.graph.edge_count() as i64 - parent.edge_count() as i64;
            prop_assert!(de == 1 || de == -1);
        }
    }
}
