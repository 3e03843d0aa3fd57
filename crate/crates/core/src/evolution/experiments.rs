//! Built-in run configurations. The JSON files under `experiments/` in the
//! repository are generated from these.

use std::f64::consts::PI;

use super::run::RunConfig;
use super::{Move, MovePolicy};
use crate::goals::{Comparator, Goal, Phase, StopCondition};
use crate::graph::MetricGraph;

pub const NAMES: [&str; 7] = ["exp1", "exp2", "exp3", "exp4", "exp4-mixed", "exp5", "fig9"];

fn target(values: &[f64]) -> Goal {
    Goal::target(values.to_vec()).expect("built-in targets are valid")
}

/// Target (0, π², 4π²) from a 3-vertex path.
pub fn exp1() -> RunConfig {
    let p = PI * PI;
    RunConfig::new(MetricGraph::path(3), target(&[0.0, p, 4.0 * p]), MovePolicy::default(), 8).named("exp1")
}

/// Maximal spectral gap from a 3-vertex path.
pub fn exp2() -> RunConfig {
    RunConfig::new(MetricGraph::path(3), Goal::MaxLambda1, MovePolicy::default(), 12).named("exp2")
}

/// Maximal λ₂/λ₁ from a 6-vertex path.
pub fn exp3() -> RunConfig {
    RunConfig::new(MetricGraph::path(6), Goal::MaxRatio, MovePolicy::default(), 15).named("exp3")
}

/// Alternating add/delete under maximal spectral gap from a 2×3 grid.
pub fn exp4() -> RunConfig {
    RunConfig::new(MetricGraph::grid(2, 3), Goal::MaxLambda1, MovePolicy::alternating(), 16).named("exp4")
}

/// As [`exp4`], but every step may add or delete, and parallel edges are
/// off.
pub fn exp4_mixed() -> RunConfig {
    let mut policy = MovePolicy::with_moves(&[Move::Pendant, Move::Between, Move::Delete]);
    policy.allow_parallel = false;
    RunConfig::new(MetricGraph::grid(2, 3), Goal::MaxLambda1, policy, 16).named("exp4-mixed")
}

/// Target (0, 4π², 9π², 9π²) restricted to trees.
pub fn exp5() -> RunConfig {
    let p = PI * PI;
    RunConfig::new(MetricGraph::path(3), target(&[0.0, 4.0 * p, 9.0 * p, 9.0 * p]), MovePolicy::trees(), 12)
        .named("exp5")
}

/// Two-phase program: grow λ₁ by adding edges until λ₁ ≥ (5π)², then aim
/// for (0, (5π)², (15π)²) by adding pendant edges.
pub fn fig9() -> RunConfig {
    let p = PI * PI;
    let goal = Goal::Program {
        phases: vec![
            Phase {
                goal: Goal::MaxLambda1,
                until: Some(StopCondition::Eigenvalue { eigenvalue: 1, cmp: Comparator::Ge, threshold: 25.0 * p }),
                policy: Some(MovePolicy::with_moves(&[Move::Between])),
            },
            Phase {
                goal: target(&[0.0, 25.0 * p, 225.0 * p]),
                until: None,
                policy: Some(MovePolicy::with_moves(&[Move::Pendant])),
            },
        ],
    };
    RunConfig::new(MetricGraph::path(5), goal, MovePolicy::default(), 12).named("fig9")
}

pub fn by_name(name: &str) -> Option<RunConfig> {
    let name = name.strip_prefix("experiment").unwrap_or(name);
    match name {
        "exp1" | "1" => Some(exp1()),
        "exp2" | "2" => Some(exp2()),
        "exp3" | "3" => Some(exp3()),
        "exp4" | "4" => Some(exp4()),
        "exp4-mixed" => Some(exp4_mixed()),
        "exp5" | "5" => Some(exp5()),
        "fig9" | "9" => Some(fig9()),
        _ => None,
    }
}
