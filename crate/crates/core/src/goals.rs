//! Spectral objectives. Every score is "lower is better".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::MovePolicy;
use crate::spectrum::Spectrum;

/// Below this, `lambda_1` counts as zero for the ratio goal.
pub const ZERO_GAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceSpace {
    /// Compare eigenvalues `lambda`.
    #[default]
    Lambda,
    /// Compare `k = sqrt(lambda)`.
    K,
}

/// Target values `mu_0 = 0 <= mu_1 <= ...`, given as eigenvalues.
/// Repeated values encode multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTarget")]
pub struct TargetSpectrum {
    #[serde(default)]
    space: DistanceSpace,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTarget {
    #[serde(default)]
    space: DistanceSpace,
    values: Vec<f64>,
}

impl TryFrom<RawTarget> for TargetSpectrum {
    type Error = Error;

    fn try_from(raw: RawTarget) -> Result<Self> {
        TargetSpectrum::new(raw.values, raw.space)
    }
}

impl TargetSpectrum {
    pub fn new(values: Vec<f64>, space: DistanceSpace) -> Result<Self> {
        if values.first() != Some(&0.0) {
            return Err(Error::Config("target spectrum must start with 0".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("target values must be finite and nonnegative".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("target values must be nondecreasing".into()));
        }
        Ok(TargetSpectrum { space, values })
    }

    /// Target from k-values; eigenvalues are their squares.
    pub fn from_k(ks: &[f64], space: DistanceSpace) -> Result<Self> {
        Self::new(ks.iter().map(|k| k * k).collect(), space)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn space(&self) -> DistanceSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Comparison in a stop condition, `lambda_index <op> threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Comparator {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparator::Ge => lhs >= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Lt => lhs < rhs,
        }
    }
}

/// When a program phase ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StopCondition {
    Eigenvalue {
        eigenvalue: usize,
        cmp: Comparator,
        threshold: f64,
    },
    Steps {
        steps: usize,
    },
}

impl StopCondition {
    /// Checked after a step; `steps_in_phase` counts steps taken so far in
    /// the phase and `eigenvalues` starts at `lambda_0`.
    pub fn reached(&self, steps_in_phase: usize, eigenvalues: &[f64]) -> bool {
        match *self {
            StopCondition::Steps { steps } => steps_in_phase >= steps,
            StopCondition::Eigenvalue { eigenvalue, cmp, threshold } => {
                eigenvalues.get(eigenvalue).is_some_and(|&l| cmp.holds(l, threshold))
            }
        }
    }

    fn required_count(&self) -> usize {
        match *self {
            StopCondition::Eigenvalue { eigenvalue, .. } => eigenvalue + 1,
            StopCondition::Steps { .. } => 0,
        }
    }
}

/// One stage of a programmed run. `policy` overrides the run's move policy
/// while the phase is active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub goal: Goal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub until: Option<StopCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<MovePolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Goal {
    #[serde(rename = "target")]
    MinimizeDistance(TargetSpectrum),
    MaxLambda1,
    MinLambda1,
    /// Maximise `lambda_2 / lambda_1`.
    MaxRatio,
    Program { phases: Vec<Phase> },
}

impl Goal {
    pub fn target(values: Vec<f64>) -> Result<Goal> {
        Ok(Goal::MinimizeDistance(TargetSpectrum::new(values, DistanceSpace::Lambda)?))
    }

    pub fn validate(&self) -> Result<()> {
        if let Goal::Program { phases } = self {
            if phases.is_empty() {
                return Err(Error::Config("program needs at least one phase".into()));
            }
            for p in phases {
                if matches!(p.goal, Goal::Program { .. }) {
                    return Err(Error::Config("programs cannot be nested".into()));
                }
                if let Some(policy) = &p.policy {
                    policy.validate()?;
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &'static str {
        match self {
            Goal::MinimizeDistance(_) => "target",
            Goal::MaxLambda1 => "max_lambda1",
            Goal::MinLambda1 => "min_lambda1",
            Goal::MaxRatio => "max_ratio",
            Goal::Program { .. } => "program",
        }
    }

    /// The goal scoring candidates in phase `phase`.
    pub fn active(&self, phase: usize) -> &Goal {
        match self {
            Goal::Program { phases } => &phases[phase.min(phases.len() - 1)].goal,
            g => g,
        }
    }

    /// Multiplicity-counted eigenvalues needed to score (and to test the
    /// stop condition of) phase `phase`.
    pub fn required_count(&self, phase: usize) -> usize {
        match self {
            Goal::MinimizeDistance(t) => t.len(),
            Goal::MaxLambda1 | Goal::MinLambda1 => 2,
            Goal::MaxRatio => 3,
            Goal::Program { phases } => {
                let p = &phases[phase.min(phases.len() - 1)];
                p.goal.required_count(0).max(p.until.as_ref().map_or(0, |u| u.required_count()))
            }
        }
    }
}

/// A goal evaluation; `value` is minimised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub eigenvalues: Vec<f64>,
}

/// Euclidean distance between the first `N + 1` eigenvalues and the target.
pub fn spectral_distance(spec: &Spectrum, target: &TargetSpectrum) -> Result<f64> {
    let lambdas = spec.eigenvalues(target.len())?;
    Ok(distance_between(&lambdas, target))
}

fn distance_between(lambdas: &[f64], target: &TargetSpectrum) -> f64 {
    let map = |x: f64| match target.space {
        DistanceSpace::Lambda => x,
        DistanceSpace::K => x.sqrt(),
    };
    lambdas
        .iter()
        .zip(&target.values)
        .map(|(&l, &m)| (map(l) - map(m)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Scores `spec` under a leaf goal; a program is scored by its first phase.
pub fn score(goal: &Goal, spec: &Spectrum) -> Result<Score> {
    let goal = goal.active(0);
    let eigenvalues = spec.eigenvalues(goal.required_count(0))?;
    let value = match goal {
        Goal::MinimizeDistance(t) => distance_between(&eigenvalues, t),
        Goal::MaxLambda1 => -eigenvalues[1],
        Goal::MinLambda1 => eigenvalues[1],
        Goal::MaxRatio => {
            let (l1, l2) = (eigenvalues[1], eigenvalues[2]);
            if l1 < ZERO_GAP_TOL {
                return Err(Error::ZeroGap(l1));
            }
            -(l2 / l1)
        }
        Goal::Program { .. } => unreachable!("active() returns a leaf goal"),
    };
    Ok(Score { value, eigenvalues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{Root, SpectrumMode};
    use std::f64::consts::PI;

    fn spectrum(roots: &[(f64, usize)]) -> Spectrum {
        let roots = roots.iter().map(|&(k, multiplicity)| Root { k, multiplicity }).collect();
        Spectrum::from_positive_roots(roots, 100.0, SpectrumMode::Scan)
    }

    fn interval() -> Spectrum {
        spectrum(&[(PI, 1), (2.0 * PI, 1), (3.0 * PI, 1)])
    }

    fn triangle() -> Spectrum {
        spectrum(&[(2.0 * PI, 2), (4.0 * PI, 2)])
    }

    #[test]
    fn distance_examples() {
        let pi2 = PI * PI;
        let t = TargetSpectrum::new(vec![0.0, pi2, 4.0 * pi2], DistanceSpace::Lambda).unwrap();
        assert!(spectral_distance(&interval(), &t).unwrap() < 1e-12);
        let zeros = TargetSpectrum::new(vec![0.0; 3], DistanceSpace::Lambda).unwrap();
        let d = spectral_distance(&interval(), &zeros).unwrap();
        assert!((d - pi2 * 17f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn k_space_distance() {
        let t = TargetSpectrum::from_k(&[0.0, 2.0 * PI, 3.0 * PI], DistanceSpace::K).unwrap();
        let d = spectral_distance(&interval(), &t).unwrap();
        assert!((d - 2f64.sqrt() * PI).abs() < 1e-12);
    }

    #[test]
    fn target_validation() {
        assert!(TargetSpectrum::new(vec![1.0, 2.0], DistanceSpace::Lambda).is_err());
        assert!(TargetSpectrum::new(vec![0.0, 2.0, 1.0], DistanceSpace::Lambda).is_err());
        assert!(TargetSpectrum::new(vec![0.0, 9.0, 9.0], DistanceSpace::Lambda).is_ok());
        assert!(serde_json::from_str::<TargetSpectrum>(r#"{"values":[1,2]}"#).is_err());
    }

    #[test]
    fn gap_and_ratio_scores() {
        let s = score(&Goal::MaxLambda1, &interval()).unwrap();
        assert!((s.value + PI * PI).abs() < 1e-12);
        assert!((score(&Goal::MinLambda1, &interval()).unwrap().value - PI * PI).abs() < 1e-12);
        assert_eq!(score(&Goal::MaxRatio, &triangle()).unwrap().value, -1.0);
        assert!((score(&Goal::MaxRatio, &interval()).unwrap().value + 4.0).abs() < 1e-12);
    }

    #[test]
    fn insufficient_range() {
        let short = spectrum(&[(PI, 1)]);
        assert!(matches!(score(&Goal::MaxRatio, &short), Err(Error::InsufficientRange { .. })));
    }

    #[test]
    fn goal_json_round_trip() {
        let json = r#"{"type":"target","space":"lambda","values":[0,39.478,88.826,88.826]}"#;
        let g: Goal = serde_json::from_str(json).unwrap();
        assert_eq!(g.required_count(0), 4);
        let back: Goal = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);

        let prog = r#"{"type":"program","phases":[
            {"goal":{"type":"max_lambda1"},"until":{"eigenvalue":1,"cmp":">=","threshold":246.74}},
            {"goal":{"type":"target","values":[0,246.74,2220.66]}}]}"#;
        let p: Goal = serde_json::from_str(prog).unwrap();
        p.validate().unwrap();
        assert_eq!(p.active(1).label(), "target");
        assert_eq!(p.required_count(0), 2);
        assert_eq!(p.required_count(1), 3);
    }

    #[test]
    fn stop_conditions() {
        let c = StopCondition::Eigenvalue { eigenvalue: 1, cmp: Comparator::Ge, threshold: 10.0 };
        assert!(c.reached(0, &[0.0, 10.0]));
        assert!(!c.reached(5, &[0.0, 9.9]));
        assert!(StopCondition::Steps { steps: 3 }.reached(3, &[]));
    }
}
