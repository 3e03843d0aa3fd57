use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{candidates_for, evaluate, score_candidates, select, subsample, Move, MoveDesc, MovePolicy};
use crate::error::{Error, Result};
use crate::goals::{Goal, StopCondition};
use crate::graph::MetricGraph;
use crate::spectrum::{ModeChoice, RootSearchOptions};

/// Number of k-values recorded per step.
pub const K_PREFIX_LEN: usize = 8;

fn yes() -> bool {
    true
}

/// Root-search settings for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsConfig {
    /// Grow `k_max` until enough eigenvalues are found; otherwise use
    /// `k_max` as given.
    #[serde(default = "yes")]
    pub k_max_auto: bool,
    #[serde(default)]
    pub mode: ModeChoice,
    #[serde(flatten)]
    pub options: RootSearchOptions,
}

impl Default for RootsConfig {
    fn default() -> Self {
        RootsConfig { k_max_auto: true, mode: ModeChoice::Auto, options: RootSearchOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub initial_graph: MetricGraph,
    pub goal: Goal,
    #[serde(default)]
    pub policy: MovePolicy,
    pub steps: usize,
    #[serde(default)]
    pub roots: RootsConfig,
    /// Only used for candidate subsampling.
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(initial_graph: MetricGraph, goal: Goal, policy: MovePolicy, steps: usize) -> Self {
        RunConfig { name: None, initial_graph, goal, policy, steps, roots: RootsConfig::default(), seed: 0 }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        self.initial_graph.ensure_valid()?;
        if !self.initial_graph.is_concrete() {
            return Err(Error::Config("initial graph must have concrete lengths".into()));
        }
        self.goal.validate()?;
        self.policy.validate()?;
        self.roots.options.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("run config serializes")
    }
}

/// One evolution step as recorded in the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionStep {
    pub step: usize,
    pub phase: usize,
    pub goal: String,
    /// Set on the first step of every phase after the first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_start: Option<String>,
    pub moves: Vec<Move>,
    pub parent: MetricGraph,
    pub chosen: MetricGraph,
    pub chosen_move: MoveDesc,
    pub candidates: usize,
    pub scores: Vec<Option<f64>>,
    pub chosen_index: usize,
    pub score: f64,
    pub eigenvalues: Vec<f64>,
    pub k_prefix: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

/// Evaluation of the initial graph under the first phase's goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialEval {
    pub score: f64,
    pub eigenvalues: Vec<f64>,
    pub k_prefix: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "state", content = "reason")]
pub enum RunStatus {
    Running,
    Done,
    Aborted(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub config: RunConfig,
    pub initial: Option<InitialEval>,
    pub steps: Vec<EvolutionStep>,
    pub status: RunStatus,
    /// Wall-clock seconds per step; kept out of the serialized log so that
    /// replays are byte-identical.
    #[serde(skip)]
    pub timings: Vec<f64>,
}

impl RunLog {
    /// Chosen graphs, one per step.
    pub fn chosen_graphs(&self) -> impl Iterator<Item = &MetricGraph> {
        self.steps.iter().map(|s| &s.chosen)
    }

    pub fn final_graph(&self) -> &MetricGraph {
        self.steps.last().map_or(&self.config.initial_graph, |s| &s.chosen)
    }

    /// One JSON object per step, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("steps serialize"));
            out.push('\n');
        }
        out
    }

    /// `step,phase,k1,k2,k3,k4`: the first four nonzero k-values per step,
    /// with the initial graph as step 0.
    pub fn k_trajectory_csv(&self) -> String {
        let mut out = String::from("step,phase,k1,k2,k3,k4\n");
        let mut row = |step: usize, phase: usize, ks: &[f64]| {
            let _ = write!(out, "{step},{phase}");
            for k in ks.iter().skip(1).take(4) {
                let _ = write!(out, ",{k}");
            }
            out.push('\n');
        };
        if let Some(init) = &self.initial {
            row(0, 0, &init.k_prefix);
        }
        for s in &self.steps {
            row(s.step + 1, s.phase, &s.k_prefix);
        }
        out
    }

    pub fn timings_csv(&self) -> String {
        let mut out = String::from("step,seconds\n");
        for (i, t) in self.timings.iter().enumerate() {
            let _ = writeln!(out, "{},{t}", i + 1);
        }
        out
    }

    /// Indices of steps that open a new phase.
    pub fn phase_starts(&self) -> Vec<usize> {
        self.steps.iter().filter(|s| s.phase_start.is_some()).map(|s| s.step).collect()
    }
}

/// Step-at-a-time executor. [`run`] drives it to completion; the HTTP
/// service drives it one request at a time.
#[derive(Debug, Clone)]
pub struct Runner {
    goal: Goal,
    current: MetricGraph,
    phase: usize,
    steps_in_phase: usize,
    pending_phase_start: Option<String>,
    log: RunLog,
}

impl Runner {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let current = config.initial_graph.normalized()?;
        let goal = config.goal.clone();
        let initial = evaluate(
            &current,
            goal.active(0),
            goal.required_count(0),
            config.roots.mode,
            &config.roots.options,
            !config.roots.k_max_auto,
        )
        .ok()
        .map(|(spec, score)| InitialEval {
            score: score.value,
            eigenvalues: score.eigenvalues,
            k_prefix: spec.k_prefix(K_PREFIX_LEN).unwrap_or_else(|_| spec.k_values().collect()),
        });
        let log = RunLog { config, initial, steps: Vec::new(), status: RunStatus::Running, timings: Vec::new() };
        Ok(Runner { goal, current, phase: 0, steps_in_phase: 0, pending_phase_start: None, log })
    }

    pub fn log(&self) -> &RunLog {
        &self.log
    }

    pub fn into_log(self) -> RunLog {
        self.log
    }

    pub fn current(&self) -> &MetricGraph {
        &self.current
    }

    pub fn goal(&self) -> &Goal {
        &self.goal
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn is_finished(&self) -> bool {
        self.log.status != RunStatus::Running
    }

    /// Replaces the goal for all subsequent steps and opens a new phase.
    pub fn set_goal(&mut self, goal: Goal) -> Result<()> {
        if self.is_finished() {
            return Err(Error::Config("run has finished".into()));
        }
        goal.validate()?;
        self.goal = goal;
        self.phase = 0;
        self.steps_in_phase = 0;
        self.pending_phase_start = Some(format!("goal replaced by {}", self.goal.label()));
        Ok(())
    }

    /// Marks the run as done without further steps.
    pub fn stop(&mut self) {
        if !self.is_finished() {
            self.log.status = RunStatus::Done;
        }
    }

    fn policy(&self) -> &MovePolicy {
        match &self.goal {
            Goal::Program { phases } => phases[self.phase].policy.as_ref().unwrap_or(&self.log.config.policy),
            _ => &self.log.config.policy,
        }
    }

    fn stop_condition(&self) -> Option<&StopCondition> {
        match &self.goal {
            Goal::Program { phases } => phases[self.phase].until.as_ref(),
            _ => None,
        }
    }

    /// Executes one step. On failure the run is marked aborted and the log
    /// keeps every completed step.
    pub fn step(&mut self) -> Result<&EvolutionStep> {
        if self.is_finished() {
            return Err(Error::Config("run has finished".into()));
        }
        let started = Instant::now();
        match self.try_step() {
            Ok(step) => {
                self.log.timings.push(started.elapsed().as_secs_f64());
                self.log.steps.push(step);
                self.after_step();
                Ok(self.log.steps.last().expect("just pushed"))
            }
            Err(e) => {
                self.log.status = RunStatus::Aborted(e.to_string());
                Err(e)
            }
        }
    }

    fn try_step(&mut self) -> Result<EvolutionStep> {
        let index = self.log.steps.len();
        let policy = self.policy().clone();
        let moves = policy.moves_for_step(index);
        let mut cands = candidates_for(&self.current, &policy, &moves)?;
        if let Some(cap) = policy.max_candidates {
            let keep = subsample(cands.len(), cap, self.log.config.seed, index);
            cands = keep.into_iter().map(|i| cands[i].clone()).collect();
        }
        let leaf = self.goal.active(self.phase).clone();
        let count = self.goal.required_count(self.phase);
        let roots = &self.log.config.roots;
        let scored = score_candidates(cands, &leaf, count, roots.mode, &roots.options, !roots.k_max_auto);

        let scores: Vec<Option<f64>> =
            scored.iter().map(|s| s.result.as_ref().ok().map(|(_, sc)| sc.value)).collect();
        let failures: Vec<String> = scored
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.result.as_ref().err().map(|e| format!("candidate {i}: {e}")))
            .collect();
        let Some(best) = select(&scores) else {
            return Err(Error::AllCandidatesFailed(failures.join("; ")));
        };
        let chosen = &scored[best];
        let (spec, score) = chosen.result.as_ref().expect("selected candidates have scores");
        let k_prefix = spec.k_prefix(K_PREFIX_LEN).unwrap_or_else(|_| spec.k_values().collect());

        Ok(EvolutionStep {
            step: index,
            phase: self.phase,
            goal: leaf.label().to_string(),
            phase_start: self.pending_phase_start.take(),
            moves,
            parent: self.current.clone(),
            chosen: chosen.candidate.graph.clone(),
            chosen_move: chosen.candidate.desc,
            candidates: scored.len(),
            scores,
            chosen_index: best,
            score: score.value,
            eigenvalues: score.eigenvalues.clone(),
            k_prefix,
            failures,
        })
    }

    fn after_step(&mut self) {
        let last = self.log.steps.last().expect("called after a step");
        self.current = last.chosen.clone();
        self.steps_in_phase += 1;
        if let Some(cond) = self.stop_condition() {
            if cond.reached(self.steps_in_phase, &last.eigenvalues) {
                let phases = match &self.goal {
                    Goal::Program { phases } => phases.len(),
                    _ => 1,
                };
                if self.phase + 1 < phases {
                    self.pending_phase_start =
                        Some(format!("phase {} stop condition met at step {}", self.phase, last.step));
                    self.phase += 1;
                    self.steps_in_phase = 0;
                } else {
                    self.log.status = RunStatus::Done;
                }
            }
        }
        if self.log.steps.len() >= self.log.config.steps {
            self.log.status = RunStatus::Done;
        }
    }
}

/// Runs a configuration to completion. A failing step ends the run early;
/// the returned log then has status `Aborted` and every completed step.
pub fn run(config: RunConfig) -> Result<RunLog> {
    let mut runner = Runner::new(config)?;
    while !runner.is_finished() {
        if runner.step().is_err() {
            break;
        }
    }
    Ok(runner.into_log())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goals::{Comparator, Phase};
    use std::f64::consts::PI;

    fn exp1(steps: usize) -> RunConfig {
        let pi2 = PI * PI;
        RunConfig::new(
            MetricGraph::path(3),
            Goal::target(vec![0.0, pi2, 4.0 * pi2]).unwrap(),
            MovePolicy::default(),
            steps,
        )
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(matches!(Runner::new(exp1(0)), Err(Error::Config(_))));
    }

    #[test]
    fn path_extends_under_path_target() {
        let log = run(exp1(2)).unwrap();
        assert_eq!(log.status, RunStatus::Done);
        assert_eq!(log.steps.len(), 2);
        assert!(log.chosen_graphs().all(|g| g.is_path()));
        assert_eq!(log.steps[0].chosen.vertex_count(), 4);
    }

    #[test]
    fn chosen_score_is_minimal() {
        let log = run(exp1(2)).unwrap();
        for s in &log.steps {
            let min = s.scores.iter().flatten().copied().fold(f64::INFINITY, f64::min);
            assert!(s.score <= min + super::super::TIE_TOL * min.abs().max(1.0));
            assert!((s.chosen.total_length().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn alternate_delete_step_removes_an_edge() {
        let mut cfg = RunConfig::new(MetricGraph::cycle(4), Goal::MaxLambda1, MovePolicy::alternating(), 2);
        cfg.policy.alternate_first = super::super::StepKind::Delete;
        let log = run(cfg).unwrap();
        assert_eq!(log.steps[0].chosen.edge_count(), 3);
        assert_eq!(log.steps[1].chosen.edge_count(), 4);
    }

    #[test]
    fn program_switches_phase() {
        let goal = Goal::Program {
            phases: vec![
                Phase {
                    goal: Goal::MaxLambda1,
                    until: Some(StopCondition::Steps { steps: 1 }),
                    policy: None,
                },
                Phase { goal: Goal::MinLambda1, until: None, policy: Some(MovePolicy::trees()) },
            ],
        };
        let log = run(RunConfig::new(MetricGraph::path(3), goal, MovePolicy::default(), 3)).unwrap();
        assert_eq!(log.steps.iter().map(|s| s.phase).collect::<Vec<_>>(), vec![0, 1, 1]);
        assert_eq!(log.phase_starts(), vec![1]);
        assert_eq!(log.steps[1].moves, vec![Move::Pendant]);
        assert_eq!(log.steps[1].goal, "min_lambda1");
    }

    #[test]
    fn final_phase_condition_ends_run() {
        let goal = Goal::Program {
            phases: vec![Phase {
                goal: Goal::MaxLambda1,
                until: Some(StopCondition::Eigenvalue { eigenvalue: 1, cmp: Comparator::Ge, threshold: 0.0 }),
                policy: None,
            }],
        };
        let log = run(RunConfig::new(MetricGraph::path(3), goal, MovePolicy::default(), 5)).unwrap();
        assert_eq!(log.steps.len(), 1);
        assert_eq!(log.status, RunStatus::Done);
    }

    #[test]
    fn set_goal_opens_phase() {
        let mut r = Runner::new(exp1(4)).unwrap();
        r.step().unwrap();
        r.set_goal(Goal::MaxLambda1).unwrap();
        let s = r.step().unwrap();
        assert_eq!(s.goal, "max_lambda1");
        assert!(s.phase_start.is_some());
        r.stop();
        assert!(r.is_finished());
        assert!(r.step().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = exp1(3).named("exp1");
        let back = RunConfig::from_json(&cfg.to_json_pretty()).unwrap();
        assert_eq!(back, cfg);
        let minimal = r#"{"initial_graph": {"vertices": 2, "edges": [{"u":0,"v":1,"len":1}]},
            "goal": {"type": "max_lambda1"},
            "policy": {"moves": ["pendant", "between"], "trees_only": false, "alternate": false},
            "steps": 2, "roots": {"k_max_auto": true}}"#;
        let cfg = RunConfig::from_json(minimal).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.roots.options, RootSearchOptions::default());
    }
}
