//! Fitting spec parameters to target switching statistics.
//!
//! The loss compares ensemble statistics with a target; the search is a
//! bounded Nelder-Mead simplex in coordinates normalized to the unit box,
//! restarted from deterministic perturbations of the best point. Ensembles
//! start from a fixed lattice of seed points, so every loss evaluation is a
//! pure function of the parameters.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{ensemble_stats, EnsembleConfig, SwitchingStats, DEFAULT_BINS};
use crate::netspec::{parse_spec, NetworkSpec, Point, SpecError};
use crate::presets;

/// Per-row penalty when the target has a row the simulation never produced.
/// It is the largest squared distance between two probability vectors.
pub const ABSENT_ROW_PENALTY: f64 = 2.0;

/// Escape penalty as a multiple of the largest attainable matrix loss.
pub const ESCAPE_FACTOR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("fit problem: {0}")]
    Problem(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("every evaluation escaped the domain")]
    AllEscaped,
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParam {
    pub path: String,
    pub lower: f64,
    pub upper: f64,
}

/// Target statistics; every component is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    /// `from -> (to -> probability)`; unlisted successors count as zero.
    #[serde(default)]
    pub transitions: BTreeMap<String, BTreeMap<String, f64>>,
    /// Dwell-bin fractions per state.
    #[serde(default)]
    pub dwell: BTreeMap<String, Vec<f64>>,
    /// Per state, per dwell bin, successor fractions.
    #[serde(default)]
    pub exits: BTreeMap<String, Vec<BTreeMap<String, f64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    #[serde(default = "one")]
    pub transitions: f64,
    #[serde(default = "one")]
    pub dwell: f64,
    #[serde(default = "one")]
    pub exits: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Weights {
    fn default() -> Self {
        Weights { transitions: 1.0, dwell: 1.0, exits: 1.0 }
    }
}

/// Where the spec of a problem file comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecSource {
    Preset { preset: String },
    Path { path: PathBuf },
    Inline(Box<NetworkSpec>),
}

fn default_restarts() -> usize {
    3
}

fn default_max_evaluations() -> usize {
    200
}

fn default_bins() -> Vec<f64> {
    DEFAULT_BINS.to_vec()
}

fn default_burn_in() -> usize {
    2
}

fn default_steps_per_transition() -> u64 {
    20_000
}

/// On-disk form of a fit problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitProblemFile {
    pub spec: SpecSource,
    pub free_params: Vec<FreeParam>,
    pub target: Target,
    #[serde(default)]
    pub weights: Weights,
    /// Transitions simulated per loss evaluation, split over the seeds.
    pub budget: u64,
    #[serde(default)]
    pub seed_points: Vec<Point>,
    #[serde(default = "default_bins")]
    pub bins: Vec<f64>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_evaluations")]
    pub max_evaluations: usize,
    #[serde(default)]
    pub tolerance: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in_visits: usize,
    /// Step cap per expected transition, guarding against stalled seeds.
    #[serde(default = "default_steps_per_transition")]
    pub steps_per_transition: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitProblem {
    pub spec: NetworkSpec,
    pub free_params: Vec<FreeParam>,
    pub target: Target,
    pub weights: Weights,
    pub budget: u64,
    pub seed_points: Vec<Point>,
    pub bins: Vec<f64>,
    pub restarts: usize,
    pub max_evaluations: usize,
    pub tolerance: f64,
    pub burn_in_visits: usize,
    pub steps_per_transition: u64,
}

impl FitProblem {
    /// Parse a problem file; relative spec paths resolve against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<FitProblem, FitError> {
        let file: FitProblemFile = serde_json::from_str(text).map_err(|e| FitError::Problem(e.to_string()))?;
        let spec = match &file.spec {
            SpecSource::Preset { preset } => {
                presets::load_preset(preset).map_err(|e| FitError::Problem(e.to_string()))?
            }
            SpecSource::Path { path } => {
                let full = base_dir.join(path);
                let text = std::fs::read_to_string(&full).map_err(|e| FitError::Io(full.clone(), e))?;
                parse_spec(&text)?
            }
            SpecSource::Inline(spec) => (**spec).clone(),
        };
        FitProblem::new(spec, file)
    }

    pub fn new(spec: NetworkSpec, file: FitProblemFile) -> Result<FitProblem, FitError> {
        let seed_points = if file.seed_points.is_empty() {
            vec![spec.settings.init.ok_or_else(|| FitError::Problem("no seed_points and no settings.init".into()))?]
        } else {
            file.seed_points
        };
        let problem = FitProblem {
            spec,
            free_params: file.free_params,
            target: file.target,
            weights: file.weights,
            budget: file.budget,
            seed_points,
            bins: file.bins,
            restarts: file.restarts,
            max_evaluations: file.max_evaluations,
            tolerance: file.tolerance,
            burn_in_visits: file.burn_in_visits,
            steps_per_transition: file.steps_per_transition,
        };
        problem.check()?;
        Ok(problem)
    }

    fn check(&self) -> Result<(), FitError> {
        if self.free_params.is_empty() {
            return Err(FitError::Problem("at least one free parameter is required".into()));
        }
        for p in &self.free_params {
            if !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper) {
                return Err(FitError::Problem(format!("bounds of {} must be finite with lower < upper", p.path)));
            }
            self.spec.get_param(&p.path)?;
        }
        if self.budget == 0 {
            return Err(FitError::Problem("budget must be >= 1".into()));
        }
        let states = self.spec.state_names();
        let known = |s: &String| {
            if states.contains(s) {
                Ok(())
            } else {
                Err(FitError::Problem(format!("target names unknown state \"{s}\"")))
            }
        };
        for (from, row) in &self.target.transitions {
            known(from)?;
            row.keys().try_for_each(known)?;
            let sum: f64 = row.values().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(FitError::Problem(format!("target row \"{from}\" sums to {sum}, not 1")));
            }
        }
        for (state, fr) in &self.target.dwell {
            known(state)?;
            if fr.len() != self.bins.len() + 1 {
                return Err(FitError::Problem(format!(
                    "dwell target of \"{state}\" needs {} bins",
                    self.bins.len() + 1
                )));
            }
        }
        for (state, bins) in &self.target.exits {
            known(state)?;
            if bins.len() != self.bins.len() + 1 {
                return Err(FitError::Problem(format!(
                    "exit target of \"{state}\" needs {} bins",
                    self.bins.len() + 1
                )));
            }
            for b in bins {
                b.keys().try_for_each(known)?;
            }
        }
        Ok(())
    }

    /// Current spec values of the free parameters.
    pub fn initial_params(&self) -> Vec<f64> {
        self.free_params.iter().map(|p| self.spec.get_param(&p.path).expect("checked")).collect()
    }

    pub fn spec_with(&self, params: &[f64]) -> Result<NetworkSpec, SpecError> {
        let assignments: Vec<(&str, f64)> =
            self.free_params.iter().zip(params).map(|(p, v)| (p.path.as_str(), *v)).collect();
        self.spec.with_params(&assignments)
    }

    pub fn ensemble_config(&self) -> EnsembleConfig {
        let per_seed = self.budget.div_ceil(self.seed_points.len() as u64);
        EnsembleConfig {
            seeds: self.seed_points.clone(),
            transitions_per_seed: Some(per_seed),
            max_steps_per_seed: (per_seed + self.burn_in_visits as u64) * self.steps_per_transition,
            burn_in_visits: self.burn_in_visits,
            bin_edges: self.bins.clone(),
        }
    }

    /// Largest loss a matrix comparison can produce.
    pub fn max_matrix_loss(&self) -> f64 {
        ABSENT_ROW_PENALTY * self.target.transitions.len().max(1) as f64
    }

    pub fn escape_penalty(&self) -> f64 {
        ESCAPE_FACTOR * self.max_matrix_loss()
    }

    /// Simulate at `params`; `None` when a trajectory escaped.
    pub fn simulate(&self, params: &[f64]) -> Result<Option<SwitchingStats>, FitError> {
        let spec = self.spec_with(params)?;
        Ok(ensemble_stats(&spec, &self.ensemble_config()).ok())
    }

    /// Loss of already computed statistics against the target.
    pub fn stats_loss(&self, stats: &SwitchingStats) -> f64 {
        let index = |s: &str| stats.index(s).expect("target states checked");
        let matrix = stats.transition_matrix();
        let mut transitions = 0.0;
        for (from, row) in &self.target.transitions {
            transitions += match &matrix[index(from)] {
                None => ABSENT_ROW_PENALTY,
                Some(sim) => {
                    stats.states.iter().zip(sim).map(|(to, p)| (p - row.get(to).copied().unwrap_or(0.0)).powi(2)).sum()
                }
            };
        }
        let mut dwell = 0.0;
        for (state, target) in &self.target.dwell {
            dwell += match stats.dwell_fractions(state).expect("checked") {
                None => ABSENT_ROW_PENALTY,
                Some(sim) => sim.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum(),
            };
        }
        let mut exits = 0.0;
        for (state, bins) in &self.target.exits {
            let sim = stats.exit_fractions(state).expect("checked");
            for (b, target) in bins.iter().enumerate() {
                if target.is_empty() {
                    continue;
                }
                exits += match &sim[b] {
                    None => ABSENT_ROW_PENALTY,
                    Some(row) => stats
                        .states
                        .iter()
                        .zip(row)
                        .map(|(to, p)| (p - target.get(to).copied().unwrap_or(0.0)).powi(2))
                        .sum(),
                };
            }
        }
        self.weights.transitions * transitions + self.weights.dwell * dwell + self.weights.exits * exits
    }

    pub fn loss(&self, params: &[f64]) -> Result<f64, FitError> {
        Ok(self.evaluate(params)?.0)
    }

    fn evaluate(&self, params: &[f64]) -> Result<(f64, Option<SwitchingStats>), FitError> {
        Ok(match self.simulate(params)? {
            Some(stats) => (self.stats_loss(&stats), Some(stats)),
            None => (self.escape_penalty(), None),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    /// Best value per parameter path, in problem order.
    pub best_params: Vec<(String, f64)>,
    pub loss: f64,
    /// Best loss after each simplex iteration.
    pub loss_trace: Vec<f64>,
    pub achieved: SwitchingStats,
    pub evaluations: usize,
}

impl FitResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "best_params": self.best_params.iter().map(|(p, v)| serde_json::json!({"path": p, "value": v})).collect::<Vec<_>>(),
            "loss": self.loss,
            "loss_trace": self.loss_trace,
            "evaluations": self.evaluations,
            "achieved": self.achieved.to_json(),
        })
    }

    pub fn values(&self) -> Vec<f64> {
        self.best_params.iter().map(|(_, v)| *v).collect()
    }
}

/// Evaluation bookkeeping shared by all restarts.
struct Search<'a> {
    problem: &'a FitProblem,
    evaluations: usize,
    best: Option<(Vec<f64>, f64, SwitchingStats)>,
    any_finite: bool,
    trace: Vec<f64>,
}

impl Search<'_> {
    fn to_params(&self, z: &[f64]) -> Vec<f64> {
        self.problem.free_params.iter().zip(z).map(|(p, t)| p.lower + t.clamp(0.0, 1.0) * (p.upper - p.lower)).collect()
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.problem.max_evaluations
            || self.best.as_ref().is_some_and(|b| b.1 <= self.problem.tolerance)
    }

    fn eval(&mut self, z: &[f64]) -> Result<f64, FitError> {
        let params = self.to_params(z);
        self.evaluations += 1;
        let (loss, stats) = self.problem.evaluate(&params)?;
        if let Some(stats) = stats {
            self.any_finite = true;
            // strict improvement only, so ties keep the earlier point
            if self.best.as_ref().is_none_or(|b| loss < b.1) {
                self.best = Some((params, loss, stats));
            }
        }
        Ok(loss)
    }

    fn record(&mut self) {
        if let Some(b) = &self.best {
            self.trace.push(b.1);
        }
    }

    /// One Nelder-Mead run from `start` in unit coordinates.
    fn simplex(&mut self, start: Vec<f64>, step: f64) -> Result<(), FitError> {
        let d = start.len();
        let mut pts: Vec<Vec<f64>> = vec![start.clone()];
        for i in 0..d {
            let mut p = start.clone();
            // step inward from the nearer bound so the vertex stays inside
            p[i] = if p[i] + step <= 1.0 { p[i] + step } else { p[i] - step };
            pts.push(p);
        }
        let mut vals = Vec::with_capacity(d + 1);
        for p in &pts {
            if self.exhausted() && !vals.is_empty() {
                return Ok(());
            }
            vals.push(self.eval(p)?);
        }
        self.record();
        let clamp = |p: Vec<f64>| p.into_iter().map(|t| t.clamp(0.0, 1.0)).collect::<Vec<f64>>();
        while !self.exhausted() {
            let mut order: Vec<usize> = (0..=d).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();
            let spread = pts
                .iter()
                .skip(1)
                .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread < 1e-4 {
                break;
            }
            let centroid: Vec<f64> = (0..d).map(|k| pts[..d].iter().map(|p| p[k]).sum::<f64>() / d as f64).collect();
            let along = |t: f64| clamp(centroid.iter().zip(&pts[d]).map(|(c, w)| c + t * (c - w)).collect());
            let xr = along(1.0);
            let fr = self.eval(&xr)?;
            if fr < vals[0] {
                let xe = along(2.0);
                let fe = if self.exhausted() { f64::INFINITY } else { self.eval(&xe)? };
                if fe < fr {
                    pts[d] = xe;
                    vals[d] = fe;
                } else {
                    pts[d] = xr;
                    vals[d] = fr;
                }
            } else if fr < vals[d - 1] {
                pts[d] = xr;
                vals[d] = fr;
            } else {
                let (xc, fc) = if fr < vals[d] {
                    let xc = along(0.5);
                    (xc.clone(), self.eval(&xc)?)
                } else {
                    let xc = along(-0.5);
                    (xc.clone(), self.eval(&xc)?)
                };
                if fc < vals[d].min(fr) {
                    pts[d] = xc;
                    vals[d] = fc;
                } else {
                    for i in 1..=d {
                        if self.exhausted() {
                            break;
                        }
                        pts[i] = pts[0].iter().zip(&pts[i]).map(|(b, p)| b + 0.5 * (p - b)).collect();
                        vals[i] = self.eval(&pts[i].clone())?;
                    }
                }
            }
            self.record();
        }
        Ok(())
    }
}

/// Deterministic offsets for restart `k`: alternating signs, shrinking size.
fn restart_offset(k: usize, d: usize) -> Vec<f64> {
    let size = 0.15 / k as f64;
    (0..d).map(|i| if (i + k).is_multiple_of(2) { size } else { -size }).collect()
}

/// Minimize the loss over the bounded box, starting from the spec's values.
pub fn fit(problem: &FitProblem) -> Result<FitResult, FitError> {
    fit_from(problem, &problem.initial_params())
}

pub fn fit_from(problem: &FitProblem, start: &[f64]) -> Result<FitResult, FitError> {
    if problem.free_params.is_empty() {
        return Err(FitError::Problem("at least one free parameter is required".into()));
    }
    let mut search = Search { problem, evaluations: 0, best: None, any_finite: false, trace: Vec::new() };
    let unit: Vec<f64> = problem
        .free_params
        .iter()
        .zip(start)
        .map(|(p, v)| ((v - p.lower) / (p.upper - p.lower)).clamp(0.0, 1.0))
        .collect();
    search.simplex(unit.clone(), 0.1)?;
    for k in 1..problem.restarts {
        if search.exhausted() {
            break;
        }
        let Some((best, _, _)) = &search.best else { break };
        let base: Vec<f64> =
            problem.free_params.iter().zip(best).map(|(p, v)| (v - p.lower) / (p.upper - p.lower)).collect();
        let from: Vec<f64> =
            base.iter().zip(restart_offset(k, base.len())).map(|(b, o)| (b + o).clamp(0.0, 1.0)).collect();
        search.simplex(from, 0.05)?;
    }
    if !search.any_finite {
        return Err(FitError::AllEscaped);
    }
    let (params, loss, achieved) = search.best.expect("some evaluation succeeded");
    Ok(FitResult {
        best_params: problem.free_params.iter().map(|p| p.path.clone()).zip(params).collect(),
        loss,
        loss_trace: search.trace,
        achieved,
        evaluations: search.evaluations,
    })
}
