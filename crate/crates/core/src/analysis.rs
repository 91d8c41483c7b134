//! Labeled state sequences and switching statistics.
//!
//! Every step is labeled with the fixed point whose disk contains it, the
//! named corridor whose tube contains it, or "in-between". Runs of a label
//! shorter than `min_visit` steps are grazing contacts and are dropped.
//! In-between gaps are then removed and consecutive runs of the same state
//! merged, giving the visit sequence that all statistics are computed from.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, Simulator, Trajectory};
use crate::netspec::{point_segment_distance, NetworkSpec, Point, DEFAULT_MIN_VISIT};

/// Index into the spec's state names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub u16);

pub const IN_BETWEEN: &str = "in-between";

/// Default dwell bin edges, in time units.
pub const DEFAULT_BINS: [f64; 2] = [3.0, 30.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no transitions observed")]
    EmptyStats,
    #[error("unknown state \"{0}\"")]
    UnknownState(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("bin edges must be positive and strictly increasing")]
    BadBins,
}

#[derive(Clone, Debug)]
struct Tube {
    state: StateId,
    path: Vec<Point>,
    radius: f64,
}

/// Point-to-state classifier compiled from a spec.
#[derive(Clone, Debug)]
pub struct Labeler {
    states: Vec<String>,
    disks: Vec<(Point, f64, StateId)>,
    tubes: Vec<Tube>,
}

impl Labeler {
    pub fn new(spec: &NetworkSpec) -> Self {
        let states = spec.state_names();
        let id = |name: &str| StateId(states.iter().position(|s| s == name).expect("state listed") as u16);
        let disks =
            spec.fixedpoints.iter().map(|f| (f.position, f.region_radius * f.region_radius, id(&f.id))).collect();
        let tubes = spec
            .corridors
            .iter()
            .filter_map(|c| {
                let state = c.state.as_deref()?;
                Some(Tube { state: id(state), path: c.path.clone(), radius: c.tube_radius? })
            })
            .collect();
        Labeler { states, disks, tubes }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Result<StateId, AnalysisError> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u16))
            .ok_or_else(|| AnalysisError::UnknownState(name.to_string()))
    }

    pub fn classify(&self, p: Point) -> Option<StateId> {
        for &(c, r2, id) in &self.disks {
            let (dx, dy) = (p.x - c.x, p.y - c.y);
            if dx * dx + dy * dy < r2 {
                return Some(id);
            }
        }
        for t in &self.tubes {
            if t.path.windows(2).any(|w| point_segment_distance(p, w[0], w[1]) <= t.radius) {
                return Some(t.state);
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledTrajectory {
    pub states: Vec<String>,
    /// `None` marks an in-between step.
    pub labels: Vec<Option<StateId>>,
    pub dt: f64,
}

impl LabeledTrajectory {
    /// Build from state names; any name not in `states` is treated as in-between.
    pub fn from_names(states: &[&str], names: &[&str], dt: f64) -> Self {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let labels = names.iter().map(|n| states.iter().position(|s| s == n).map(|i| StateId(i as u16))).collect();
        LabeledTrajectory { states, labels, dt }
    }

    pub fn name(&self, label: Option<StateId>) -> &str {
        label.map_or(IN_BETWEEN, |s| self.states[s.0 as usize].as_str())
    }

    fn state_id(&self, name: &str) -> Result<StateId, AnalysisError> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u16))
            .ok_or_else(|| AnalysisError::UnknownState(name.to_string()))
    }
}

pub fn label(spec: &NetworkSpec, traj: &Trajectory) -> LabeledTrajectory {
    let labeler = Labeler::new(spec);
    LabeledTrajectory {
        labels: traj.points.iter().map(|p| labeler.classify(*p)).collect(),
        states: labeler.states,
        dt: traj.dt,
    }
}

/// A maximal run of one state label, in steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    pub state: StateId,
    pub steps: u64,
}

/// Streaming run detector; emits runs of at least `min_visit` steps.
#[derive(Clone, Debug)]
pub struct RunTracker {
    min_visit: u64,
    current: Option<StateId>,
    length: u64,
    gap: u64,
}

impl RunTracker {
    pub fn new(min_visit: usize) -> Self {
        RunTracker { min_visit: min_visit as u64, current: None, length: 0, gap: 0 }
    }

    /// Feed one label; returns the run it completes, if any.
    pub fn push(&mut self, label: Option<StateId>) -> Option<Run> {
        if label == self.current {
            self.length += 1;
            return None;
        }
        let done = self.take();
        self.current = label;
        self.length = 1;
        done
    }

    pub fn finish(&mut self) -> Option<Run> {
        let done = self.take();
        self.current = None;
        self.length = 0;
        done
    }

    fn take(&mut self) -> Option<Run> {
        match self.current {
            Some(state) if self.length >= self.min_visit => Some(Run { state, steps: self.length }),
            _ => {
                self.gap += self.length;
                None
            }
        }
    }
}

/// Maximal runs of identical state labels as (state, duration) pairs.
pub fn dwell_times(lt: &LabeledTrajectory) -> Vec<(String, f64)> {
    dwell_times_with(lt, DEFAULT_MIN_VISIT)
}

pub fn dwell_times_with(lt: &LabeledTrajectory, min_visit: usize) -> Vec<(String, f64)> {
    let mut tracker = RunTracker::new(min_visit);
    let mut out = Vec::new();
    for &l in &lt.labels {
        if let Some(run) = tracker.push(l) {
            out.push((lt.states[run.state.0 as usize].clone(), run.steps as f64 * lt.dt));
        }
    }
    if let Some(run) = tracker.finish() {
        out.push((lt.states[run.state.0 as usize].clone(), run.steps as f64 * lt.dt));
    }
    out
}

fn bin_index(edges: &[f64], t: f64) -> usize {
    edges.iter().position(|&e| t < e).unwrap_or(edges.len())
}

fn check_bins(edges: &[f64]) -> Result<(), AnalysisError> {
    let increasing = edges.windows(2).all(|w| w[0] < w[1]);
    if increasing && edges.iter().all(|e| e.is_finite() && *e > 0.0) {
        Ok(())
    } else {
        Err(AnalysisError::BadBins)
    }
}

fn normalize(counts: &[u64]) -> Option<Vec<f64>> {
    let total: u64 = counts.iter().sum();
    (total > 0).then(|| counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// Counts from which every switching statistic is derived. Counts add, so
/// ensemble results merge by summation in a fixed order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchingStats {
    pub states: Vec<String>,
    pub dt: f64,
    pub bin_edges: Vec<f64>,
    /// `[from][to]` transition counts between consecutive visits.
    pub transition_counts: Vec<Vec<u64>>,
    /// `[state][bin]` visit counts by dwell time.
    pub dwell_counts: Vec<Vec<u64>>,
    /// `[state][bin][successor]` exits by dwell bin.
    pub exit_counts: Vec<Vec<Vec<u64>>>,
    /// `[previous][state][next]` counts of visit triples.
    pub history_counts: Vec<Vec<Vec<u64>>>,
    pub visit_counts: Vec<u64>,
    /// Total dwell time per state.
    pub dwell_total: Vec<f64>,
    pub steps: u64,
    /// Steps spent in-between or in grazing runs.
    pub gap_steps: u64,
}

impl SwitchingStats {
    pub fn empty(states: Vec<String>, dt: f64, bin_edges: Vec<f64>) -> Self {
        let n = states.len();
        let nb = bin_edges.len() + 1;
        SwitchingStats {
            transition_counts: vec![vec![0; n]; n],
            dwell_counts: vec![vec![0; nb]; n],
            exit_counts: vec![vec![vec![0; n]; nb]; n],
            history_counts: vec![vec![vec![0; n]; n]; n],
            visit_counts: vec![0; n],
            dwell_total: vec![0.0; n],
            steps: 0,
            gap_steps: 0,
            states,
            dt,
            bin_edges,
        }
    }

    pub fn index(&self, name: &str) -> Result<usize, AnalysisError> {
        self.states.iter().position(|s| s == name).ok_or_else(|| AnalysisError::UnknownState(name.to_string()))
    }

    pub fn total_transitions(&self) -> u64 {
        self.transition_counts.iter().flatten().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_transitions() == 0
    }

    /// Row-stochastic matrix; rows of states never left are `None`.
    pub fn transition_matrix(&self) -> Vec<Option<Vec<f64>>> {
        self.transition_counts.iter().map(|row| normalize(row)).collect()
    }

    pub fn probability(&self, from: &str, to: &str) -> Result<Option<f64>, AnalysisError> {
        let (i, j) = (self.index(from)?, self.index(to)?);
        Ok(normalize(&self.transition_counts[i]).map(|row| row[j]))
    }

    /// Fraction of visits to `state` per dwell bin.
    pub fn dwell_fractions(&self, state: &str) -> Result<Option<Vec<f64>>, AnalysisError> {
        Ok(normalize(&self.dwell_counts[self.index(state)?]))
    }

    /// Fraction of exits from `state` per dwell bin.
    pub fn exit_bin_fractions(&self, state: &str) -> Result<Option<Vec<f64>>, AnalysisError> {
        let i = self.index(state)?;
        let per_bin: Vec<u64> = self.exit_counts[i].iter().map(|b| b.iter().sum()).collect();
        Ok(normalize(&per_bin))
    }

    /// Successor distribution of `state` within each dwell bin.
    pub fn exit_fractions(&self, state: &str) -> Result<Vec<Option<Vec<f64>>>, AnalysisError> {
        let i = self.index(state)?;
        Ok(self.exit_counts[i].iter().map(|b| normalize(b)).collect())
    }

    pub fn mean_dwell(&self, state: &str) -> Result<Option<f64>, AnalysisError> {
        let i = self.index(state)?;
        let n = self.visit_counts[i];
        Ok((n > 0).then(|| self.dwell_total[i] / n as f64))
    }

    pub fn history(&self, state: &str) -> Result<HistoryTable, AnalysisError> {
        let i = self.index(state)?;
        let counts: Vec<Vec<u64>> = (0..self.states.len()).map(|p| self.history_counts[p][i].clone()).collect();
        HistoryTable::from_counts(self.states.clone(), state.to_string(), counts)
    }

    pub fn merge(&mut self, other: &SwitchingStats) {
        assert_eq!(self.states, other.states, "merging stats over different state sets");
        assert_eq!(self.bin_edges, other.bin_edges, "merging stats with different bins");
        let add = |a: &mut Vec<u64>, b: &Vec<u64>| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        for (a, b) in self.transition_counts.iter_mut().zip(&other.transition_counts) {
            add(a, b);
        }
        for (a, b) in self.dwell_counts.iter_mut().zip(&other.dwell_counts) {
            add(a, b);
        }
        for (a, b) in self.exit_counts.iter_mut().zip(&other.exit_counts) {
            for (x, y) in a.iter_mut().zip(b) {
                add(x, y);
            }
        }
        for (a, b) in self.history_counts.iter_mut().zip(&other.history_counts) {
            for (x, y) in a.iter_mut().zip(b) {
                add(x, y);
            }
        }
        add(&mut self.visit_counts, &other.visit_counts);
        for (a, b) in self.dwell_total.iter_mut().zip(&other.dwell_total) {
            *a += b;
        }
        self.steps += other.steps;
        self.gap_steps += other.gap_steps;
    }

    /// Export document with derived fractions alongside the raw counts.
    pub fn to_json(&self) -> serde_json::Value {
        let matrix: Vec<serde_json::Value> = self
            .transition_matrix()
            .into_iter()
            .map(|r| r.map_or(serde_json::Value::Null, |v| serde_json::json!(v)))
            .collect();
        let per_state = |f: &dyn Fn(&str) -> serde_json::Value| -> serde_json::Map<String, serde_json::Value> {
            self.states.iter().map(|s| (s.clone(), f(s))).collect()
        };
        serde_json::json!({
            "empty": self.is_empty(),
            "states": self.states,
            "dt": self.dt,
            "bin_edges": self.bin_edges,
            "transition_matrix": matrix,
            "transition_counts": self.transition_counts,
            "visit_counts": self.visit_counts,
            "dwell_histograms": per_state(&|s| serde_json::json!(self.dwell_counts[self.index(s).unwrap()])),
            "dwell_fractions": per_state(&|s| serde_json::json!(self.dwell_fractions(s).unwrap())),
            "mean_dwell": per_state(&|s| serde_json::json!(self.mean_dwell(s).unwrap())),
            "exit_counts": per_state(&|s| serde_json::json!(self.exit_counts[self.index(s).unwrap()])),
            "exit_fractions": per_state(&|s| serde_json::json!(self.exit_fractions(s).unwrap())),
            "steps": self.steps,
            "gap_steps": self.gap_steps,
        })
    }

    /// Flattened `section,state,bin,target,value` rows for spreadsheets.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "section,state,bin,target,value")?;
        for (i, row) in self.transition_matrix().iter().enumerate() {
            if let Some(row) = row {
                for (j, p) in row.iter().enumerate() {
                    writeln!(w, "transition,{},,{},{}", self.states[i], self.states[j], p)?;
                }
            }
        }
        for (i, s) in self.states.iter().enumerate() {
            writeln!(w, "visits,{s},,,{}", self.visit_counts[i])?;
            for (b, c) in self.dwell_counts[i].iter().enumerate() {
                writeln!(w, "dwell,{s},{b},,{c}")?;
            }
            for (b, bin) in self.exit_counts[i].iter().enumerate() {
                for (j, c) in bin.iter().enumerate() {
                    if *c > 0 {
                        writeln!(w, "exit,{s},{b},{},{c}", self.states[j])?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Successor distribution at one state split by predecessor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistoryTable {
    pub states: Vec<String>,
    pub state: String,
    /// `[previous][next]` counts.
    pub counts: Vec<Vec<u64>>,
    /// `[previous]` conditional successor distribution.
    pub rows: Vec<Option<Vec<f64>>>,
}

impl HistoryTable {
    fn from_counts(states: Vec<String>, state: String, counts: Vec<Vec<u64>>) -> Result<Self, AnalysisError> {
        let total: u64 = counts.iter().flatten().sum();
        if total < 2 {
            return Err(AnalysisError::Insufficient(format!("{total} surrounded visits to \"{state}\"")));
        }
        let rows = counts.iter().map(|r| normalize(r)).collect();
        Ok(HistoryTable { states, state, counts, rows })
    }

    pub fn row(&self, previous: &str) -> Option<&Vec<f64>> {
        let i = self.states.iter().position(|s| s == previous)?;
        self.rows[i].as_ref()
    }

    /// Successor distribution ignoring the predecessor.
    pub fn marginal(&self) -> Vec<f64> {
        let n = self.states.len();
        let sums: Vec<u64> = (0..n).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect();
        normalize(&sums).unwrap_or_else(|| vec![0.0; n])
    }

    /// Number of triples with the given predecessor.
    pub fn support(&self, previous: &str) -> u64 {
        self.states.iter().position(|s| s == previous).map_or(0, |i| self.counts[i].iter().sum())
    }
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Turns runs into visits and accumulates statistics.
#[derive(Clone, Debug)]
pub struct StatsAccumulator {
    stats: SwitchingStats,
    burn_in: usize,
    visits_seen: usize,
    /// Visit before the current one.
    previous: Option<StateId>,
    /// Current (possibly still growing) visit.
    current: Option<(StateId, u64)>,
}

impl StatsAccumulator {
    pub fn new(states: Vec<String>, dt: f64, bin_edges: Vec<f64>, burn_in: usize) -> Result<Self, AnalysisError> {
        check_bins(&bin_edges)?;
        Ok(StatsAccumulator {
            stats: SwitchingStats::empty(states, dt, bin_edges),
            burn_in,
            visits_seen: 0,
            previous: None,
            current: None,
        })
    }

    pub fn transitions(&self) -> u64 {
        self.stats.total_transitions()
    }

    pub fn push_run(&mut self, run: Run) {
        match self.current {
            Some((state, steps)) if state == run.state => {
                self.current = Some((state, steps + run.steps));
            }
            Some(_) => {
                self.close(Some(run.state));
                self.current = Some((run.state, run.steps));
            }
            None => self.current = Some((run.state, run.steps)),
        }
    }

    fn close(&mut self, next: Option<StateId>) {
        let Some((state, steps)) = self.current else { return };
        let index = self.visits_seen;
        self.visits_seen += 1;
        if index >= self.burn_in {
            let s = &mut self.stats;
            let i = state.0 as usize;
            let t = steps as f64 * s.dt;
            let bin = bin_index(&s.bin_edges, t);
            s.visit_counts[i] += 1;
            s.dwell_total[i] += t;
            s.dwell_counts[i][bin] += 1;
            if let Some(next) = next {
                let j = next.0 as usize;
                s.transition_counts[i][j] += 1;
                s.exit_counts[i][bin][j] += 1;
                if let Some(prev) = self.previous {
                    s.history_counts[prev.0 as usize][i][j] += 1;
                }
            }
        }
        self.previous = Some(state);
    }

    pub fn add_steps(&mut self, steps: u64, gap: u64) {
        self.stats.steps += steps;
        self.stats.gap_steps += gap;
    }

    pub fn finish(mut self) -> SwitchingStats {
        self.close(None);
        self.stats
    }
}

/// Full statistics of a labeled trajectory.
pub fn switching_stats(
    lt: &LabeledTrajectory,
    bin_edges: &[f64],
    min_visit: usize,
) -> Result<SwitchingStats, AnalysisError> {
    let mut acc = StatsAccumulator::new(lt.states.clone(), lt.dt, bin_edges.to_vec(), 0)?;
    let mut tracker = RunTracker::new(min_visit);
    for &l in &lt.labels {
        if let Some(run) = tracker.push(l) {
            acc.push_run(run);
        }
    }
    if let Some(run) = tracker.finish() {
        acc.push_run(run);
    }
    acc.add_steps(lt.labels.len() as u64, tracker.gap);
    Ok(acc.finish())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionMatrix {
    pub states: Vec<String>,
    pub counts: Vec<Vec<u64>>,
    pub rows: Vec<Option<Vec<f64>>>,
}

impl TransitionMatrix {
    pub fn get(&self, from: &str, to: &str) -> Option<f64> {
        let i = self.states.iter().position(|s| s == from)?;
        let j = self.states.iter().position(|s| s == to)?;
        self.rows[i].as_ref().map(|r| r[j])
    }
}

pub fn transition_matrix(lt: &LabeledTrajectory) -> Result<TransitionMatrix, AnalysisError> {
    let stats = switching_stats(lt, &DEFAULT_BINS, DEFAULT_MIN_VISIT)?;
    if stats.is_empty() {
        return Err(AnalysisError::EmptyStats);
    }
    Ok(TransitionMatrix { rows: stats.transition_matrix(), counts: stats.transition_counts, states: stats.states })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitTable {
    pub bin_edges: Vec<f64>,
    pub successors: Vec<String>,
    /// `[bin][successor]` counts.
    pub counts: Vec<Vec<u64>>,
    /// Per-bin successor fractions; `None` for empty bins.
    pub fractions: Vec<Option<Vec<f64>>>,
    /// Share of all exits falling in each bin.
    pub bin_mass: Vec<f64>,
}

pub fn dwell_conditioned_exits(lt: &LabeledTrajectory, state: &str, bins: &[f64]) -> Result<ExitTable, AnalysisError> {
    lt.state_id(state)?;
    let stats = switching_stats(lt, bins, DEFAULT_MIN_VISIT)?;
    exit_table(&stats, state)
}

pub fn exit_table(stats: &SwitchingStats, state: &str) -> Result<ExitTable, AnalysisError> {
    let i = stats.index(state)?;
    let counts = stats.exit_counts[i].clone();
    let per_bin: Vec<u64> = counts.iter().map(|b| b.iter().sum()).collect();
    let total: u64 = per_bin.iter().sum();
    Ok(ExitTable {
        bin_edges: stats.bin_edges.clone(),
        successors: stats.states.clone(),
        fractions: counts.iter().map(|b| normalize(b)).collect(),
        bin_mass: per_bin.iter().map(|&c| if total > 0 { c as f64 / total as f64 } else { 0.0 }).collect(),
        counts,
    })
}

pub fn history_dependence(lt: &LabeledTrajectory, state: &str) -> Result<HistoryTable, AnalysisError> {
    lt.state_id(state)?;
    switching_stats(lt, &DEFAULT_BINS, DEFAULT_MIN_VISIT)?.history(state)
}

/// Ensemble run configuration; each seed is simulated independently.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub seeds: Vec<Point>,
    /// Stop a seed once it has produced this many transitions.
    pub transitions_per_seed: Option<u64>,
    /// Hard cap on steps per seed.
    pub max_steps_per_seed: u64,
    /// Leading visits of each seed excluded from the statistics.
    pub burn_in_visits: usize,
    pub bin_edges: Vec<f64>,
}

/// Simulate one seed and accumulate its statistics without storing the path.
pub fn run_seed(
    sim: &Simulator,
    labeler: &Labeler,
    min_visit: usize,
    seed: Point,
    cfg: &EnsembleConfig,
) -> Result<SwitchingStats, DynamicsError> {
    let mut acc = StatsAccumulator::new(labeler.states().to_vec(), sim.dt(), cfg.bin_edges.clone(), cfg.burn_in_visits)
        .expect("bins checked by caller");
    let mut tracker = RunTracker::new(min_visit);
    let mut state = sim.start(seed)?;
    if let Some(run) = tracker.push(labeler.classify(seed)) {
        acc.push_run(run);
    }
    let target = cfg.transitions_per_seed.unwrap_or(u64::MAX);
    let mut steps = 1;
    while steps <= cfg.max_steps_per_seed {
        sim.advance_state(&mut state)?;
        steps += 1;
        if let Some(run) = tracker.push(labeler.classify(state.point)) {
            acc.push_run(run);
            if acc.transitions() >= target {
                break;
            }
        }
    }
    if let Some(run) = tracker.finish() {
        acc.push_run(run);
    }
    acc.add_steps(steps, tracker.gap);
    Ok(acc.finish())
}

/// Ensemble statistics, reduced in seed order so the result does not depend
/// on how many threads evaluate the seeds.
pub fn ensemble_stats(spec: &NetworkSpec, cfg: &EnsembleConfig) -> Result<SwitchingStats, DynamicsError> {
    check_bins(&cfg.bin_edges).map_err(|_| DynamicsError::BadSection("invalid bin edges".into()))?;
    let sim = Simulator::new(spec)?;
    let labeler = Labeler::new(spec);
    let min_visit = spec.settings.min_visit;
    let per_seed: Vec<Result<SwitchingStats, DynamicsError>> =
        cfg.seeds.par_iter().map(|&seed| run_seed(&sim, &labeler, min_visit, seed, cfg)).collect();
    let mut total = SwitchingStats::empty(labeler.states().to_vec(), sim.dt(), cfg.bin_edges.clone());
    for r in per_seed {
        total.merge(&r?);
    }
    Ok(total)
}

/// Deterministic lattice of `n` seeds: `center + (i - (n-1)/2) * spacing` along `direction`.
pub fn seed_line(center: Point, direction: (f64, f64), spacing: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let k = i as f64 - (n as f64 - 1.0) / 2.0;
            Point::new(center.x + k * spacing * direction.0, center.y + k * spacing * direction.1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRT: [&str; 3] = ["F", "R", "T"];

    #[test]
    fn dwell_examples() {
        let lt = LabeledTrajectory::from_names(&FRT, &["F", "F", "F", "ib", "R", "R"], 1.0);
        assert_eq!(dwell_times(&lt), vec![("F".to_string(), 3.0), ("R".to_string(), 2.0)]);
        let lt = LabeledTrajectory::from_names(&FRT, &["ib", "ib", "ib"], 1.0);
        assert!(dwell_times(&lt).is_empty());
    }

    #[test]
    fn grazing_runs_are_dropped() {
        let lt = LabeledTrajectory::from_names(&FRT, &["F", "F", "R", "F", "F"], 1.0);
        assert_eq!(dwell_times(&lt), vec![("F".to_string(), 2.0), ("F".to_string(), 2.0)]);
    }

    fn visits(seq: &[&str], per: usize, gap: usize) -> LabeledTrajectory {
        let mut names = Vec::new();
        for s in seq {
            names.extend(std::iter::repeat_n(*s, per));
            names.extend(std::iter::repeat_n("ib", gap));
        }
        LabeledTrajectory::from_names(&FRT, &names, 1.0)
    }

    #[test]
    fn cyclic_sequence_gives_deterministic_matrix() {
        let tm = transition_matrix(&visits(&["F", "R", "T", "F", "R", "T"], 3, 1)).unwrap();
        assert_eq!(tm.get("F", "R"), Some(1.0));
        assert_eq!(tm.get("R", "T"), Some(1.0));
        assert_eq!(tm.get("T", "F"), Some(1.0));
    }

    #[test]
    fn single_visit_is_empty() {
        assert_eq!(transition_matrix(&visits(&["F"], 4, 0)), Err(AnalysisError::EmptyStats));
    }

    #[test]
    fn gaps_do_not_change_transitions() {
        let seq = ["F", "R", "T", "F", "T", "R", "F"];
        assert_eq!(transition_matrix(&visits(&seq, 3, 0)).unwrap(), transition_matrix(&visits(&seq, 3, 17)).unwrap());
    }

    #[test]
    fn exits_by_bin() {
        let states = ["F", "R", "Q"];
        let mut names = vec!["F"; 1];
        names.extend(["F"; 0]);
        // F for 1 s (two 0.5 s steps) then R, F for 40 s then Q
        let mut seq: Vec<&str> = vec!["F"; 2];
        seq.extend(vec!["R"; 4]);
        seq.extend(vec!["F"; 80]);
        seq.extend(vec!["Q"; 4]);
        let lt = LabeledTrajectory::from_names(&states, &seq, 0.5);
        let table = dwell_conditioned_exits(&lt, "F", &[3.0, 30.0]).unwrap();
        assert_eq!(table.fractions[0], Some(vec![0.0, 1.0, 0.0]));
        assert_eq!(table.fractions[1], None);
        assert_eq!(table.fractions[2], Some(vec![0.0, 0.0, 1.0]));
        let none = dwell_conditioned_exits(&lt, "Q", &[3.0, 30.0]).unwrap();
        assert!(none.fractions.iter().all(Option::is_none));
        let _ = names;
    }

    #[test]
    fn history_rows() {
        // R always followed by T
        let lt = visits(&["F", "R", "T", "F", "R", "T", "R", "T", "F", "R", "T"], 2, 0);
        let h = history_dependence(&lt, "R").unwrap();
        assert_eq!(h.row("F"), Some(&vec![0.0, 0.0, 1.0]));
        assert_eq!(h.row("T"), Some(&vec![0.0, 0.0, 1.0]));
        assert!(matches!(history_dependence(&visits(&["F", "R"], 2, 0), "R"), Err(AnalysisError::Insufficient(_))));
    }

    #[test]
    fn histogram_counts_match_visits() {
        let lt = visits(&["F", "R", "T", "F", "T", "R", "F"], 5, 2);
        let s = switching_stats(&lt, &[3.0, 30.0], 2).unwrap();
        for i in 0..3 {
            assert_eq!(s.dwell_counts[i].iter().sum::<u64>(), s.visit_counts[i]);
        }
    }

    #[test]
    fn bad_bins_rejected() {
        let lt = visits(&["F", "R"], 2, 0);
        assert_eq!(dwell_conditioned_exits(&lt, "F", &[30.0, 3.0]), Err(AnalysisError::BadBins));
    }
}
