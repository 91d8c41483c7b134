use std::collections::BTreeMap;

use hetnet::dynamics::{kernel_shape, Simulator};
use hetnet::fit::{fit, fit_from, FitProblem, FitProblemFile, FreeParam, SpecSource, Target, Weights};
use hetnet::netspec::{NetworkSpec, Point};
use hetnet::presets::load_preset;

const BIAS: &str = "perturbations.k12.params.b";

/// Seeds spread over one input-scale period upstream of the section.
fn section_seeds(spec: &NetworkSpec, n: usize) -> Vec<Point> {
    let sim = Simulator::new(spec).unwrap();
    let s = sim.kernels().next().unwrap().1.input_scale;
    let [a, b] = spec.perturbations[0].section;
    let anchor = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    (0..n).map(|i| Point::new(anchor.x - (1.0 - (i as f64 + 0.5) / n as f64) * s, anchor.y)).collect()
}

fn positive_measure(spec: &NetworkSpec) -> f64 {
    let params = spec.perturbations[0].params;
    let n = 1_000_000;
    (0..n).filter(|i| kernel_shape(&params, (*i as f64 + 0.5) / n as f64) > 0.0).count() as f64 / n as f64
}

/// One passage per seed through the kicked connection, fitting the kernel bias.
fn branching_problem(seeds: usize, p_up: f64, max_evaluations: usize) -> FitProblem {
    let spec = load_preset("fig2-twosaddle-sine").unwrap();
    let seed_points = section_seeds(&spec, seeds);
    let target = Target {
        transitions: BTreeMap::from([(
            "p2".to_string(),
            BTreeMap::from([("up".to_string(), p_up), ("down".to_string(), 1.0 - p_up)]),
        )]),
        ..Target::default()
    };
    let file = FitProblemFile {
        spec: SpecSource::Preset { preset: "fig2-twosaddle-sine".into() },
        free_params: vec![FreeParam { path: BIAS.into(), lower: 0.0, upper: 1.0 / 3.0 }],
        target,
        weights: Weights::default(),
        budget: seeds as u64,
        seed_points,
        bins: vec![3.0, 30.0],
        restarts: 2,
        max_evaluations,
        tolerance: 0.0,
        burn_in_visits: 0,
        steps_per_transition: 100_000,
    };
    FitProblem::new(spec, file).unwrap()
}

fn up_fraction(problem: &FitProblem, b: f64) -> f64 {
    let stats = problem.simulate(&[b]).unwrap().unwrap();
    stats.probability("p2", "up").unwrap().unwrap()
}

#[test]
fn bias_sweep_recovers_the_generating_value() {
    let truth = load_preset("fig2-twosaddle-sine").unwrap();
    let b_star = truth.get_param(BIAS).unwrap();
    let problem = branching_problem(1000, positive_measure(&truth), 1);
    let grid: Vec<f64> = (0..=12).map(|k| k as f64 / 36.0).collect();
    let losses: Vec<f64> = grid.iter().map(|b| problem.loss(&[*b]).unwrap()).collect();
    let best = (0..grid.len()).min_by(|&i, &j| losses[i].total_cmp(&losses[j])).unwrap();
    assert!((grid[best] - b_star).abs() <= 1.0 / 36.0 + 1e-12, "argmin {} vs {b_star}: {losses:?}", grid[best]);
}

#[test]
fn self_target_loss_is_within_sampling_error() {
    let spec = load_preset("fig2-twosaddle-sine").unwrap();
    let budget = 400;
    let problem = branching_problem(budget, 0.5, 1);
    let b = spec.get_param(BIAS).unwrap();
    let p = up_fraction(&problem, b);
    let own = branching_problem(budget, p, 1);
    let loss = own.loss(&[b]).unwrap();
    assert!(loss >= 0.0 && loss <= 2.0 / (budget as f64).sqrt(), "{loss}");
}

#[test]
fn fit_result_is_consistent_and_reproducible() {
    let problem = branching_problem(200, 0.75, 14);
    let a = fit_from(&problem, &[0.05]).unwrap();
    let b = fit_from(&problem, &[0.05]).unwrap();
    assert_eq!(a.to_json().to_string(), b.to_json().to_string());

    let v = a.values();
    let bounds = &problem.free_params[0];
    assert!(v[0] >= bounds.lower && v[0] <= bounds.upper);
    assert!(a.loss >= 0.0);
    assert_eq!(a.loss, problem.loss(&v).unwrap());
    assert!(a.loss_trace.windows(2).all(|w| w[1] <= w[0]), "{:?}", a.loss_trace);
    assert!(a.evaluations <= problem.max_evaluations + 2);
    assert!(a.loss <= problem.loss(&[0.05]).unwrap());
}

#[test]
fn optimal_start_is_returned_unchanged() {
    let spec = load_preset("fig2-twosaddle-sine").unwrap();
    let b = spec.get_param(BIAS).unwrap();
    let probe = branching_problem(200, 0.5, 1);
    let problem = branching_problem(200, up_fraction(&probe, b), 20);
    let r = fit(&problem).unwrap();
    assert!(r.loss <= 1e-20, "{}", r.loss);
    assert!((r.values()[0] - b).abs() <= 1e-15, "{} vs {b}", r.values()[0]);
}

#[test]
fn problems_without_free_parameters_are_rejected() {
    let spec = load_preset("fig2-twosaddle-sine").unwrap();
    let mut problem = branching_problem(10, 0.5, 1);
    problem.free_params.clear();
    assert!(fit(&problem).is_err());
    let file = FitProblemFile {
        spec: SpecSource::Preset { preset: "fig2-twosaddle-sine".into() },
        free_params: Vec::new(),
        target: Target::default(),
        weights: Weights::default(),
        budget: 10,
        seed_points: Vec::new(),
        bins: vec![3.0, 30.0],
        restarts: 1,
        max_evaluations: 1,
        tolerance: 0.0,
        burn_in_visits: 0,
        steps_per_transition: 10,
    };
    let err = FitProblem::new(spec, file).unwrap_err().to_string();
    assert!(err.contains("free parameter"), "{err}");
}

#[test]
fn problem_files_name_known_states_and_paths() {
    let bad_state = r#"{"spec": {"preset": "nichols4"}, "free_params": [{"path": "perturbations.k_fr.params.b", "lower": 0, "upper": 0.5}],
        "target": {"transitions": {"nowhere": {"forward": 1.0}}}, "budget": 10}"#;
    let err = FitProblem::from_json(bad_state, std::path::Path::new(".")).unwrap_err().to_string();
    assert!(err.contains("unknown state"), "{err}");
    let bad_path = bad_state.replace("k_fr.params.b", "k_zz.params.b").replace("nowhere", "forward");
    assert!(FitProblem::from_json(&bad_path, std::path::Path::new(".")).is_err());
    let unnormalized = bad_state.replace("\"nowhere\": {\"forward\": 1.0}", "\"forward\": {\"reversal\": 0.5}");
    let err = FitProblem::from_json(&unnormalized, std::path::Path::new(".")).unwrap_err().to_string();
    assert!(err.contains("sums to"), "{err}");
}
