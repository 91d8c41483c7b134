use std::path::Path;
use std::process::{Command, Output};

use hetnet::analysis::LabeledTrajectory;
use hetnet::dynamics::kernel_shape;
use hetnet::netspec::{serialize, Format, NetworkSpec, Point};
use hetnet::presets::load_preset;
use serde_json::Value;
use tempfile::TempDir;

fn hetnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetnet")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_spec(dir: &TempDir, name: &str, spec: &NetworkSpec) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serialize(spec, Format::Toml)).unwrap();
    path_str(&path).to_string()
}

fn svg_root(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    doc.root_element().tag_name().name().to_string()
}

/// A trajectory CSV that sits `steps` rows on each listed fixed point.
fn visits_csv(spec: &NetworkSpec, ids: &[&str], steps: usize) -> String {
    let mut text = String::from("step,t,x,y\n");
    let mut i = 0;
    for id in ids {
        let p = spec.fixed_point(id).unwrap().position;
        for _ in 0..steps {
            text.push_str(&format!("{i},{},{},{}\n", i as f64 * spec.settings.dt, p.x, p.y));
            i += 1;
        }
    }
    text
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = hetnet(&["validate", "--preset", "fig1-cycle3"]);
    assert_eq!(code(&good), 0, "{}", stderr(&good));
    assert!(stdout(&good).starts_with("ok: fig1-cycle3"));

    let base = load_preset("fig1-cycle3").unwrap();
    let values: Vec<(String, f64)> =
        base.fixedpoints.iter().map(|f| (format!("fixedpoints.{}.lambda_s", f.id), -0.5 * f.lambda_u)).collect();
    let refs: Vec<(&str, f64)> = values.iter().map(|(p, v)| (p.as_str(), *v)).collect();
    let unstable = write_spec(&dir, "unstable.toml", &base.with_params(&refs).unwrap());
    let bad = hetnet(&["validate", &unstable]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("unstable cycle: ratio product 0.125"), "{}", stdout(&bad));

    let garbage = dir.path().join("garbage.toml");
    std::fs::write(&garbage, "version = 1\n[[fixedpoints]]\nid = 3\n").unwrap();
    assert_eq!(code(&hetnet(&["validate", path_str(&garbage)])), 2);
    assert_eq!(code(&hetnet(&["validate", "/nonexistent/spec.toml"])), 2);
    assert_eq!(code(&hetnet(&["validate"])), 2);
}

#[test]
fn simulate_writes_reproducible_csv() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let zero = hetnet(&["simulate", "--preset", "nichols4", "--steps", "0", "--out", path_str(&a)]);
    assert_eq!(code(&zero), 2);
    assert!(stderr(&zero).contains("n_steps must be ≥ 1"), "{}", stderr(&zero));

    for out in [&a, &b] {
        let r = hetnet(&["simulate", "--preset", "nichols4", "--steps", "5000", "--out", path_str(out)]);
        assert_eq!(code(&r), 0, "{}", stderr(&r));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert_eq!(text.lines().next(), Some("step,t,x,y"));
    assert_eq!(text.lines().count(), 1 + 5001);
    let events = std::fs::read_to_string(dir.path().join("a.events.csv")).unwrap();
    assert_eq!(events.lines().next(), Some("step,corridor,kick"));
    assert_eq!(events, std::fs::read_to_string(dir.path().join("b.events.csv")).unwrap());

    let moved =
        hetnet(&["simulate", "--preset", "nichols4", "--steps", "10", "--init", "-0.5,-0.2", "--out", path_str(&a)]);
    assert_eq!(code(&moved), 0, "{}", stderr(&moved));
    assert!(std::fs::read_to_string(&a).unwrap().lines().nth(1).unwrap().ends_with(",-0.5,-0.2"));
}

#[test]
fn stats_from_hand_built_trajectory() {
    let dir = TempDir::new().unwrap();
    let spec = load_preset("fig1-cycle3").unwrap();
    let ids: Vec<&str> = spec.fixedpoints.iter().map(|f| f.id.as_str()).collect();
    let order = [ids[0], ids[1], ids[2], ids[0], ids[1], ids[2]];
    let traj = dir.path().join("six.csv");
    std::fs::write(&traj, visits_csv(&spec, &order, 4)).unwrap();
    let out = dir.path().join("six.json");
    let r = hetnet(&["stats", "--preset", "fig1-cycle3", "--traj", path_str(&traj), "--out", path_str(&out)]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let names: Vec<&str> = doc["states"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    let at = |id: &str| names.iter().position(|n| *n == id).unwrap();
    let counts = &doc["transition_counts"];
    assert_eq!(counts[at(ids[0])][at(ids[1])], 2);
    assert_eq!(counts[at(ids[1])][at(ids[2])], 2);
    assert_eq!(counts[at(ids[2])][at(ids[0])], 1);
    assert_eq!(doc["visit_counts"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum::<u64>(), 6);
    assert_eq!(doc["mean_dwell"][ids[0]].as_f64().unwrap(), 4.0 * spec.settings.dt);

    // the same sequence counted in memory
    let lt = LabeledTrajectory::from_names(
        &ids,
        &order.iter().flat_map(|id| [*id; 4]).collect::<Vec<_>>(),
        spec.settings.dt,
    );
    let m = hetnet::analysis::transition_matrix(&lt).unwrap();
    assert_eq!(m.get(ids[2], ids[0]), Some(1.0));

    let still = dir.path().join("still.csv");
    std::fs::write(&still, visits_csv(&spec, &[ids[0]], 10)).unwrap();
    let r = hetnet(&["stats", "--preset", "fig1-cycle3", "--traj", path_str(&still)]);
    assert_eq!(code(&r), 1);
    assert!(stderr(&r).contains("empty stats"), "{}", stderr(&r));
    assert_eq!(code(&hetnet(&["stats", "--preset", "fig1-cycle3", "--steps", "0"])), 2);
}

#[test]
fn stats_ensemble_matches_branching_measure() {
    let spec = load_preset("fig2-twosaddle-sine").unwrap();
    let params = spec.perturbations[0].params;
    let n = 1_000_000;
    let measure =
        (0..n).filter(|i| kernel_shape(&params, (*i as f64 + 0.5) / n as f64) > 0.0).count() as f64 / n as f64;
    let r = hetnet(&[
        "stats",
        "--preset",
        "fig2-twosaddle-sine",
        "--init",
        "0.3,0",
        "--steps",
        "1800",
        "--seeds",
        "10000",
        "--spacing",
        "1e-5",
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let doc: Value = serde_json::from_str(&stdout(&r)).unwrap();
    let names: Vec<&str> = doc["states"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    let at = |id: &str| names.iter().position(|n| *n == id).unwrap();
    let up = doc["transition_matrix"][at("p2")][at("up")].as_f64().unwrap();
    assert!((up - measure).abs() <= 0.02, "{up} vs {measure}");
}

#[test]
fn fit_writes_result_and_spec() {
    let dir = TempDir::new().unwrap();
    let seeds: Vec<Point> = (0..40).map(|k| Point::new(2.59 + k as f64 * 2.5e-4, 0.0)).collect();
    let problem = serde_json::json!({
        "spec": {"preset": "fig2-twosaddle-sine"},
        "free_params": [{"path": "perturbations.k12.params.b", "lower": 0.0, "upper": 0.3333}],
        "target": {"transitions": {"p2": {"up": 0.75, "down": 0.25}}},
        "budget": 40,
        "seed_points": seeds,
        "burn_in_visits": 0,
        "restarts": 1,
        "max_evaluations": 6,
    });
    let path = dir.path().join("problem.json");
    std::fs::write(&path, problem.to_string()).unwrap();
    let out = dir.path().join("result.json");
    let r = hetnet(&["fit", path_str(&path), "--out", path_str(&out)]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let b = doc["best_params"][0]["value"].as_f64().unwrap();
    assert!((0.0..=0.3333).contains(&b));
    assert!(doc["loss"].as_f64().unwrap() >= 0.0);
    assert!(doc["evaluations"].as_u64().unwrap() <= 8);
    let fitted =
        hetnet::netspec::parse_spec(&std::fs::read_to_string(dir.path().join("result.spec.toml")).unwrap()).unwrap();
    assert_eq!(fitted.get_param("perturbations.k12.params.b").unwrap(), b);

    std::fs::write(&path, r#"{"spec": {"preset": "nichols4"}, "free_params": [], "target": {}, "budget": 1}"#).unwrap();
    assert_eq!(code(&hetnet(&["fit", path_str(&path), "--out", path_str(&out)])), 2);
}

#[test]
fn plots_are_well_formed_svg() {
    let dir = TempDir::new().unwrap();
    let traj = dir.path().join("run.csv");
    let stats = dir.path().join("run.json");
    assert_eq!(code(&hetnet(&["simulate", "--preset", "nichols4", "--steps", "40000", "--out", path_str(&traj)])), 0);
    assert_eq!(
        code(&hetnet(&["stats", "--preset", "nichols4", "--traj", path_str(&traj), "--out", path_str(&stats)])),
        0
    );
    let cases =
        [("phase", &traj, true), ("histogram", &stats, false), ("matrix", &stats, false), ("matrix", &traj, true)];
    for (i, (kind, input, needs_spec)) in cases.into_iter().enumerate() {
        let svg = dir.path().join(format!("{kind}{i}.svg"));
        let mut args = vec!["plot", path_str(input), "--kind", kind, "--out", path_str(&svg)];
        if needs_spec {
            args.extend(["--preset", "nichols4"]);
        }
        let r = hetnet(&args);
        assert_eq!(code(&r), 0, "{kind}: {}", stderr(&r));
        assert_eq!(svg_root(&svg), "svg");
    }
    let r = hetnet(&[
        "plot",
        path_str(&stats),
        "--kind",
        "phase",
        "--preset",
        "nichols4",
        "--out",
        path_str(&dir.path().join("x.svg")),
    ]);
    assert_eq!(code(&r), 2);
}

#[test]
fn preset_list_and_export() {
    let list = stdout(&hetnet(&["preset", "list"]));
    for name in hetnet::presets::names() {
        assert!(list.lines().any(|l| l.starts_with(name)), "{name}");
    }
    let dir = TempDir::new().unwrap();
    for (format, file) in [("toml", "n.toml"), ("json", "n.json")] {
        let path = dir.path().join(file);
        let r = hetnet(&["preset", "export", "nichols4", "--format", format, "--out", path_str(&path)]);
        assert_eq!(code(&r), 0, "{}", stderr(&r));
        let spec = hetnet::netspec::parse_spec(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(spec, load_preset("nichols4").unwrap());
        assert_eq!(code(&hetnet(&["validate", path_str(&path)])), 0);
    }
    let toml = stdout(&hetnet(&["preset", "export", "fig1-cycle3"]));
    assert_eq!(hetnet::netspec::parse_spec(&toml).unwrap(), load_preset("fig1-cycle3").unwrap());
    assert_eq!(code(&hetnet(&["preset", "export", "fig9"])), 2);
}
