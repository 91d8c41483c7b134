use hetnet::analysis::{
    dwell_conditioned_exits, dwell_times, ensemble_stats, history_dependence, label, switching_stats, total_variation,
    transition_matrix, AnalysisError, EnsembleConfig, LabeledTrajectory,
};
use hetnet::dynamics::{advance, Trajectory};
use hetnet::netspec::Point;
use hetnet::presets::load_preset;
use proptest::prelude::*;

const STATES: [&str; 4] = ["F", "R", "T", "Q"];

/// Runs of (state index or in-between, length) expanded to one name per step.
fn expand(runs: &[(usize, usize)]) -> Vec<&'static str> {
    runs.iter().flat_map(|&(s, n)| std::iter::repeat_n(STATES.get(s).copied().unwrap_or("-"), n)).collect()
}

fn runs() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..5, 1usize..60), 0..120)
}

#[test]
fn hand_counted_examples() {
    let lt = LabeledTrajectory::from_names(&STATES, &["F", "F", "F", "-", "R", "R"], 1.0);
    assert_eq!(dwell_times(&lt), vec![("F".to_string(), 3.0), ("R".to_string(), 2.0)]);
    assert!(dwell_times(&LabeledTrajectory::from_names(&STATES, &["-", "-", "-"], 1.0)).is_empty());

    let visits = ["F", "F", "R", "R", "T", "T", "F", "F", "R", "R", "T", "T"];
    let m = transition_matrix(&LabeledTrajectory::from_names(&STATES, &visits, 1.0)).unwrap();
    for (a, b) in [("F", "R"), ("R", "T"), ("T", "F")] {
        assert_eq!(m.get(a, b), Some(1.0));
    }
    assert_eq!(m.get("Q", "F"), None);
    let single = LabeledTrajectory::from_names(&STATES, &["F", "F", "F"], 1.0);
    assert!(matches!(transition_matrix(&single), Err(AnalysisError::EmptyStats)));
}

#[test]
fn hand_counted_exits() {
    let names: Vec<&str> = ["F", "F", "R", "R"].into_iter().chain(["F"; 40]).chain(["Q", "Q"]).collect();
    let lt = LabeledTrajectory::from_names(&STATES, &names, 1.0);
    let t = dwell_conditioned_exits(&lt, "F", &[3.0, 30.0]).unwrap();
    let r = STATES.iter().position(|s| *s == "R").unwrap();
    let q = STATES.iter().position(|s| *s == "Q").unwrap();
    assert_eq!(t.fractions[0].as_ref().unwrap()[r], 1.0);
    assert_eq!(t.fractions[1], None);
    assert_eq!(t.fractions[2].as_ref().unwrap()[q], 1.0);
    let none = dwell_conditioned_exits(&lt, "T", &[3.0, 30.0]).unwrap();
    assert!(none.fractions.iter().all(Option::is_none));
}

#[test]
fn history_examples() {
    // R always goes to T whatever came before it
    let seq: Vec<&str> =
        ["F", "F", "R", "R", "T", "T", "Q", "Q", "R", "R", "T", "T", "F", "F", "R", "R", "T", "T"].to_vec();
    let h = history_dependence(&LabeledTrajectory::from_names(&STATES, &seq, 1.0), "R").unwrap();
    assert_eq!(h.row("F"), h.row("Q"));
    // deterministic cycle gives deterministic rows
    let cyc: Vec<&str> = ["F", "F", "R", "R", "T", "T"].repeat(5);
    let h = history_dependence(&LabeledTrajectory::from_names(&STATES, &cyc, 1.0), "R").unwrap();
    assert_eq!(h.row("F").unwrap(), &vec![0.0, 0.0, 1.0, 0.0]);
    let short = LabeledTrajectory::from_names(&STATES, &["F", "F"], 1.0);
    assert!(matches!(history_dependence(&short, "F"), Err(AnalysisError::Insufficient(_))));
}

#[test]
fn labels_follow_regions() {
    let spec = load_preset("nichols4").unwrap();
    let traj = Trajectory {
        t0: 0.0,
        dt: spec.settings.dt,
        points: vec![spec.fixed_point("reversal").unwrap().position, Point::new(3.0, -2.0)],
        events: Vec::new(),
    };
    let lt = label(&spec, &traj);
    assert_eq!(lt.name(lt.labels[0]), "reversal");
    assert_eq!(lt.name(lt.labels[1]), "in-between");
    assert_eq!(lt.labels.len(), traj.points.len());
}

#[test]
fn nichols_turns_sit_between_reversal_and_forward() {
    let spec = load_preset("nichols4").unwrap();
    let traj = advance(&spec, spec.settings.init.unwrap(), 400_000).unwrap();
    let lt = label(&spec, &traj);
    let visits: Vec<String> = dwell_times(&lt).into_iter().map(|(s, _)| s).collect();
    assert!(visits.windows(3).any(|w| w == ["reversal", "turn", "forward"]), "{visits:?}");
    // every turn is preceded by reversal and followed by forward
    for (i, _) in visits.iter().enumerate().filter(|(_, v)| *v == "turn") {
        if i > 0 {
            assert_eq!(visits[i - 1], "reversal");
        }
        if i + 1 < visits.len() {
            assert_eq!(visits[i + 1], "forward");
        }
    }
}

#[test]
fn distinct_kernels_into_reversal_split_its_history() {
    let spec = load_preset("nichols4")
        .unwrap()
        .with_params(&[("perturbations.k_fr.params.b", 0.42), ("perturbations.k_qr.params.b", -0.45)])
        .unwrap();
    let seeds: Vec<Point> = (0..8).map(|k| Point::new(2.0 + 0.01 * k as f64, 0.2 - 0.02 * k as f64)).collect();
    let cfg = EnsembleConfig {
        seeds,
        transitions_per_seed: Some(500),
        max_steps_per_seed: 50_000_000,
        burn_in_visits: 2,
        bin_edges: vec![3.0, 30.0],
    };
    let stats = ensemble_stats(&spec, &cfg).unwrap();
    let h = stats.history("reversal").unwrap();
    assert!(h.support("quiescence") >= 20);
    let tv = total_variation(h.row("forward").unwrap(), h.row("quiescence").unwrap());
    assert!(tv > 0.1, "{tv}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn statistics_invariants(r in runs(), min_visit in 1usize..4) {
        let names = expand(&r);
        let lt = LabeledTrajectory::from_names(&STATES, &names, 0.1);
        let stats = switching_stats(&lt, &[0.5, 3.0], min_visit).unwrap();
        for (i, row) in stats.transition_matrix().iter().enumerate() {
            let out: u64 = stats.transition_counts[i].iter().sum();
            match row {
                Some(row) => prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9),
                None => prop_assert_eq!(out, 0),
            }
        }
        for (i, state) in STATES.iter().enumerate() {
            prop_assert_eq!(stats.dwell_counts[i].iter().sum::<u64>(), stats.visit_counts[i]);
            for bin in stats.exit_fractions(state).unwrap().into_iter().flatten() {
                prop_assert!((bin.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn in_between_gaps_do_not_change_transitions(r in runs(), pad in prop::collection::vec(0usize..30, 120)) {
        let base = switching_stats(&LabeledTrajectory::from_names(&STATES, &expand(&r), 1.0), &[3.0, 30.0], 2).unwrap();
        // widen every in-between run and add fresh gaps between distinct visits
        let mut merged: Vec<(usize, usize)> = Vec::new();
        for &(s, n) in &r {
            match merged.last_mut() {
                Some(last) if last.0 == s || (last.0 >= STATES.len() && s >= STATES.len()) => last.1 += n,
                _ => merged.push((s, n)),
            }
        }
        let mut padded = Vec::new();
        for (k, &(s, n)) in merged.iter().enumerate() {
            padded.push((s, if s >= STATES.len() { n + pad[k] } else { n }));
            padded.push((4, pad[(k + 7) % pad.len()]));
        }
        let padded: Vec<(usize, usize)> = padded.into_iter().filter(|&(_, n)| n > 0).collect();
        let wide = switching_stats(&LabeledTrajectory::from_names(&STATES, &expand(&padded), 1.0), &[3.0, 30.0], 2).unwrap();
        prop_assert_eq!(base.transition_counts, wide.transition_counts);
        prop_assert_eq!(base.visit_counts, wide.visit_counts);
    }

    #[test]
    fn merging_adds_counts(a in runs(), b in runs()) {
        let sa = switching_stats(&LabeledTrajectory::from_names(&STATES, &expand(&a), 1.0), &[3.0, 30.0], 2).unwrap();
        let sb = switching_stats(&LabeledTrajectory::from_names(&STATES, &expand(&b), 1.0), &[3.0, 30.0], 2).unwrap();
        let mut m = sa.clone();
        m.merge(&sb);
        prop_assert_eq!(m.total_transitions(), sa.total_transitions() + sb.total_transitions());
        for i in 0..STATES.len() {
            prop_assert_eq!(m.visit_counts[i], sa.visit_counts[i] + sb.visit_counts[i]);
        }
    }
}
