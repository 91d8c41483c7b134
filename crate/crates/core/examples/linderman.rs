//! Eight behavioral states: saddles plus named corridor states.

use hetnet::analysis::{ensemble_stats, EnsembleConfig};
use hetnet::netspec::Point;
use hetnet::presets::load_preset;

fn main() {
    let spec = load_preset("linderman8").unwrap();
    let seeds: Vec<Point> = (0..8).map(|k| Point::new(2.0 + 0.01 * k as f64, 0.1 - 0.02 * k as f64)).collect();
    let cfg = EnsembleConfig {
        seeds,
        transitions_per_seed: Some(500),
        max_steps_per_seed: 50_000_000,
        burn_in_visits: 2,
        bin_edges: vec![3.0, 30.0],
    };
    let stats = ensemble_stats(&spec, &cfg).unwrap();
    let matrix = stats.transition_matrix();
    for (i, from) in stats.states.iter().enumerate() {
        let dwell = stats.mean_dwell(from).unwrap().unwrap_or(f64::NAN);
        let next: Vec<String> = match &matrix[i] {
            Some(row) => {
                stats.states.iter().zip(row).filter(|(_, p)| **p > 0.0).map(|(s, p)| format!("{s} {p:.2}")).collect()
            }
            None => vec!["-".into()],
        };
        println!("{from:<13} dwell {dwell:6.2}  -> {}", next.join(", "));
    }
}
