//! Transition matrix, dwell bins and dwell-conditioned exits over an ensemble.

use hetnet::analysis::{ensemble_stats, EnsembleConfig};
use hetnet::netspec::Point;
use hetnet::presets::load_preset;

fn main() {
    let spec = load_preset("nichols4-prelethargus10").unwrap();
    let seeds: Vec<Point> = (0..8).map(|k| Point::new(2.0 + 0.01 * k as f64, 0.2 - 0.02 * k as f64)).collect();
    let cfg = EnsembleConfig {
        seeds,
        transitions_per_seed: Some(500),
        max_steps_per_seed: 50_000_000,
        burn_in_visits: 2,
        bin_edges: vec![3.0, 30.0],
    };
    let stats = ensemble_stats(&spec, &cfg).unwrap();
    println!("{} transitions over {} steps\n", stats.total_transitions(), stats.steps);

    print!("{:>12}", "");
    for s in &stats.states {
        print!("{s:>12}");
    }
    println!();
    for (from, row) in stats.states.iter().zip(stats.transition_matrix()) {
        print!("{from:>12}");
        match row {
            Some(row) => row.iter().for_each(|p| print!("{p:>12.3}")),
            None => print!("{:>12}", "-"),
        }
        println!();
    }

    let bins = stats.dwell_fractions("forward").unwrap().unwrap();
    println!("\nforward dwell bins [0,3) [3,30) [30,inf): {bins:.3?}");
    for (b, row) in stats.exit_fractions("forward").unwrap().iter().enumerate() {
        if let Some(row) = row {
            let parts: Vec<String> =
                stats.states.iter().zip(row).filter(|(_, p)| **p > 0.0).map(|(s, p)| format!("{s} {p:.2}")).collect();
            println!("  bin {b} exits: {}", parts.join(", "));
        }
    }
}
