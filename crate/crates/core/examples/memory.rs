//! Forward's exits conditioned on the state before forward.

use hetnet::analysis::{ensemble_stats, EnsembleConfig};
use hetnet::netspec::Point;
use hetnet::presets::load_preset;

fn main() {
    let seeds: Vec<Point> = (0..8).map(|k| Point::new(2.0 + 0.01 * k as f64, 0.2 - 0.02 * k as f64)).collect();
    for name in ["nichols4-memory-weak", "nichols4-memory-strong"] {
        let spec = load_preset(name).unwrap();
        let cfg = EnsembleConfig {
            seeds: seeds.clone(),
            transitions_per_seed: Some(1250),
            max_steps_per_seed: 50_000_000,
            burn_in_visits: 2,
            bin_edges: vec![3.0, 30.0],
        };
        let stats = ensemble_stats(&spec, &cfg).unwrap();
        let h = stats.history("forward").unwrap();
        let r = stats.index("reversal").unwrap();
        println!("{name}: P(reversal | forward) = {:.3}", h.marginal()[r]);
        for prev in ["turn", "quiescence"] {
            if let Some(row) = h.row(prev) {
                println!("    previous {prev:<11} {:.3} ({} visits)", row[r], h.support(prev));
            }
        }
    }
}
