//! Up/down branching after a kick versus the measure of {u : g(u) > 0}.

use hetnet::analysis::{ensemble_stats, seed_line, EnsembleConfig};
use hetnet::dynamics::{kernel_shape, Simulator};
use hetnet::netspec::Point;
use hetnet::presets::load_preset;

fn main() {
    println!("{:<28} {:>8} {:>8}", "variant", "up", "g > 0");
    for name in ["fig2-twosaddle-sine", "fig2-twosaddle-sawtooth", "fig2-twosaddle-square"] {
        let spec = load_preset(name).unwrap();
        let params = spec.perturbations[0].params;
        let n = 100_000;
        let measure =
            (0..n).filter(|i| kernel_shape(&params, (*i as f64 + 0.5) / n as f64) > 0.0).count() as f64 / n as f64;

        // one passage per seed, seeds spread over one input-scale period before the section
        let sim = Simulator::new(&spec).unwrap();
        let scale = sim.kernels().next().unwrap().1.input_scale;
        let [a, b] = spec.perturbations[0].section;
        let seeds = 2000;
        let start = Point::new(0.5 * (a.x + b.x) - 0.5 * scale, 0.5 * (a.y + b.y));
        let cfg = EnsembleConfig {
            seeds: seed_line(start, (1.0, 0.0), scale / seeds as f64, seeds),
            transitions_per_seed: Some(1),
            max_steps_per_seed: 5000,
            burn_in_visits: 0,
            bin_edges: vec![3.0, 30.0],
        };
        let stats = ensemble_stats(&spec, &cfg).unwrap();
        let up = stats.probability("p2", "up").unwrap().unwrap();
        println!("{name:<28} {up:>8.4} {measure:>8.4}");
    }
}
