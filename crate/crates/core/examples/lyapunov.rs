//! Separation growth of nearby orbits with and without kicks.

use hetnet::dynamics::separation_growth;
use hetnet::presets::load_preset;

fn main() {
    let kicked = load_preset("fig2-twosaddle-sine").unwrap();
    let quiet = kicked.with_param("perturbations.k12.amplitude", 0.0).unwrap();
    let cycle = load_preset("fig1-cycle3").unwrap();
    for (label, spec) in
        [("two saddles, kicked", &kicked), ("two saddles, no kick", &quiet), ("stable 3-cycle", &cycle)]
    {
        let lyap = separation_growth(spec, spec.settings.init.unwrap(), 1e-9, 200_000).unwrap();
        println!("{label:<22} {lyap:+.4} per time unit");
    }
}
