//! The shipped catalog with each network's size and cycle ratios.

use hetnet::netspec::validate;
use hetnet::presets::{load_preset, CATALOG};

fn main() {
    for entry in CATALOG {
        let spec = load_preset(entry.name).unwrap();
        let ratios: Vec<String> =
            spec.fixedpoints.iter().map(|f| format!("{}:{:.2}", f.id, f.stability_ratio())).collect();
        println!(
            "{:<30} {} states, {} pieces, {} kicks, {} violations",
            entry.name,
            spec.state_names().len(),
            spec.pieces.len(),
            spec.perturbations.len(),
            validate(&spec).len()
        );
        println!("    {}", entry.blurb);
        println!("    ratios {}", ratios.join(" "));
    }
}
