//! Run the four-state network and print its visit sequence and kicks.

use hetnet::analysis::{dwell_times, label};
use hetnet::dynamics::Simulator;
use hetnet::presets::load_preset;

fn main() {
    let spec = load_preset("nichols4").unwrap();
    let sim = Simulator::new(&spec).unwrap();
    let traj = sim.run(spec.settings.init.unwrap(), 20_000).unwrap();
    let end = traj.points.last().unwrap();
    println!("{} points, t = {:.2}, end at {end}", traj.points.len(), traj.time(traj.points.len() - 1));

    println!("\nvisits:");
    for (state, dwell) in dwell_times(&label(&spec, &traj)) {
        println!("  {state:<12} {dwell:7.2}");
    }
    println!("\nkicks:");
    for e in traj.events.iter().take(10) {
        println!("  step {:>6}  {:<6} {:+.4}", e.step, e.perturbation, e.kick);
    }

    let mut csv = Vec::new();
    traj.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    println!("\ncsv head:\n{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
}
