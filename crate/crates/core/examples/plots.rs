//! Phase portrait, dwell histogram and transition heat map as SVG files.

use hetnet::analysis::{label, switching_stats};
use hetnet::dynamics::advance;
use hetnet::plot::{histogram_svg, matrix_svg, phase_svg, StatsView};
use hetnet::presets::load_preset;

fn main() {
    let spec = load_preset("nichols4").unwrap();
    let traj = advance(&spec, spec.settings.init.unwrap(), 100_000).unwrap();
    let stats = switching_stats(&label(&spec, &traj), &[3.0, 30.0], spec.settings.min_visit).unwrap();
    let view = StatsView::from_stats(&stats);

    let out = std::env::temp_dir().join("hetnet-plots");
    std::fs::create_dir_all(&out).unwrap();
    for (file, svg) in
        [("phase.svg", phase_svg(&spec, &traj)), ("dwell.svg", histogram_svg(&view)), ("matrix.svg", matrix_svg(&view))]
    {
        let path = out.join(file);
        std::fs::write(&path, &svg).unwrap();
        println!("{} ({} bytes)", path.display(), svg.len());
    }
}
