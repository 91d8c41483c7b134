//! Dwell at a linear saddle: halving lambda_u doubles the dwell.

use hetnet::dynamics::Simulator;
use hetnet::netspec::{parse_spec, NetworkSpec, Point};

fn saddle(lambda_u: f64) -> NetworkSpec {
    parse_spec(&format!(
        r#"
version = 1
[settings]
dt = 0.01
domain = {{ x = [-3.0, 3.0], y = [-3.0, 3.0] }}

[[fixedpoints]]
id = "s"
position = [0.0, 0.0]
lambda_s = -1.0
lambda_u = {lambda_u}
stable_axis = "horizontal"
region_radius = 0.5

[[pieces]]
slope = 50.0
region = {{ x = [-2.0, 2.0], y = [-2.0, 2.0] }}
local = {{ kind = "linear", fixed_point = "s" }}
"#
    ))
    .unwrap()
}

/// Steps from entering the disk at offset `delta` until leaving it.
fn dwell(spec: &NetworkSpec, delta: f64) -> u64 {
    let sim = Simulator::new(spec).unwrap();
    let r = spec.fixedpoints[0].region_radius;
    let mut st = sim.start(Point::new(-(r * r - delta * delta).sqrt() + 1e-9, delta)).unwrap();
    let mut n = 1;
    loop {
        sim.advance_state(&mut st).unwrap();
        if st.point.dist(Point::new(0.0, 0.0)) >= r {
            return n;
        }
        n += 1;
    }
}

fn main() {
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "delta", "fast", "closed", "slow", "closed");
    for delta in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
        let mut row = format!("{delta:>8.0e}");
        for lu in [0.5, 0.25] {
            let n = dwell(&saddle(lu), delta);
            let closed = (0.5 / delta).ln() / (1.0 + lu * 0.01).ln();
            row += &format!(" {n:>10} {closed:>10.1}");
        }
        println!("{row}");
    }
}
