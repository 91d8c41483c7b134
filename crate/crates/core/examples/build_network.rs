//! Assemble a three-saddle heteroclinic cycle from saddles and corridors,
//! check it and print the spec.

use hetnet::builder::{CorridorDef, NetworkBuilder, SaddleDef};
use hetnet::netspec::{check_cycle_stability, to_toml, validate, Axis, Point, Rect};

fn saddle(id: &str, x: f64, y: f64, stable_axis: Axis) -> SaddleDef {
    SaddleDef {
        id: id.into(),
        position: Point::new(x, y),
        lambda_s: -2.0,
        lambda_u: 1.0,
        stable_axis,
        box_half: 0.6,
        region_radius: 0.3,
    }
}

fn corridor(id: &str, from: &str, to: &str, waypoints: &[(f64, f64)]) -> CorridorDef {
    CorridorDef {
        id: id.into(),
        from: from.into(),
        to: to.into(),
        waypoints: waypoints.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        speed: 1.0,
        contraction: 0.1,
        half_width: 0.4,
        corner_radius: 0.6,
        state: None,
        tube_radius: None,
        corner_bias: Vec::new(),
    }
}

fn main() {
    let mut b = NetworkBuilder::new("triangle", 0.01, 20.0, Rect::new(-1.5, 4.5, -1.5, 4.5));
    b.inward_bias = 1e-3;
    b.init = Some(Point::new(1.5, 0.1));
    b.saddles = vec![
        saddle("a", 0.0, 0.0, Axis::Vertical),
        saddle("b", 3.0, 0.0, Axis::Horizontal),
        saddle("c", 3.0, 3.0, Axis::Vertical),
    ];
    b.corridors = vec![
        corridor("ab", "a", "b", &[(0.6, 0.0), (2.4, 0.0)]),
        corridor("bc", "b", "c", &[(3.0, 0.6), (3.0, 2.4)]),
        corridor("ca", "c", "a", &[(2.4, 3.0), (0.0, 3.0), (0.0, 0.6)]),
    ];
    b.cycles = vec![vec!["a".into(), "b".into(), "c".into()]];
    let spec = b.build();

    let violations = validate(&spec);
    println!("{} pieces, {} violations", spec.pieces.len(), violations.len());
    for v in &violations {
        println!("  {v}");
    }
    for cycle in spec.simple_cycles() {
        let ratios: Vec<f64> = cycle.iter().map(|id| spec.fixed_point(id).unwrap().stability_ratio()).collect();
        let c = check_cycle_stability(&ratios).unwrap();
        println!("cycle {cycle:?}: ratios {ratios:?}, strict {}, relaxed {}", c.strict, c.relaxed);
    }
    println!("\n{}", to_toml(&spec));
}
