//! Train-track construction of heteroclinic networks.
//!
//! Saddles are laid down first, then joined by corridors made of
//! axis-aligned straight runs with rounded corners. Each saddle becomes a
//! linear piece on a square box, each straight run a transversal piece and
//! each corner a rotational piece, all sharing one tanh slope so that
//! abutting windows sum to one along the track.
//!
//! The Euler map inflates circles by `sqrt(1 + (c dt)^2)` per step, so the
//! rotational radius parameter is shrunk until the discrete map's invariant
//! circle sits `inward_bias` inside the drawn corner. Any residual offset a
//! corner leaves on the next straight therefore points to the concave side.

use crate::netspec::{
    Axis, CorridorSpec, FieldPiece, FixedPointSpec, KernelParams, LocalDynamics, NetworkSpec, PerturbationSpec, Point,
    Rect, Settings, SCHEMA_VERSION,
};

#[derive(Clone, Debug)]
pub struct SaddleDef {
    pub id: String,
    pub position: Point,
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub stable_axis: Axis,
    /// Half width of the square linear box.
    pub box_half: f64,
    pub region_radius: f64,
}

#[derive(Clone, Debug)]
pub struct CorridorDef {
    pub id: String,
    pub from: String,
    pub to: String,
    /// Axis-aligned waypoints; first and last sit on the saddle boxes.
    pub waypoints: Vec<Point>,
    pub speed: f64,
    /// Transverse contraction rate towards the track.
    pub contraction: f64,
    pub half_width: f64,
    pub corner_radius: f64,
    pub state: Option<String>,
    pub tube_radius: Option<f64>,
    /// Per-corner overrides of the network's `inward_bias`, in path order.
    pub corner_bias: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct KickDef {
    pub id: String,
    pub corridor: String,
    /// Distance of the section before the corridor's last waypoint.
    pub before_end: f64,
    pub half_length: f64,
    /// Positive kicks go to the left of the direction of travel when true.
    pub positive_left: bool,
    pub params: KernelParams,
    pub amplitude: f64,
}

#[derive(Clone, Debug)]
pub struct NetworkBuilder {
    pub name: String,
    pub description: String,
    pub dt: f64,
    pub slope: f64,
    pub domain: Rect,
    pub init: Option<Point>,
    pub inward_bias: f64,
    pub saddles: Vec<SaddleDef>,
    pub corridors: Vec<CorridorDef>,
    pub kicks: Vec<KickDef>,
    pub cycles: Vec<Vec<String>>,
}

fn direction(a: Point, b: Point) -> (f64, f64) {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    assert!(dx == 0.0 || dy == 0.0, "corridor segment {a} -> {b} is not axis aligned");
    let n = dx.hypot(dy);
    assert!(n > 0.0, "repeated waypoint {a}");
    (dx / n, dy / n)
}

fn shift(p: Point, d: (f64, f64), by: f64) -> Point {
    Point::new(p.x + d.0 * by, p.y + d.1 * by)
}

fn bbox(points: &[Point]) -> Rect {
    let (mut x1, mut x2, mut y1, mut y2) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x1 = x1.min(p.x);
        x2 = x2.max(p.x);
        y1 = y1.min(p.y);
        y2 = y2.max(p.y);
    }
    Rect::new(x1, x2, y1, y2)
}

/// Radius parameter whose Euler-invariant circle has radius `target`.
pub fn euler_compensated_radius(target: f64, a: f64, c: f64, dt: f64) -> f64 {
    target - (1.0 - (1.0 - (c * dt).powi(2)).sqrt()) / (a * dt)
}

impl CorridorDef {
    fn pieces(&self, dt: f64, slope: f64, inward_bias: f64) -> Vec<FieldPiece> {
        let w = &self.waypoints;
        let n = w.len();
        assert!(n >= 2, "corridor {} needs two waypoints", self.id);
        let r = self.corner_radius;
        let hw = self.half_width;
        let mut out = Vec::new();
        for i in 0..n - 1 {
            let d = direction(w[i], w[i + 1]);
            let start = if i > 0 { shift(w[i], d, r) } else { w[i] };
            let end = if i + 2 < n { shift(w[i + 1], d, -r) } else { w[i + 1] };
            let (orientation, b, c) = if d.1 == 0.0 {
                (Axis::Horizontal, w[i].y, self.speed * d.0)
            } else {
                (Axis::Vertical, w[i].x, self.speed * d.1)
            };
            let region = match orientation {
                Axis::Horizontal => Rect::new(start.x.min(end.x), start.x.max(end.x), b - hw, b + hw),
                Axis::Vertical => Rect::new(b - hw, b + hw, start.y.min(end.y), start.y.max(end.y)),
            };
            out.push(FieldPiece {
                id: Some(format!("{}.run{}", self.id, i)),
                region,
                slope,
                local: LocalDynamics::Transversal { a: self.contraction, b, c, orientation },
            });
            if i + 2 < n {
                let bias = self.corner_bias.get(i).copied().unwrap_or(inward_bias);
                let corner = w[i + 1];
                let d_out = direction(w[i + 1], w[i + 2]);
                let center = shift(shift(corner, d, -r), d_out, r);
                let left_turn = d.0 * d_out.1 - d.1 * d_out.0 > 0.0;
                let omega = if left_turn { self.speed / r } else { -self.speed / r };
                let a_rot = self.contraction / r;
                let t1 = shift(corner, d, -r);
                let t2 = shift(corner, d_out, r);
                let n_in = (-d.1, d.0);
                let n_out = (-d_out.1, d_out.0);
                let region = bbox(&[
                    shift(t1, n_in, hw),
                    shift(t1, n_in, -hw),
                    shift(t2, n_out, hw),
                    shift(t2, n_out, -hw),
                    shift(shift(corner, d, hw), d_out, -hw),
                ]);
                out.push(FieldPiece {
                    id: Some(format!("{}.turn{}", self.id, i + 1)),
                    region,
                    slope,
                    local: LocalDynamics::Rotational {
                        a: a_rot,
                        b: euler_compensated_radius(r - bias, a_rot, omega, dt),
                        c: omega,
                        center,
                    },
                });
            }
        }
        out
    }
}

impl NetworkBuilder {
    pub fn new(name: &str, dt: f64, slope: f64, domain: Rect) -> Self {
        NetworkBuilder {
            name: name.to_string(),
            description: String::new(),
            dt,
            slope,
            domain,
            init: None,
            inward_bias: 0.0,
            saddles: Vec::new(),
            corridors: Vec::new(),
            kicks: Vec::new(),
            cycles: Vec::new(),
        }
    }

    pub fn build(&self) -> NetworkSpec {
        let mut pieces = Vec::new();
        for s in &self.saddles {
            let p = s.position;
            let h = s.box_half;
            pieces.push(FieldPiece {
                id: Some(format!("{}.box", s.id)),
                region: Rect::new(p.x - h, p.x + h, p.y - h, p.y + h),
                slope: self.slope,
                local: LocalDynamics::Linear { fixed_point: s.id.clone() },
            });
        }
        for c in &self.corridors {
            pieces.extend(c.pieces(self.dt, self.slope, self.inward_bias));
        }
        let perturbations = self
            .kicks
            .iter()
            .map(|k| {
                let c = self
                    .corridors
                    .iter()
                    .find(|c| c.id == k.corridor)
                    .unwrap_or_else(|| panic!("kick {} on unknown corridor {}", k.id, k.corridor));
                let n = c.waypoints.len();
                let d = direction(c.waypoints[n - 2], c.waypoints[n - 1]);
                let anchor = shift(c.waypoints[n - 1], d, -k.before_end);
                let left = if k.positive_left { (-d.1, d.0) } else { (d.1, -d.0) };
                PerturbationSpec {
                    id: k.id.clone(),
                    corridor: k.corridor.clone(),
                    section: [shift(anchor, left, -k.half_length), shift(anchor, left, k.half_length)],
                    params: k.params,
                    amplitude: k.amplitude,
                    input_scale: None,
                }
            })
            .collect();
        NetworkSpec {
            version: SCHEMA_VERSION,
            name: self.name.clone(),
            description: self.description.clone(),
            settings: Settings {
                dt: self.dt,
                domain: self.domain,
                init: self.init,
                min_visit: crate::netspec::DEFAULT_MIN_VISIT,
                cycles: self.cycles.clone(),
            },
            fixedpoints: self
                .saddles
                .iter()
                .map(|s| FixedPointSpec {
                    id: s.id.clone(),
                    position: s.position,
                    lambda_s: s.lambda_s,
                    lambda_u: s.lambda_u,
                    stable_axis: s.stable_axis,
                    region_radius: s.region_radius,
                })
                .collect(),
            pieces,
            corridors: self
                .corridors
                .iter()
                .map(|c| CorridorSpec {
                    id: c.id.clone(),
                    from: c.from.clone(),
                    to: c.to.clone(),
                    path: c.waypoints.clone(),
                    speed: c.speed,
                    state: c.state.clone(),
                    tube_radius: c.tube_radius,
                })
                .collect(),
            perturbations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_radius_is_invariant_for_the_euler_map() {
        let (a, c, dt, target) = (2.0, 1.5, 0.05, 0.75);
        let b = euler_compensated_radius(target, a, c, dt);
        let r = target;
        let grow = ((1.0 + a * (b - r) * dt).powi(2) + (c * dt).powi(2)).sqrt();
        assert!((grow - 1.0).abs() < 1e-14, "{grow}");
    }
}
