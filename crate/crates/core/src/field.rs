//! Global vector field: local dynamics blended by tanh weight windows.

use thiserror::Error;

use crate::netspec::{Axis, FixedPointSpec, LocalDynamics, NetworkSpec, Point, Rect};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Velocity {
    pub vx: f64,
    pub vy: f64,
}

impl Velocity {
    pub const fn new(vx: f64, vy: f64) -> Self {
        Velocity { vx, vy }
    }

    pub fn norm(self) -> f64 {
        self.vx.hypot(self.vy)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("point {0} lies outside the domain")]
    OutOfDomain(Point),
    #[error("rotational dynamics are singular at their center {0}")]
    Singular(Point),
}

/// tanh window of a rectangle; close to one inside, decays outside.
pub fn eval_weight(p: Point, region: &Rect, slope: f64) -> f64 {
    let wx = (slope * (p.x - region.x[0])).tanh() - (slope * (p.x - region.x[1])).tanh();
    let wy = (slope * (p.y - region.y[0])).tanh() - (slope * (p.y - region.y[1])).tanh();
    0.25 * wx * wy
}

pub fn eval_linear(p: Point, fp: &FixedPointSpec) -> Velocity {
    let (lx, ly) = fp.axis_rates();
    Velocity::new(lx * (p.x - fp.position.x), ly * (p.y - fp.position.y))
}

pub fn eval_transversal(p: Point, a: f64, b: f64, c: f64, orientation: Axis) -> Velocity {
    match orientation {
        Axis::Horizontal => Velocity::new(c, -a * (p.y - b)),
        Axis::Vertical => Velocity::new(-a * (p.x - b), c),
    }
}

/// `dr/dt = a r (b - r)`, `dtheta/dt = c`, in Cartesian form.
pub fn eval_rotational(p: Point, a: f64, b: f64, c: f64, center: Point) -> Result<Velocity, FieldError> {
    let dx = p.x - center.x;
    let dy = p.y - center.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(FieldError::Singular(center));
    }
    let r = dx.hypot(dy);
    // rdot * (cos, sin) = a (b - r) * (dx, dy)
    let radial = a * (b - r);
    Ok(Velocity::new(radial * dx - c * dy, radial * dy + c * dx))
}

/// Beyond this |s * distance| tanh rounds to exactly +-1, so the window is exactly 0.
const SATURATION: f64 = 23.0;

#[derive(Clone, Debug)]
enum Local {
    Linear { px: f64, py: f64, lx: f64, ly: f64 },
    Transversal { a: f64, b: f64, c: f64, orientation: Axis },
    Rotational { a: f64, b: f64, c: f64, center: Point },
}

#[derive(Clone, Debug)]
struct Piece {
    region: Rect,
    slope: f64,
    /// Outside this box the weight is exactly zero.
    support: Rect,
    local: Local,
}

/// Field ready for repeated evaluation; fixed-point references are resolved once.
#[derive(Clone, Debug)]
pub struct CompiledField {
    pieces: Vec<Piece>,
    domain: Rect,
}

impl CompiledField {
    pub fn new(spec: &NetworkSpec) -> Self {
        let pieces = spec
            .pieces
            .iter()
            .map(|piece| {
                let local = match &piece.local {
                    LocalDynamics::Linear { fixed_point } => {
                        let fp = spec.fixed_point(fixed_point).expect("linear piece references a parsed fixed point");
                        let (lx, ly) = fp.axis_rates();
                        Local::Linear { px: fp.position.x, py: fp.position.y, lx, ly }
                    }
                    LocalDynamics::Transversal { a, b, c, orientation } => {
                        Local::Transversal { a: *a, b: *b, c: *c, orientation: *orientation }
                    }
                    LocalDynamics::Rotational { a, b, c, center } => {
                        Local::Rotational { a: *a, b: *b, c: *c, center: *center }
                    }
                };
                let margin = SATURATION / piece.slope;
                let r = piece.region;
                Piece {
                    region: r,
                    slope: piece.slope,
                    support: Rect::new(r.x[0] - margin, r.x[1] + margin, r.y[0] - margin, r.y[1] + margin),
                    local,
                }
            })
            .collect();
        CompiledField { pieces, domain: spec.settings.domain }
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    /// Sum of weighted local velocities in declaration order.
    pub fn eval(&self, p: Point) -> Result<Velocity, FieldError> {
        if !self.domain.contains(p) {
            return Err(FieldError::OutOfDomain(p));
        }
        let mut vx = 0.0;
        let mut vy = 0.0;
        for piece in &self.pieces {
            // skipped terms would contribute an exact zero
            if !piece.support.contains(p) {
                continue;
            }
            let w = eval_weight(p, &piece.region, piece.slope);
            if w == 0.0 {
                continue;
            }
            let v = match piece.local {
                Local::Linear { px, py, lx, ly } => Velocity::new(lx * (p.x - px), ly * (p.y - py)),
                Local::Transversal { a, b, c, orientation } => eval_transversal(p, a, b, c, orientation),
                Local::Rotational { a, b, c, center } => eval_rotational(p, a, b, c, center)?,
            };
            vx += w * v.vx;
            vy += w * v.vy;
        }
        Ok(Velocity::new(vx, vy))
    }
}

/// Evaluate the global field of `spec` at `p`.
pub fn eval_field(spec: &NetworkSpec, p: Point) -> Result<Velocity, FieldError> {
    CompiledField::new(spec).eval(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: Rect = Rect::new(0.0, 1.0, 0.0, 1.0);

    #[test]
    fn weight_examples() {
        assert!((eval_weight(Point::new(0.5, 0.5), &UNIT, 100.0) - 1.0).abs() < 1e-12);
        assert!(eval_weight(Point::new(10.0, 0.5), &UNIT, 100.0).abs() < 1e-12);
        assert!((eval_weight(Point::new(0.0, 0.5), &UNIT, 100.0) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn linear_examples() {
        let fp = FixedPointSpec {
            id: "p".into(),
            position: Point::new(0.0, 0.0),
            lambda_s: -2.0,
            lambda_u: 1.0,
            stable_axis: Axis::Horizontal,
            region_radius: 0.5,
        };
        assert_eq!(eval_linear(fp.position, &fp), Velocity::new(0.0, 0.0));
        assert_eq!(eval_linear(Point::new(1.0, 1.0), &fp), Velocity::new(-2.0, 1.0));
        assert_eq!(eval_linear(Point::new(0.0, 3.0), &fp), Velocity::new(0.0, 3.0));
        let shifted = FixedPointSpec { position: Point::new(2.0, -1.0), ..fp };
        assert_eq!(eval_linear(Point::new(2.0, -1.0), &shifted), Velocity::new(0.0, 0.0));
    }

    #[test]
    fn transversal_examples() {
        assert_eq!(eval_transversal(Point::new(5.0, 0.0), 1.0, 0.0, 1.0, Axis::Horizontal), Velocity::new(1.0, 0.0));
        assert_eq!(eval_transversal(Point::new(0.0, 2.0), 1.0, 0.0, 1.0, Axis::Horizontal), Velocity::new(1.0, -2.0));
        assert_eq!(eval_transversal(Point::new(1.0, 0.0), 2.0, 1.0, -1.0, Axis::Vertical), Velocity::new(0.0, -1.0));
    }

    #[test]
    fn rotational_examples() {
        let o = Point::new(0.0, 0.0);
        assert_eq!(eval_rotational(Point::new(1.0, 0.0), 1.0, 1.0, 1.0, o).unwrap(), Velocity::new(0.0, 1.0));
        assert_eq!(eval_rotational(Point::new(2.0, 0.0), 1.0, 1.0, 1.0, o).unwrap(), Velocity::new(-2.0, 2.0));
        assert!(matches!(eval_rotational(o, 1.0, 1.0, 1.0, o), Err(FieldError::Singular(_))));
    }
}
