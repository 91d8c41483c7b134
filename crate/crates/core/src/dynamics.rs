//! Discrete-time evolution: the Euler map of the global field plus one-shot
//! kicks applied where trajectories cross the perturbation sections.
//!
//! A kick is triggered when the step `p -> q` crosses a section in the
//! corridor's travel direction. The kernel argument is the distance `q` has
//! travelled past the section, measured along the corridor, so a section
//! with the default input scale sees every argument in `[0, 1)` exactly once
//! per passage: the one-step window plays the role of the fundamental domain.
//! The displacement is applied along the section segment, i.e. across the
//! corridor, and its sign decides on which side of the downstream stable
//! manifold the trajectory lands.

use std::io::{self, Write};

use thiserror::Error;

use crate::field::{CompiledField, FieldError};
use crate::netspec::{segment_intersection, KernelParams, NetworkSpec, Point, Rect};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("trajectory escaped the domain at step {step}: last valid point {last}, next {next}")]
    Escape { step: u64, last: Point, next: Point },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("perturbation \"{0}\" has no usable section on its corridor")]
    BadSection(String),
    #[error("n_steps must be ≥ 1")]
    NoSteps,
}

/// The kick profile: piecewise-tanh shape, amplitude and input scaling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationKernel {
    pub params: KernelParams,
    pub amplitude: f64,
    pub input_scale: f64,
}

/// Right half of the kernel shape; the full shape is its even extension.
pub fn kernel_shape_right(k: &KernelParams, x: f64) -> f64 {
    0.5 * ((k.s1 * (x - k.l1)).tanh() + (k.s1 * (x + k.l1)).tanh())
        - (k.s2 * (x - (0.5 + k.b))).tanh()
        - 0.5 * ((k.s3 * (x - (1.0 - k.l2))).tanh() - (k.s3 * (x - (1.0 + k.l2))).tanh())
}

/// Even kernel shape: `g(x) = g+(|x|)`.
pub fn kernel_shape(k: &KernelParams, x: f64) -> f64 {
    kernel_shape_right(k, x.abs())
}

impl PerturbationKernel {
    /// Signed displacement for a section coordinate `u` in phase units.
    pub fn eval(&self, u: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * kernel_shape(&self.params, u / self.input_scale)
    }
}

pub fn eval_g(kernel: &PerturbationKernel, u: f64) -> f64 {
    kernel.eval(u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KickEvent {
    /// Index of the kicked point in the trajectory.
    pub step: u64,
    pub corridor: String,
    pub perturbation: String,
    /// Signed displacement along the section.
    pub kick: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub points: Vec<Point>,
    pub events: Vec<KickEvent>,
}

impl Trajectory {
    pub fn time(&self, step: usize) -> f64 {
        self.t0 + step as f64 * self.dt
    }

    /// `step,t,x,y` rows with shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "step,t,x,y")?;
        for (i, p) in self.points.iter().enumerate() {
            writeln!(w, "{},{},{},{}", i, self.time(i), p.x, p.y)?;
        }
        Ok(())
    }

    pub fn write_events_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "step,corridor,kick")?;
        for e in &self.events {
            writeln!(w, "{},{},{}", e.step, e.corridor, e.kick)?;
        }
        Ok(())
    }

    /// Parse the `step,t,x,y` format written by [`Trajectory::write_csv`].
    pub fn read_csv(text: &str, dt: f64) -> Result<Trajectory, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next().map(str::trim) {
            Some("step,t,x,y") => {}
            Some(other) => return Err(format!("unexpected header \"{other}\"")),
            None => return Err("empty file".into()),
        }
        let mut points = Vec::new();
        let mut t0 = 0.0;
        for (n, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(format!("line {}: expected 4 columns", n + 2));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: {e}", n + 2));
            if n == 0 {
                t0 = num(cols[1])?;
            }
            points.push(Point::new(num(cols[2])?, num(cols[3])?));
        }
        Ok(Trajectory { t0, dt, points, events: Vec::new() })
    }
}

#[derive(Clone, Debug)]
struct Section {
    id: String,
    corridor: String,
    a: Point,
    b: Point,
    anchor: Point,
    /// Unit travel direction of the corridor at the section.
    travel: (f64, f64),
    /// Unit kick direction, along the section segment.
    across: (f64, f64),
    /// Unit normal of the section line, oriented with the travel direction.
    normal: (f64, f64),
    kernel: PerturbationKernel,
    guard: f64,
}

impl Section {
    fn distance(&self, p: Point) -> f64 {
        crate::netspec::point_segment_distance(p, self.a, self.b)
    }
}

/// Mutable part of a running trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub point: Point,
    pub step: u64,
    armed: Vec<bool>,
}

/// Compiled network: field, sections and step size.
#[derive(Clone, Debug)]
pub struct Simulator {
    field: CompiledField,
    sections: Vec<Section>,
    dt: f64,
    domain: Rect,
}

fn unit(x: f64, y: f64) -> (f64, f64) {
    let n = x.hypot(y);
    (x / n, y / n)
}

impl Simulator {
    pub fn new(spec: &NetworkSpec) -> Result<Self, DynamicsError> {
        let field = CompiledField::new(spec);
        let dt = spec.settings.dt;
        let mut sections = Vec::with_capacity(spec.perturbations.len());
        for p in &spec.perturbations {
            let corridor = spec.corridor(&p.corridor).ok_or_else(|| DynamicsError::BadSection(p.id.clone()))?;
            let [s0, s1] = p.section;
            let hit = corridor.path.windows(2).find_map(|w| {
                segment_intersection(w[0], w[1], s0, s1).map(|(t, _)| {
                    let anchor = Point::new(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y));
                    (anchor, unit(w[1].x - w[0].x, w[1].y - w[0].y))
                })
            });
            let (anchor, travel) = hit.ok_or_else(|| DynamicsError::BadSection(p.id.clone()))?;
            let across = unit(s1.x - s0.x, s1.y - s0.y);
            let mut normal = (-across.1, across.0);
            if normal.0 * travel.0 + normal.1 * travel.1 < 0.0 {
                normal = (-normal.0, -normal.1);
            }
            if (normal.0 * travel.0 + normal.1 * travel.1).abs() < 1e-6 {
                return Err(DynamicsError::BadSection(p.id.clone()));
            }
            let input_scale = match p.input_scale {
                Some(s) => s,
                None => field.eval(anchor)?.norm() * dt,
            };
            if !(input_scale > 0.0) {
                return Err(DynamicsError::BadSection(p.id.clone()));
            }
            sections.push(Section {
                id: p.id.clone(),
                corridor: p.corridor.clone(),
                a: s0,
                b: s1,
                anchor,
                travel,
                across,
                normal,
                kernel: PerturbationKernel { params: p.params, amplitude: p.amplitude, input_scale },
                guard: 2.0 * input_scale,
            });
        }
        Ok(Simulator { field, sections, dt, domain: spec.settings.domain })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn field(&self) -> &CompiledField {
        &self.field
    }

    /// Kernels in perturbation declaration order, with input scales resolved.
    pub fn kernels(&self) -> impl Iterator<Item = (&str, &PerturbationKernel)> {
        self.sections.iter().map(|s| (s.id.as_str(), &s.kernel))
    }

    pub fn start(&self, p: Point) -> Result<SimState, DynamicsError> {
        if !self.domain.contains(p) {
            return Err(FieldError::OutOfDomain(p).into());
        }
        Ok(SimState { point: p, step: 0, armed: vec![true; self.sections.len()] })
    }

    /// One Euler step of the unperturbed map.
    pub fn euler(&self, p: Point) -> Result<Point, DynamicsError> {
        let v = self.field.eval(p)?;
        Ok(Point::new(p.x + self.dt * v.vx, p.y + self.dt * v.vy))
    }

    /// Advance `state` by one step of the perturbed map. Returns the kick
    /// applied on this step, as (section index, displacement).
    pub fn advance_state(&self, state: &mut SimState) -> Result<Option<(usize, f64)>, DynamicsError> {
        let p = state.point;
        let mut q = self.euler(p)?;
        let mut kicked = None;
        for (i, s) in self.sections.iter().enumerate() {
            if !state.armed[i] {
                if s.distance(q) > s.guard {
                    state.armed[i] = true;
                }
                continue;
            }
            if kicked.is_some() {
                continue;
            }
            let forward = (q.x - p.x) * s.travel.0 + (q.y - p.y) * s.travel.1;
            if forward <= 0.0 || segment_intersection(p, q, s.a, s.b).is_none() {
                continue;
            }
            // distance travelled past the section line, measured along the corridor
            let past = ((q.x - s.anchor.x) * s.normal.0 + (q.y - s.anchor.y) * s.normal.1)
                / (s.normal.0 * s.travel.0 + s.normal.1 * s.travel.1);
            let kick = s.kernel.eval(past);
            q = Point::new(q.x + kick * s.across.0, q.y + kick * s.across.1);
            state.armed[i] = false;
            kicked = Some((i, kick));
        }
        if !self.domain.contains(q) {
            return Err(DynamicsError::Escape { step: state.step + 1, last: p, next: q });
        }
        state.point = q;
        state.step += 1;
        Ok(kicked)
    }

    pub fn section_ids(&self, index: usize) -> (&str, &str) {
        let s = &self.sections[index];
        (s.id.as_str(), s.corridor.as_str())
    }

    pub fn run(&self, start: Point, n_steps: u64) -> Result<Trajectory, DynamicsError> {
        if n_steps == 0 {
            return Err(DynamicsError::NoSteps);
        }
        let mut state = self.start(start)?;
        let mut points = Vec::with_capacity(n_steps as usize + 1);
        points.push(start);
        let mut events = Vec::new();
        for _ in 0..n_steps {
            if let Some((i, kick)) = self.advance_state(&mut state)? {
                let (id, corridor) = self.section_ids(i);
                events.push(KickEvent {
                    step: state.step,
                    corridor: corridor.to_string(),
                    perturbation: id.to_string(),
                    kick,
                });
            }
            points.push(state.point);
        }
        Ok(Trajectory { t0: 0.0, dt: self.dt, points, events })
    }

    /// Largest Lyapunov exponent by two-trajectory renormalization.
    pub fn separation_growth(&self, start: Point, epsilon: f64, n_steps: u64) -> Result<f64, DynamicsError> {
        if n_steps == 0 {
            return Err(DynamicsError::NoSteps);
        }
        let dir = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = self.start(start)?;
        let mut b = self.start(Point::new(start.x + epsilon * dir, start.y + epsilon * dir))?;
        let mut log_sum = 0.0;
        for _ in 0..n_steps {
            self.advance_state(&mut a)?;
            self.advance_state(&mut b)?;
            let (dx, dy) = (b.point.x - a.point.x, b.point.y - a.point.y);
            let d = dx.hypot(dy);
            if d == 0.0 {
                // separation collapsed below resolution; restart it along the same direction
                log_sum += (f64::MIN_POSITIVE / epsilon).ln();
                b = a.clone();
                b.point = Point::new(a.point.x + epsilon * dir, a.point.y + epsilon * dir);
                continue;
            }
            log_sum += (d / epsilon).ln();
            let scale = epsilon / d;
            b = a.clone();
            b.point = Point::new(a.point.x + dx * scale, a.point.y + dy * scale);
        }
        Ok(log_sum / (n_steps as f64 * self.dt))
    }
}

/// One unperturbed Euler step: `p + dt * field(p)`.
pub fn step(spec: &NetworkSpec, p: Point) -> Result<Point, DynamicsError> {
    let field = CompiledField::new(spec);
    let q = {
        let v = field.eval(p)?;
        Point::new(p.x + spec.settings.dt * v.vx, p.y + spec.settings.dt * v.vy)
    };
    if !spec.settings.domain.contains(q) {
        return Err(DynamicsError::Escape { step: 1, last: p, next: q });
    }
    Ok(q)
}

/// Iterate the perturbed map `n_steps` times from `p`.
pub fn advance(spec: &NetworkSpec, p: Point, n_steps: u64) -> Result<Trajectory, DynamicsError> {
    Simulator::new(spec)?.run(p, n_steps)
}

/// Default initial separation for [`separation_growth`].
pub const DEFAULT_EPSILON: f64 = 1e-9;

pub fn separation_growth(spec: &NetworkSpec, p: Point, epsilon: f64, n_steps: u64) -> Result<f64, DynamicsError> {
    Simulator::new(spec)?.separation_growth(p, epsilon, n_steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(params: KernelParams, amplitude: f64) -> PerturbationKernel {
        PerturbationKernel { params, amplitude, input_scale: 1.0 }
    }

    #[test]
    fn kernel_is_even() {
        let k = kernel(KernelParams { l1: 0.2, l2: 0.3, s1: 7.0, s2: 3.0, s3: 11.0, b: 0.1 }, 0.4);
        assert_eq!(eval_g(&k, 0.3), eval_g(&k, -0.3));
    }

    #[test]
    fn zero_amplitude_is_zero() {
        let k = kernel(KernelParams::REFERENCE, 0.0);
        for i in 0..50 {
            assert_eq!(eval_g(&k, -2.0 + i as f64 * 0.1), 0.0);
        }
    }

    #[test]
    fn input_scale_rescales_argument() {
        let k = kernel(KernelParams::REFERENCE, 1.0);
        let scaled = PerturbationKernel { input_scale: 0.05, ..k };
        assert_eq!(scaled.eval(0.05 * 0.3), k.eval(0.3));
    }

    #[test]
    fn csv_round_trip() {
        let traj = Trajectory {
            t0: 0.0,
            dt: 0.1,
            points: vec![Point::new(0.1, -0.2), Point::new(1.0 / 3.0, 2.5e-17)],
            events: vec![],
        };
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let back = Trajectory::read_csv(std::str::from_utf8(&buf).unwrap(), 0.1).unwrap();
        assert_eq!(back.points, traj.points);
    }
}
