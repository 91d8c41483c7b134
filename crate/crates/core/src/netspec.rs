//! Declarative network descriptions.
//!
//! A [`NetworkSpec`] lists the saddle fixed points, the weighted local
//! dynamics that make up the global vector field, the corridors (saddle
//! connections) joining the fixed points, and the one-shot perturbations
//! placed on those corridors. Specs are written as TOML with a versioned
//! header; the same schema is accepted and emitted as JSON.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Current schema version written in the `version` header key.
pub const SCHEMA_VERSION: u32 = 1;

/// Time step used when `settings.dt` is omitted.
pub const DEFAULT_DT: f64 = 0.01;

/// Minimum run length (in steps) for a labeled visit to count.
pub const DEFAULT_MIN_VISIT: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis-aligned rectangle `[x1,x2] x [y1,y2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Rect {
    pub const fn new(x1: f64, x2: f64, y1: f64, y2: f64) -> Self {
        Rect { x: [x1, x2], y: [y1, y2] }
    }

    pub fn is_well_formed(&self) -> bool {
        self.x[0] < self.x[1] && self.y[0] < self.y[1]
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x[0] && p.x <= self.x[1] && p.y >= self.y[0] && p.y <= self.y[1]
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x[0] >= self.x[0] && other.x[1] <= self.x[1] && other.y[0] >= self.y[0] && other.y[1] <= self.y[1]
    }

    /// True when the closed disk of radius `r` around `c` lies inside.
    pub fn contains_disk(&self, c: Point, r: f64) -> bool {
        c.x - r >= self.x[0] && c.x + r <= self.x[1] && c.y - r >= self.y[0] && c.y + r <= self.y[1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Horizontal => Axis::Vertical,
            Axis::Vertical => Axis::Horizontal,
        }
    }
}

/// A saddle fixed point and its labeling disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointSpec {
    pub id: String,
    pub position: Point,
    /// Stable eigenvalue, negative.
    pub lambda_s: f64,
    /// Unstable eigenvalue, positive.
    pub lambda_u: f64,
    /// Local axis carrying the stable direction.
    pub stable_axis: Axis,
    /// Radius of the disk used for state labeling and dwell times.
    pub region_radius: f64,
}

impl FixedPointSpec {
    /// `-lambda_s / lambda_u`; cycles attract when these compress more than they expand.
    pub fn stability_ratio(&self) -> f64 {
        -self.lambda_s / self.lambda_u
    }

    /// Eigenvalues along (x, y).
    pub fn axis_rates(&self) -> (f64, f64) {
        match self.stable_axis {
            Axis::Horizontal => (self.lambda_s, self.lambda_u),
            Axis::Vertical => (self.lambda_u, self.lambda_s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LocalDynamics {
    /// Linear saddle dynamics centered on a fixed point.
    Linear { fixed_point: String },
    /// Attracting line at offset `b` with drift `c` along it.
    Transversal { a: f64, b: f64, c: f64, orientation: Axis },
    /// Attracting circle of radius `b` around `center`, angular speed `c`.
    Rotational { a: f64, b: f64, c: f64, center: Point },
}

/// One weighted term of the global field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldPiece {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub region: Rect,
    /// tanh sharpness of the weight window.
    pub slope: f64,
    pub local: LocalDynamics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorridorSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub path: Vec<Point>,
    /// Nominal travel speed along the corridor.
    pub speed: f64,
    /// Behavioral state this corridor represents, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tube_radius: Option<f64>,
}

/// Shape parameters of the piecewise-tanh kick function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelParams {
    pub l1: f64,
    pub l2: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub b: f64,
}

impl KernelParams {
    /// Reference shape used by golden tables.
    pub const REFERENCE: KernelParams = KernelParams { l1: 0.1, l2: 0.1, s1: 50.0, s2: 50.0, s3: 50.0, b: 0.0 };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub id: String,
    pub corridor: String,
    /// Trigger segment crossing the corridor; kicks are displacements along
    /// this segment, positive towards its second endpoint.
    pub section: [Point; 2],
    pub params: KernelParams,
    /// Maximum displacement scale, in phase units.
    pub amplitude: f64,
    /// Along-corridor length mapped to the unit argument of the kernel.
    /// Defaults to local field speed times `dt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_scale: Option<f64>,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_min_visit() -> usize {
    DEFAULT_MIN_VISIT
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub domain: Rect,
    /// Default initial condition for simulations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<Point>,
    #[serde(default = "default_min_visit")]
    pub min_visit: usize,
    /// Declared heteroclinic cycles, as fixed-point id sequences.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycles: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub version: u32,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub settings: Settings,
    pub fixedpoints: Vec<FixedPointSpec>,
    #[serde(default)]
    pub pieces: Vec<FieldPiece>,
    #[serde(default)]
    pub corridors: Vec<CorridorSpec>,
    #[serde(default)]
    pub perturbations: Vec<PerturbationSpec>,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown key: {0}")]
    UnknownKey(String),
    #[error("missing required field: {0}")]
    MissingField(String),
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error("unsupported schema version {0}")]
    Version(u32),
    #[error("unknown fixed point \"{0}\"")]
    UnknownFixedPoint(String),
    #[error("unknown corridor \"{0}\"")]
    UnknownCorridor(String),
    #[error("duplicate id \"{0}\"")]
    DuplicateId(String),
    #[error("stability ratios must be positive, got {0}")]
    NonPositiveRatio(f64),
    #[error("parameter path \"{0}\" does not resolve to a number")]
    BadPath(String),
}

/// Surface format of a spec file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    /// JSON when the text starts with `{`, TOML otherwise.
    pub fn sniff(text: &str) -> Format {
        if text.trim_start().starts_with('{') {
            Format::Json
        } else {
            Format::Toml
        }
    }

    pub fn from_path(path: &std::path::Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "json" => Some(Format::Json),
            "toml" => Some(Format::Toml),
            _ => None,
        }
    }
}

fn classify(message: &str) -> Option<SpecError> {
    if let Some(rest) = message.split("unknown field `").nth(1) {
        let key = rest.split('`').next().unwrap_or(rest);
        return Some(SpecError::UnknownKey(key.to_string()));
    }
    if let Some(rest) = message.split("missing field `").nth(1) {
        let key = rest.split('`').next().unwrap_or(rest);
        return Some(SpecError::MissingField(key.to_string()));
    }
    None
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

/// Parse a spec in either surface format (sniffed from the text).
pub fn parse_spec(text: &str) -> Result<NetworkSpec, SpecError> {
    parse_spec_as(text, Format::sniff(text))
}

pub fn parse_spec_as(text: &str, format: Format) -> Result<NetworkSpec, SpecError> {
    let spec: NetworkSpec = match format {
        Format::Toml => toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            if let Some(err) = classify(&msg) {
                return err;
            }
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            SpecError::Syntax { line, column, message: msg }
        })?,
        Format::Json => serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            if e.is_data() {
                if let Some(err) = classify(&msg) {
                    return err;
                }
            }
            SpecError::Syntax { line: e.line(), column: e.column(), message: msg }
        })?,
    };
    check_references(&spec)?;
    Ok(spec)
}

fn check_references(spec: &NetworkSpec) -> Result<(), SpecError> {
    if spec.version != SCHEMA_VERSION {
        return Err(SpecError::Version(spec.version));
    }
    let mut ids = HashSet::new();
    for fp in &spec.fixedpoints {
        if !ids.insert(fp.id.as_str()) {
            return Err(SpecError::DuplicateId(fp.id.clone()));
        }
    }
    let fp_ids: HashSet<&str> = spec.fixedpoints.iter().map(|f| f.id.as_str()).collect();
    let mut corridor_ids = HashSet::new();
    for c in &spec.corridors {
        if !corridor_ids.insert(c.id.as_str()) {
            return Err(SpecError::DuplicateId(c.id.clone()));
        }
        for end in [&c.from, &c.to] {
            if !fp_ids.contains(end.as_str()) {
                return Err(SpecError::UnknownFixedPoint(end.clone()));
            }
        }
    }
    let mut piece_ids = HashSet::new();
    for p in &spec.pieces {
        if let Some(id) = &p.id {
            if !piece_ids.insert(id.as_str()) {
                return Err(SpecError::DuplicateId(id.clone()));
            }
        }
        if let LocalDynamics::Linear { fixed_point } = &p.local {
            if !fp_ids.contains(fixed_point.as_str()) {
                return Err(SpecError::UnknownFixedPoint(fixed_point.clone()));
            }
        }
    }
    let mut pert_ids = HashSet::new();
    for p in &spec.perturbations {
        if !pert_ids.insert(p.id.as_str()) {
            return Err(SpecError::DuplicateId(p.id.clone()));
        }
        if !corridor_ids.contains(p.corridor.as_str()) {
            return Err(SpecError::UnknownCorridor(p.corridor.clone()));
        }
    }
    for cycle in &spec.settings.cycles {
        for id in cycle {
            if !fp_ids.contains(id.as_str()) {
                return Err(SpecError::UnknownFixedPoint(id.clone()));
            }
        }
    }
    Ok(())
}

/// Serialize to TOML.
pub fn to_toml(spec: &NetworkSpec) -> String {
    toml::to_string(spec).expect("network spec is always representable as TOML")
}

pub fn to_json(spec: &NetworkSpec) -> String {
    serde_json::to_string_pretty(spec).expect("network spec is always representable as JSON")
}

pub fn serialize(spec: &NetworkSpec, format: Format) -> String {
    match format {
        Format::Toml => to_toml(spec),
        Format::Json => to_json(spec),
    }
}

/// Outcome of the heteroclinic cycle stability test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CycleStability {
    /// Every ratio exceeds one.
    pub strict: bool,
    /// The product of the ratios exceeds one.
    pub relaxed: bool,
}

/// Stability of a heteroclinic cycle from its `-lambda_s/lambda_u` ratios.
pub fn check_cycle_stability(ratios: &[f64]) -> Result<CycleStability, SpecError> {
    if ratios.is_empty() {
        return Err(SpecError::Invalid("cycle has no nodes".into()));
    }
    if let Some(&bad) = ratios.iter().find(|r| !(**r > 0.0)) {
        return Err(SpecError::NonPositiveRatio(bad));
    }
    let strict = ratios.iter().all(|&r| r > 1.0);
    let product: f64 = ratios.iter().product();
    Ok(CycleStability { strict, relaxed: product > 1.0 })
}

/// One failed structural check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// Dotted location of the offending item.
    pub at: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.at, self.message)
    }
}

const GEOM_TOL: f64 = 1e-9;

/// Distance from `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * dx, a.y + t * dy))
}

pub fn polyline_distance(p: Point, path: &[Point]) -> f64 {
    match path {
        [] => f64::INFINITY,
        [only] => p.dist(*only),
        _ => path.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

/// Intersection parameter `(t, u)` of segments `p0+t(p1-p0)` and `q0+u(q1-q0)`.
pub fn segment_intersection(p0: Point, p1: Point, q0: Point, q1: Point) -> Option<(f64, f64)> {
    let r = (p1.x - p0.x, p1.y - p0.y);
    let s = (q1.x - q0.x, q1.y - q0.y);
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom == 0.0 {
        return None;
    }
    let qp = (q0.x - p0.x, q0.y - p0.y);
    let t = (qp.0 * s.1 - qp.1 * s.0) / denom;
    let u = (qp.0 * r.1 - qp.1 * r.0) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((t, u))
}

impl NetworkSpec {
    pub fn fixed_point(&self, id: &str) -> Option<&FixedPointSpec> {
        self.fixedpoints.iter().find(|f| f.id == id)
    }

    pub fn corridor(&self, id: &str) -> Option<&CorridorSpec> {
        self.corridors.iter().find(|c| c.id == id)
    }

    /// State names in labeling order: fixed points, then named corridors.
    pub fn state_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.fixedpoints.iter().map(|f| f.id.clone()).collect();
        for c in &self.corridors {
            if let Some(s) = &c.state {
                if !names.contains(s) {
                    names.push(s.clone());
                }
            }
        }
        names
    }

    /// Every simple directed cycle of the corridor graph, each listed once
    /// starting from its lowest-index fixed point.
    pub fn simple_cycles(&self) -> Vec<Vec<String>> {
        let index: HashMap<&str, usize> =
            self.fixedpoints.iter().enumerate().map(|(i, f)| (f.id.as_str(), i)).collect();
        let n = self.fixedpoints.len();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for c in &self.corridors {
            if let (Some(&a), Some(&b)) = (index.get(c.from.as_str()), index.get(c.to.as_str())) {
                adj[a].insert(b);
            }
        }
        let mut out = Vec::new();
        for start in 0..n {
            let mut stack = vec![start];
            cycles_from(start, &adj, &mut stack, &mut out);
        }
        out.into_iter().map(|c| c.into_iter().map(|i| self.fixedpoints[i].id.clone()).collect()).collect()
    }

    /// Read a numeric field addressed by a dotted path such as
    /// `fixedpoints.forward.lambda_u` or `perturbations.g_rev.params.b`.
    pub fn get_param(&self, path: &str) -> Result<f64, SpecError> {
        let value = serde_json::to_value(self).expect("spec serializes");
        resolve(&value, path).and_then(|v| v.as_f64()).ok_or_else(|| SpecError::BadPath(path.to_string()))
    }

    /// Return a copy with the numeric field at `path` replaced.
    pub fn with_param(&self, path: &str, value: f64) -> Result<NetworkSpec, SpecError> {
        self.with_params(&[(path, value)])
    }

    pub fn with_params(&self, assignments: &[(&str, f64)]) -> Result<NetworkSpec, SpecError> {
        let mut tree = serde_json::to_value(self).expect("spec serializes");
        for (path, value) in assignments {
            let slot = resolve_mut(&mut tree, path)
                .filter(|v| v.is_number())
                .ok_or_else(|| SpecError::BadPath(path.to_string()))?;
            *slot = serde_json::Value::from(*value);
        }
        serde_json::from_value(tree).map_err(|e| SpecError::Invalid(e.to_string()))
    }
}

fn cycles_from(start: usize, adj: &[BTreeSet<usize>], stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *stack.last().unwrap();
    for &next in &adj[last] {
        if next == start {
            out.push(stack.clone());
        } else if next > start && !stack.contains(&next) {
            stack.push(next);
            cycles_from(start, adj, stack, out);
            stack.pop();
        }
    }
}

fn find_child<'a>(v: &'a serde_json::Value, seg: &str) -> Option<&'a serde_json::Value> {
    match v {
        serde_json::Value::Object(map) => map.get(seg),
        serde_json::Value::Array(items) => items
            .iter()
            .find(|it| it.get("id").and_then(|i| i.as_str()) == Some(seg))
            .or_else(|| seg.parse::<usize>().ok().and_then(|i| items.get(i))),
        _ => None,
    }
}

fn resolve<'a>(v: &'a serde_json::Value, path: &str) -> Option<&'a serde_json::Value> {
    path.split('.').try_fold(v, find_child)
}

fn resolve_mut<'a>(v: &'a mut serde_json::Value, path: &str) -> Option<&'a mut serde_json::Value> {
    let mut cur = v;
    for seg in path.split('.') {
        cur = match cur {
            serde_json::Value::Object(map) => map.get_mut(seg)?,
            serde_json::Value::Array(items) => {
                let pos = items
                    .iter()
                    .position(|it| it.get("id").and_then(|i| i.as_str()) == Some(seg))
                    .or_else(|| seg.parse::<usize>().ok())?;
                items.get_mut(pos)?
            }
            _ => return None,
        };
    }
    Some(cur)
}

/// Check every structural invariant; an empty list means the spec is sound.
pub fn validate(spec: &NetworkSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |at: String, message: String| out.push(Violation { at, message });
    let s = &spec.settings;
    let domain = s.domain;

    if !(s.dt > 0.0) {
        flag("settings.dt".into(), "dt must be > 0".into());
    }
    if !domain.is_well_formed() {
        flag("settings.domain".into(), "domain must satisfy x1 < x2 and y1 < y2".into());
    }
    if s.min_visit == 0 {
        flag("settings.min_visit".into(), "min_visit must be >= 1".into());
    }
    if let Some(init) = s.init {
        if !domain.contains(init) {
            flag("settings.init".into(), "initial point lies outside the domain".into());
        }
    }

    for fp in &spec.fixedpoints {
        let at = format!("fixedpoints.{}", fp.id);
        if !(fp.lambda_s < 0.0) {
            flag(at.clone(), "lambda_s must be < 0".into());
        }
        if !(fp.lambda_u > 0.0) {
            flag(at.clone(), "lambda_u must be > 0".into());
        }
        if !(fp.region_radius > 0.0) {
            flag(at.clone(), "region_radius must be > 0".into());
        } else if !domain.contains_disk(fp.position, fp.region_radius) {
            flag(at.clone(), "labeling disk extends outside the domain".into());
        }
    }
    for (i, a) in spec.fixedpoints.iter().enumerate() {
        for b in &spec.fixedpoints[i + 1..] {
            if a.position.dist(b.position) <= a.region_radius + b.region_radius {
                flag(format!("fixedpoints.{}", a.id), format!("labeling disk overlaps the disk of \"{}\"", b.id));
            }
        }
    }

    for (i, piece) in spec.pieces.iter().enumerate() {
        let at = format!("pieces.{}", piece.id.clone().unwrap_or_else(|| i.to_string()));
        if !piece.region.is_well_formed() {
            flag(at.clone(), "region must satisfy x1 < x2 and y1 < y2".into());
        } else if !domain.contains_rect(&piece.region) {
            flag(at.clone(), "region extends outside the domain".into());
        }
        if !(piece.slope > 0.0) {
            flag(at.clone(), "slope must be > 0".into());
        }
        match &piece.local {
            LocalDynamics::Linear { .. } => {}
            LocalDynamics::Transversal { a, .. } => {
                if !(*a > 0.0) {
                    flag(at.clone(), "transversal a must be > 0".into());
                }
            }
            LocalDynamics::Rotational { a, b, .. } => {
                if !(*a > 0.0) {
                    flag(at.clone(), "rotational a must be > 0".into());
                }
                if !(*b > 0.0) {
                    flag(at.clone(), "rotational b must be > 0".into());
                }
            }
        }
    }

    let states: HashSet<&str> = spec.fixedpoints.iter().map(|f| f.id.as_str()).collect();
    for c in &spec.corridors {
        let at = format!("corridors.{}", c.id);
        if !(c.speed > 0.0) {
            flag(at.clone(), "speed must be > 0".into());
        }
        if c.path.len() < 2 {
            flag(at.clone(), "path needs at least two waypoints".into());
            continue;
        }
        if let (Some(from), Some(to)) = (spec.fixed_point(&c.from), spec.fixed_point(&c.to)) {
            let start = c.path[0];
            let end = *c.path.last().unwrap();
            // unstable axis of `from` is the line through it orthogonal to the stable axis
            let on_unstable = match from.stable_axis {
                Axis::Horizontal => (start.x - from.position.x).abs() <= GEOM_TOL,
                Axis::Vertical => (start.y - from.position.y).abs() <= GEOM_TOL,
            };
            if !on_unstable {
                flag(at.clone(), format!("path must start on the unstable axis of \"{}\"", from.id));
            }
            let on_stable = match to.stable_axis {
                Axis::Horizontal => (end.y - to.position.y).abs() <= GEOM_TOL,
                Axis::Vertical => (end.x - to.position.x).abs() <= GEOM_TOL,
            };
            if !on_stable {
                flag(at.clone(), format!("path must end on the stable axis of \"{}\"", to.id));
            }
        }
        for p in &c.path {
            if !domain.contains(*p) {
                flag(at.clone(), "path leaves the domain".into());
                break;
            }
        }
        match (&c.state, c.tube_radius) {
            (Some(state), Some(r)) => {
                if states.contains(state.as_str()) {
                    flag(at.clone(), format!("state \"{state}\" clashes with a fixed point id"));
                }
                if !(r > 0.0) {
                    flag(at.clone(), "tube_radius must be > 0 for a named corridor".into());
                } else {
                    for fp in &spec.fixedpoints {
                        if polyline_distance(fp.position, &c.path) <= fp.region_radius + r {
                            flag(at.clone(), format!("tube overlaps the disk of \"{}\"", fp.id));
                        }
                    }
                    let inside = c.path.iter().all(|p| domain.contains_disk(*p, r));
                    if !inside {
                        flag(at.clone(), "tube extends outside the domain".into());
                    }
                }
            }
            (Some(_), None) => flag(at.clone(), "named corridor needs a tube_radius".into()),
            (None, Some(_)) => flag(at.clone(), "tube_radius given without a state name".into()),
            (None, None) => {}
        }
    }
    // tubes of different named states must not overlap
    let named: Vec<&CorridorSpec> =
        spec.corridors.iter().filter(|c| c.state.is_some() && c.tube_radius.is_some()).collect();
    for (i, a) in named.iter().enumerate() {
        for b in &named[i + 1..] {
            if a.state == b.state {
                continue;
            }
            let gap = a
                .path
                .windows(2)
                .flat_map(|w| b.path.iter().map(move |p| point_segment_distance(*p, w[0], w[1])))
                .chain(
                    b.path.windows(2).flat_map(|w| a.path.iter().map(move |p| point_segment_distance(*p, w[0], w[1]))),
                )
                .fold(f64::INFINITY, f64::min);
            if gap <= a.tube_radius.unwrap() + b.tube_radius.unwrap() {
                flag(format!("corridors.{}", a.id), format!("tube overlaps the tube of \"{}\"", b.id));
            }
        }
    }

    for p in &spec.perturbations {
        let at = format!("perturbations.{}", p.id);
        let k = &p.params;
        if !(p.amplitude >= 0.0) {
            flag(at.clone(), "amplitude must be >= 0".into());
        }
        if !(k.l1 > 0.0 && k.l1 < 1.0) {
            flag(at.clone(), "l1 must lie in (0, 1)".into());
        }
        if !(k.l2 > 0.0 && k.l2 < 1.0) {
            flag(at.clone(), "l2 must lie in (0, 1)".into());
        }
        if !(k.s1 > 0.0 && k.s2 > 0.0 && k.s3 > 0.0) {
            flag(at.clone(), "slopes s1, s2, s3 must be > 0".into());
        }
        if !k.b.is_finite() {
            flag(at.clone(), "bias b must be finite".into());
        }
        if let Some(scale) = p.input_scale {
            if !(scale > 0.0) {
                flag(at.clone(), "input_scale must be > 0".into());
            }
        }
        if let Some(c) = spec.corridor(&p.corridor) {
            let hits: Vec<Point> = c
                .path
                .windows(2)
                .filter_map(|w| {
                    segment_intersection(w[0], w[1], p.section[0], p.section[1])
                        .map(|(t, _)| Point::new(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y)))
                })
                .collect();
            // a crossing exactly at a shared waypoint is reported by both segments
            let mut distinct: Vec<Point> = Vec::new();
            for h in hits {
                if !distinct.iter().any(|d| d.dist(h) <= GEOM_TOL) {
                    distinct.push(h);
                }
            }
            if distinct.len() != 1 {
                flag(
                    at.clone(),
                    format!("section must cross corridor \"{}\" exactly once (found {})", c.id, distinct.len()),
                );
            } else if let Some(to) = spec.fixed_point(&c.to) {
                if distinct[0].dist(to.position) <= to.region_radius {
                    flag(at.clone(), format!("section lies inside the disk of \"{}\"", to.id));
                }
            }
        }
    }

    for (i, cycle) in spec.settings.cycles.iter().enumerate() {
        let at = format!("settings.cycles.{i}");
        if cycle.is_empty() {
            flag(at, "cycle is empty".into());
            continue;
        }
        for k in 0..cycle.len() {
            let (a, b) = (&cycle[k], &cycle[(k + 1) % cycle.len()]);
            if !spec.corridors.iter().any(|c| &c.from == a && &c.to == b) {
                flag(at.clone(), format!("no corridor from \"{a}\" to \"{b}\""));
            }
        }
        let ratios: Option<Vec<f64>> =
            cycle.iter().map(|id| spec.fixed_point(id).map(|f| f.stability_ratio())).collect();
        if let Some(ratios) = ratios {
            if let Ok(st) = check_cycle_stability(&ratios) {
                if !st.relaxed {
                    let product: f64 = ratios.iter().product();
                    flag(at, format!("unstable cycle: ratio product {product} <= 1"));
                }
            }
        }
    }
    out
}
