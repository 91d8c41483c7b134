//! Static SVG renderings: phase portraits, dwell histograms and transition
//! heatmaps. Output is plain text built with `format!`, so identical inputs
//! give byte-identical files.

use std::fmt::Write;

use serde_json::Value;

use crate::analysis::SwitchingStats;
use crate::dynamics::Trajectory;
use crate::netspec::{NetworkSpec, Point};

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Longest polyline written for a trajectory; longer ones are thinned.
pub const MAX_PATH_POINTS: usize = 20_000;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// The parts of a stats document the plots need.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsView {
    pub states: Vec<String>,
    pub bin_edges: Vec<f64>,
    pub matrix: Vec<Option<Vec<f64>>>,
    pub dwell_fractions: Vec<Option<Vec<f64>>>,
}

impl StatsView {
    pub fn from_stats(stats: &SwitchingStats) -> Self {
        StatsView {
            states: stats.states.clone(),
            bin_edges: stats.bin_edges.clone(),
            matrix: stats.transition_matrix(),
            dwell_fractions: stats.states.iter().map(|s| stats.dwell_fractions(s).expect("own state")).collect(),
        }
    }

    /// Read the document written by [`SwitchingStats::to_json`].
    pub fn from_json(doc: &Value) -> Result<Self, String> {
        let floats = |v: &Value| -> Option<Vec<f64>> { v.as_array()?.iter().map(Value::as_f64).collect() };
        let states: Vec<String> = doc["states"]
            .as_array()
            .and_then(|a| a.iter().map(|s| s.as_str().map(str::to_string)).collect())
            .ok_or("missing \"states\"")?;
        let bin_edges = floats(&doc["bin_edges"]).ok_or("missing \"bin_edges\"")?;
        let rows = doc["transition_matrix"].as_array().ok_or("missing \"transition_matrix\"")?;
        if rows.len() != states.len() {
            return Err("transition_matrix does not match states".into());
        }
        let matrix = rows.iter().map(|r| if r.is_null() { None } else { floats(r) }).collect();
        let dwell_fractions = states
            .iter()
            .map(|s| {
                let v = &doc["dwell_fractions"][s];
                if v.is_null() {
                    None
                } else {
                    floats(v)
                }
            })
            .collect();
        Ok(StatsView { states, bin_edges, matrix, dwell_fractions })
    }
}

fn bin_label(edges: &[f64], b: usize) -> String {
    match (b.checked_sub(1).map(|i| edges[i]), edges.get(b)) {
        (None, Some(hi)) => format!("0-{hi}"),
        (Some(lo), Some(hi)) => format!("{lo}-{hi}"),
        (Some(lo), None) => format!(">{lo}"),
        (None, None) => "all".into(),
    }
}

/// Phase portrait: state disks and tubes shaded, corridors drawn thin, the
/// trajectory on top.
pub fn phase_svg(spec: &NetworkSpec, traj: &Trajectory) -> String {
    let d = spec.settings.domain;
    let (w, h) = (d.x[1] - d.x[0], d.y[1] - d.y[0]);
    let scale = 600.0 / w.max(h);
    let (pw, ph) = (w * scale, h * scale);
    let px = |p: Point| ((p.x - d.x[0]) * scale, (d.y[1] - p.y) * scale);
    let states = spec.state_names();
    let state_color = |name: &str| color(states.iter().position(|s| s == name).unwrap_or(0));
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pw:.1}" height="{:.1}" viewBox="0 0 {pw:.1} {:.1}">"#,
        ph + 30.0,
        ph + 30.0
    )
    .unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{pw:.1}" height="{ph:.1}" fill="white" stroke="black"/>"#).unwrap();
    for c in &spec.corridors {
        let pts: Vec<String> = c.path.iter().map(|&p| px(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        if let (Some(state), Some(r)) = (&c.state, c.tube_radius) {
            writeln!(
                s,
                r#"<polyline class="state" points="{}" fill="none" stroke="{}" stroke-opacity="0.25" stroke-width="{:.2}" stroke-linecap="round" stroke-linejoin="round"/>"#,
                pts.join(" "),
                state_color(state),
                2.0 * r * scale
            )
            .unwrap();
        }
        writeln!(s, r##"<polyline points="{}" fill="none" stroke="#999" stroke-width="0.8"/>"##, pts.join(" "))
            .unwrap();
    }
    for f in &spec.fixedpoints {
        let (x, y) = px(f.position);
        writeln!(
            s,
            r#"<circle class="state" cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{}" fill-opacity="0.25"/>"#,
            f.region_radius * scale,
            state_color(&f.id)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            y - f.region_radius * scale - 3.0,
            escape(&f.id)
        )
        .unwrap();
    }
    let stride = traj.points.len().div_ceil(MAX_PATH_POINTS).max(1);
    let mut pts: Vec<String> =
        traj.points.iter().step_by(stride).map(|&p| px(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    if !(traj.points.len() - 1).is_multiple_of(stride) {
        let (x, y) = px(*traj.points.last().expect("non-empty"));
        pts.push(format!("{x:.2},{y:.2}"));
    }
    writeln!(
        s,
        r#"<polyline class="trajectory" points="{}" fill="none" stroke="black" stroke-width="0.6"/>"#,
        pts.join(" ")
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="4" y="{:.1}" font-size="12">{} ({} steps)</text>"#,
        ph + 20.0,
        escape(&spec.name),
        traj.points.len() - 1
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

/// Grouped bars: for every state, the fraction of visits in each dwell bin.
pub fn histogram_svg(view: &StatsView) -> String {
    let nb = view.bin_edges.len() + 1;
    let n = view.states.len();
    let (left, top, plot_h, group_w) = (50.0, 20.0, 240.0, 24.0 * nb as f64 + 20.0);
    let width = left + group_w * n as f64 + 130.0;
    let height = top + plot_h + 60.0;
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#).unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{width:.1}" height="{height:.1}" fill="white"/>"#).unwrap();
    let y0 = top + plot_h;
    for k in 0..=4 {
        let frac = k as f64 / 4.0;
        let y = y0 - frac * plot_h;
        writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
            left + group_w * n as f64
        )
        .unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{frac}</text>"#, left - 4.0, y + 3.0)
            .unwrap();
    }
    for (i, state) in view.states.iter().enumerate() {
        let gx = left + group_w * i as f64 + 10.0;
        if let Some(fr) = &view.dwell_fractions[i] {
            for (b, f) in fr.iter().enumerate() {
                let bh = f * plot_h;
                writeln!(
                    s,
                    r#"<rect class="bar" x="{:.1}" y="{:.1}" width="22" height="{bh:.1}" fill="{}"><title>{} {}: {f}</title></rect>"#,
                    gx + 24.0 * b as f64,
                    y0 - bh,
                    color(b),
                    escape(state),
                    escape(&bin_label(&view.bin_edges, b))
                )
                .unwrap();
            }
        }
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            gx + 12.0 * nb as f64,
            y0 + 16.0,
            escape(state)
        )
        .unwrap();
    }
    writeln!(s, r#"<line x1="{left}" y1="{y0}" x2="{:.1}" y2="{y0}" stroke="black"/>"#, left + group_w * n as f64)
        .unwrap();
    let lx = left + group_w * n as f64 + 15.0;
    for b in 0..nb {
        let ly = top + 16.0 * b as f64;
        writeln!(s, r#"<rect x="{lx:.1}" y="{ly:.1}" width="10" height="10" fill="{}"/>"#, color(b)).unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            lx + 14.0,
            ly + 9.0,
            escape(&bin_label(&view.bin_edges, b))
        )
        .unwrap();
    }
    writeln!(s, r#"<text x="{left}" y="{:.1}" font-size="11">fraction of visits per dwell bin</text>"#, height - 12.0)
        .unwrap();
    s.push_str("</svg>\n");
    s
}

/// Heatmap of the transition matrix with each probability written in its cell.
/// Rows of states never left are drawn grey.
pub fn matrix_svg(view: &StatsView) -> String {
    let n = view.states.len();
    let (left, top, cell) = (110.0, 100.0, 56.0);
    let size = left + cell * n as f64 + 20.0;
    let height = top + cell * n as f64 + 20.0;
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.1}" height="{height:.1}" viewBox="0 0 {size:.1} {height:.1}">"#).unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{size:.1}" height="{height:.1}" fill="white"/>"#).unwrap();
    for (j, to) in view.states.iter().enumerate() {
        let x = left + cell * (j as f64 + 0.5);
        writeln!(s, r#"<text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="start" transform="rotate(-45 {x:.1} {:.1})">{}</text>"#, top - 6.0, top - 6.0, escape(to)).unwrap();
    }
    for (i, from) in view.states.iter().enumerate() {
        let y = top + cell * i as f64;
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
            left - 6.0,
            y + cell / 2.0 + 4.0,
            escape(from)
        )
        .unwrap();
        for j in 0..n {
            let x = left + cell * j as f64;
            match &view.matrix[i] {
                Some(row) => {
                    let p = row[j];
                    // white to deep blue
                    let shade = |c: f64| (255.0 - p * (255.0 - c)).round() as u8;
                    let fill = format!("#{:02x}{:02x}{:02x}", shade(8.0), shade(48.0), shade(107.0));
                    let ink = if p > 0.5 { "white" } else { "black" };
                    writeln!(s, r#"<rect class="cell" x="{x:.1}" y="{y:.1}" width="{cell}" height="{cell}" fill="{fill}" stroke="white"/>"#).unwrap();
                    writeln!(
                        s,
                        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle" fill="{ink}">{p:.2}</text>"#,
                        x + cell / 2.0,
                        y + cell / 2.0 + 4.0
                    )
                    .unwrap();
                }
                None => {
                    writeln!(s, r##"<rect class="cell" x="{x:.1}" y="{y:.1}" width="{cell}" height="{cell}" fill="#eee" stroke="white"/>"##).unwrap();
                }
            }
        }
    }
    writeln!(s, r#"<text x="8" y="16" font-size="12">rows: from, columns: to</text>"#).unwrap();
    s.push_str("</svg>\n");
    s
}
