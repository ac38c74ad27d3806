//! Artifact emission for tower reports: JSON, CSV and an SVG decay plot.

use std::fmt::Write as _;

use serde::Serialize;

use crate::spectrum::sig12;
use crate::tower::{LevelStatus, TowerReport};

/// Wraps a document with the `"schema"` version field.
#[derive(Debug, Serialize)]
pub struct Versioned<'a, T: Serialize> {
    pub schema: u32,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn versioned_json<T: Serialize>(body: &T) -> String {
    let doc = Versioned {
        schema: crate::SCHEMA_VERSION,
        body,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn tower_json(report: &TowerReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub const CSV_HEADER: &str = "level,status,vertices,edges,rank_pi1,sheets_log2,lemma_bound,h_exact,h_upper,h_upper_method,lambda1_combinatorial,lambda1_normalized,cover_verified,witnesses_verified";

/// Float text identical to the JSON artifact.
fn float_cell(x: Option<f64>) -> String {
    x.map(|x| serde_json::to_string(&sig12(x)).unwrap())
        .unwrap_or_default()
}

fn cell<T: ToString>(x: Option<T>) -> String {
    x.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per level; empty cells stand for absent values.
pub fn tower_csv(report: &TowerReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for l in &report.levels {
        let status = match l.status {
            LevelStatus::Constructed => "constructed",
            LevelStatus::Predicted => "predicted",
        };
        let row = [
            l.level.to_string(),
            status.to_string(),
            l.vertices.to_string(),
            l.edges.to_string(),
            cell(l.rank_pi1),
            cell(l.sheets_log2),
            cell(l.lemma_bound),
            cell(l.h_exact),
            cell(l.h_upper.map(|b| b.value)),
            cell(l.h_upper.map(|b| b.method)),
            float_cell(l.lambda1_combinatorial),
            float_cell(l.lambda1_normalized),
            cell(l.cover_verified),
            l.witnesses_verified.to_string(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

struct Series {
    name: &'static str,
    color: &'static str,
    points: Vec<(usize, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

/// Decay plot: level on x, log10 scale on y.
pub fn tower_svg(report: &TowerReport) -> String {
    let series = [
        Series {
            name: "lemma bound 2/#V(n-1)",
            color: "#1f77b4",
            points: report
                .levels
                .iter()
                .filter_map(|l| l.lemma_bound.map(|b| (l.level, b.to_f64())))
                .collect(),
        },
        Series {
            name: "best h upper bound",
            color: "#ff7f0e",
            points: report
                .levels
                .iter()
                .filter_map(|l| l.h_upper.map(|b| (l.level, b.value.to_f64())))
                .collect(),
        },
        Series {
            name: "exact h",
            color: "#2ca02c",
            points: report
                .levels
                .iter()
                .filter_map(|l| l.h_exact.map(|b| (l.level, b.to_f64())))
                .collect(),
        },
        Series {
            name: "lambda1 (combinatorial)",
            color: "#d62728",
            points: report
                .levels
                .iter()
                .filter_map(|l| l.lambda1_combinatorial.map(|x| (l.level, sig12(x))))
                .collect(),
        },
    ];

    let values: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(_, y)| y))
        .filter(|&y| y > 0.0)
        .collect();
    let (lo, hi) = if values.is_empty() {
        (0, 1)
    } else {
        let lo = values.iter().fold(f64::INFINITY, |m, &y| m.min(y)).log10().floor() as i32;
        let hi = values.iter().fold(f64::NEG_INFINITY, |m, &y| m.max(y)).log10().ceil() as i32;
        (lo, hi.max(lo + 1))
    };
    let max_level = report.levels.last().map_or(0, |l| l.level).max(1);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_of = |level: usize| LEFT + plot_w * level as f64 / max_level as f64;
    let y_of = |y: f64| TOP + plot_h * (hi as f64 - y.log10()) / (hi - lo) as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="13">Expansion along the tower over {}</text>"#,
        LEFT + plot_w / 2.0,
        xml_escape(&report.seed.name)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    for e in lo..=hi {
        let y = y_of(10f64.powi(e));
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for level in 0..=max_level {
        let x = x_of(level);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{level}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">level n</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">value (log scale)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|&&(_, y)| y > 0.0)
            .map(|&(l, y)| format!("{:.2},{:.2}", x_of(l), y_of(y)))
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
                s.color,
                pts.join(" ")
            );
        }
        for p in &pts {
            let (x, y) = p.split_once(',').unwrap();
            let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{}"/>"#, s.color);
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 18.0,
            s.color,
            lx + 24.0,
            ly + 4.0,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
