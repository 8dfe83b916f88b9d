//! Serialisation of reports: JSON (whole report), CSV (rows only) and a
//! self-contained log-log SVG of one column.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::report::{ExperimentReport, Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

/// What to draw in an SVG: one column against the row abscissa, with
/// reference lines of the given log-log slopes through the first point.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub column: String,
    pub guides: Vec<f64>,
}

impl PlotSpec {
    pub fn default_for<R: Row>() -> Self {
        Self {
            column: R::PLOT.0.to_string(),
            guides: R::PLOT.1.to_vec(),
        }
    }
}

pub fn to_json<R: Row>(report: &ExperimentReport<R>) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn to_csv<R: Row>(report: &ExperimentReport<R>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if report.rows.is_empty() {
        writer.write_record(R::COLUMNS)?;
    }
    for row in &report.rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| HarnessError::Io {
        path: "<csv buffer>".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    /// Decade-range axis over `log10` values, padded when degenerate.
    fn fit(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self { lo: lo - pad, hi: hi + pad }
    }

    fn unit(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions: integer decades if at least two fall inside, else the ends.
    fn ticks(&self) -> Vec<f64> {
        let decades: Vec<f64> = (self.lo.ceil() as i64..=self.hi.floor() as i64).map(|d| d as f64).collect();
        if decades.len() >= 2 {
            decades
        } else {
            let span = self.hi - self.lo;
            vec![self.lo + 0.1 * span, self.lo + 0.5 * span, self.hi - 0.1 * span]
        }
    }
}

fn label(log_value: f64) -> String {
    format!("{:.3e}", 10f64.powf(log_value))
}

pub fn to_svg<R: Row>(report: &ExperimentReport<R>, plot: &PlotSpec) -> Result<String> {
    let xs = report.column(R::X)?;
    let ys = report.column(&plot.column)?;
    let pts: Vec<(f64, f64)> = xs
        .into_iter()
        .zip(ys)
        .filter_map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) if x > 0.0 && y > 0.0 => Some((x.log10(), y.log10())),
            _ => None,
        })
        .collect();
    if pts.is_empty() {
        return Err(HarnessError::NothingToPlot(plot.column.clone()));
    }
    let (x0, y0) = pts[0];
    let ax = Axis::fit(pts.iter().map(|p| p.0));
    let guide_ends = plot
        .guides
        .iter()
        .flat_map(|s| [y0 + s * (ax.lo - x0), y0 + s * (ax.hi - x0)]);
    let ay = Axis::fit(pts.iter().map(|p| p.1).chain(guide_ends));

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + ax.unit(x) * plot_w;
    let py = |y: f64| MARGIN_TOP + (1.0 - ay.unit(y)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}: {} vs {}</text>"#,
        WIDTH / 2.0,
        report.experiment,
        plot.column,
        R::X
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for t in ax.ticks() {
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0,
            MARGIN_TOP + plot_h + 20.0,
            label(t)
        );
    }
    for t in ay.ticks() {
        let y = py(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{} (log)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        R::X
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{} (log)</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        plot.column
    );
    for slope in &plot.guides {
        let (ya, yb) = (y0 + slope * (ax.lo - x0), y0 + slope * (ax.hi - x0));
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}" fill="gray">slope {slope}</text>"#,
            px(ax.lo),
            py(ya),
            px(ax.hi),
            py(yb),
            px(ax.hi) - 60.0,
            py(yb) - 6.0
        );
    }
    let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
        path.join(" ")
    );
    for &(x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="steelblue"/>"#, px(x), py(y));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render<R: Row>(report: &ExperimentReport<R>, format: Format, plot: &PlotSpec) -> Result<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
        Format::Svg => to_svg(report, plot),
    }
}

/// Renders and writes `report` to `path`.
pub fn emit<R: Row>(report: &ExperimentReport<R>, format: Format, path: &Path, plot: &PlotSpec) -> Result<()> {
    let text = render(report, format, plot)?;
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
