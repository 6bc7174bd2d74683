//! Static SVG line charts of a finished sweep.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::manifest::{Manifest, RunStatus};
use super::table::TrajectoryTable;

pub const PLOTTABLE: [&str; 3] = ["E_b", "delta_E", "ergotropy"];

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// One curve: legend text and `(t, y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn check_quantity(quantity: &str) -> Result<()> {
    if PLOTTABLE.contains(&quantity) {
        Ok(())
    } else {
        Err(Error::Usage(format!("cannot plot '{quantity}' (expected one of {})", PLOTTABLE.join(", "))))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
        let pad = (0.1 * lo.abs()).max(0.5);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// Renders series into an SVG document.
pub fn render(title: &str, y_label: &str, series: &[Series]) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = padded_range(all().map(|p| p.0));
    let (y0, y1) = padded_range(all().map(|p| p.1));
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ =
        writeln!(w, r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#);
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            w,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(w, r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">t (dimensionless)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{} (dimensionless)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> =
            s.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()).map(|&(x, y)| (sx(x), sy(y))).collect();
        let label = escape(&s.label);
        match pts.as_slice() {
            [] => {}
            [(px, py)] => {
                let _ = writeln!(
                    w,
                    r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"><title>{label}</title></circle>"#
                );
            }
            _ => {
                let coords: Vec<String> = pts.iter().map(|(px, py)| format!("{px:.2},{py:.2}")).collect();
                let _ = writeln!(
                    w,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{label}</title></polyline>"#,
                    coords.join(" ")
                );
            }
        }
        let ly = TOP + 12.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(w, r#"<text x="{:.1}" y="{:.1}">{label}</text>"#, lx + 32.0, ly + 4.0);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Chart of `quantity` for every successful run in a sweep directory.
pub fn emit_plot(dir: &Path, quantity: &str) -> Result<String> {
    check_quantity(quantity)?;
    let manifest = Manifest::read_dir(dir)?;
    let mut series = Vec::new();
    for run in &manifest.runs {
        if !matches!(run.status, RunStatus::Ok { .. }) {
            continue;
        }
        let table = TrajectoryTable::read(&dir.join(&run.file))?;
        let t = table.column("t")?;
        let y = table.column(quantity)?;
        series.push(Series {
            label: format!("{} = {}", manifest.varied, tick_label(run.value)),
            points: t.into_iter().zip(y).collect(),
        });
    }
    let title = format!("{}: {quantity}", manifest.label);
    Ok(render(&title, quantity, &series))
}

/// Writes the chart to `out`, or to `<dir>/<quantity>.svg`.
pub fn write_plot(dir: &Path, quantity: &str, out: Option<&Path>) -> Result<PathBuf> {
    let svg = emit_plot(dir, quantity)?;
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| dir.join(format!("{quantity}.svg")));
    std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
