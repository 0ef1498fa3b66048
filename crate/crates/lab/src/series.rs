//! Correlation-series files: CSV `N,re,im,abs,err_estimate` and a
//! two-panel SVG (log |c_N| and the Wiener average A_N).

use std::fmt::Write as _;
use std::path::Path;

use liedeg_core::CorrelationSeries;
use num_complex::Complex;

use crate::error::{LabError, LabResult};

pub const CSV_HEADER: [&str; 5] = ["N", "re", "im", "abs", "err_estimate"];

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRow {
    pub n: usize,
    pub value: Complex<f64>,
    pub err: f64,
}

pub fn rows(series: &CorrelationSeries) -> Vec<SeriesRow> {
    series.values.iter().zip(&series.errors).enumerate().map(|(n, (v, e))| SeriesRow { n, value: *v, err: *e }).collect()
}

pub fn write_csv(path: &Path, rows: &[SeriesRow]) -> LabResult<()> {
    let io = |e: csv::Error| LabError::Series { path: path.to_path_buf(), reason: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([r.n.to_string(), r.value.re.to_string(), r.value.im.to_string(), r.value.norm().to_string(), r.err.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn read_csv(path: &Path) -> LabResult<Vec<SeriesRow>> {
    let bad = |reason: String| LabError::Series { path: path.to_path_buf(), reason };
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => LabError::io(path, std::io::Error::other(e.to_string())),
        _ => bad(e.to_string()),
    })?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(bad(format!("expected header {}", CSV_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |k: usize| rec.get(k).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| bad(format!("row {}: column {} is not a number", i + 1, CSV_HEADER[k])));
        let n = rec.get(0).and_then(|s| s.parse::<usize>().ok()).ok_or_else(|| bad(format!("row {}: N is not an index", i + 1)))?;
        out.push(SeriesRow { n, value: Complex::new(num(1)?, num(2)?), err: num(4)? });
    }
    Ok(out)
}

/// `A_N = (1/N) Σ_{n=1}^{N} |c_n|²` indexed like the rows; `A_0 = 0`.
fn wiener(rows: &[SeriesRow]) -> Vec<f64> {
    let mut acc = 0.0;
    rows.iter()
        .map(|r| {
            if r.n == 0 {
                0.0
            } else {
                acc += r.value.norm_sqr();
                acc / r.n as f64
            }
        })
        .collect()
}

const WIDTH: f64 = 640.0;
const PANEL_H: f64 = 200.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const TOP: [f64; 2] = [30.0, 280.0];
const LOG_FLOOR: f64 = -18.0;

struct Panel<'a> {
    title: &'a str,
    top: f64,
    ys: Vec<f64>,
}

fn render_panel(svg: &mut String, p: &Panel<'_>, xs: &[f64]) {
    let (x0, x1) = (xs.first().copied().unwrap_or(0.0), xs.last().copied().unwrap_or(1.0));
    let (mut y0, mut y1) = p.ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(*y), b.max(*y)));
    // Flat, empty or NaN ranges get a unit window.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let sx = |x: f64| MARGIN_L + if x1 > x0 { (x - x0) / (x1 - x0) * plot_w } else { 0.5 * plot_w };
    let sy = |y: f64| p.top + PANEL_H - (y - y0) / (y1 - y0) * PANEL_H;
    let _ = writeln!(svg, r##"<rect x="{MARGIN_L}" y="{}" width="{plot_w}" height="{PANEL_H}" fill="none" stroke="#888"/>"##, p.top);
    let _ = writeln!(svg, r#"<text x="{MARGIN_L}" y="{:.1}" font-size="13">{}</text>"#, p.top - 8.0, p.title);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{y1:.3}</text>"#, MARGIN_L - 4.0, p.top + 10.0);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{y0:.3}</text>"#, MARGIN_L - 4.0, p.top + PANEL_H);
    let _ = writeln!(svg, r#"<text x="{MARGIN_L}" y="{:.1}" font-size="11">N = {x0}</text>"#, p.top + PANEL_H + 14.0);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">N = {x1}</text>"#, WIDTH - MARGIN_R, p.top + PANEL_H + 14.0);
    let pts: Vec<String> = xs.iter().zip(&p.ys).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
    let _ = writeln!(svg, r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1" points="{}"/>"##, pts.join(" "));
    for (x, y) in xs.iter().zip(&p.ys) {
        let _ = writeln!(svg, r##"<circle class="marker" cx="{:.2}" cy="{:.2}" r="2" fill="#1f77b4"/>"##, sx(*x), sy(*y));
    }
}

pub fn render_svg(rows: &[SeriesRow], title: &str) -> LabResult<String> {
    if rows.is_empty() {
        return Err(LabError::Series { path: title.into(), reason: "empty series".into() });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let logs = rows.iter().map(|r| r.value.norm().log10().max(LOG_FLOOR)).collect();
    let height = TOP[1] + PANEL_H + 30.0;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#);
    let _ = writeln!(svg, r#"<title>{title}</title>"#);
    render_panel(&mut svg, &Panel { title: "log10 |c_N|", top: TOP[0], ys: logs }, &xs);
    render_panel(&mut svg, &Panel { title: "A_N = (1/N) sum |c_n|^2", top: TOP[1], ys: wiener(rows) }, &xs);
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders the SVG for a CSV series file.
pub fn emit_plot(csv_path: &Path, svg_path: &Path) -> LabResult<()> {
    let rows = read_csv(csv_path)?;
    if rows.is_empty() {
        return Err(LabError::Series { path: csv_path.to_path_buf(), reason: "empty series".into() });
    }
    let title = csv_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let svg = render_svg(&rows, &title)?;
    std::fs::write(svg_path, svg).map_err(|e| LabError::io(svg_path, e))
}
