//! Tabular and graphical outputs: closed-form risk tables, static SVG line
//! plots, and run manifests.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::casestudy::CaseStudyReport;
use crate::error::{Error, Result};
use crate::montecarlo::RiskCurve;
use crate::risk::{risk, Measure, RiskQuery, RiskValue};
use crate::supervised::EstimatorKind;
use crate::tree::{CircleReport, SplitSetsReport};

/// Estimators that have closed-form risks.
pub const ANALYTIC_KINDS: [EstimatorKind; 8] = [
    EstimatorKind::Y,
    EstimatorKind::L,
    EstimatorKind::R,
    EstimatorKind::B,
    EstimatorKind::RB,
    EstimatorKind::SL,
    EstimatorKind::SR,
    EstimatorKind::SB,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub kind: EstimatorKind,
    pub n: usize,
    pub p: f64,
    pub measure: Measure,
    pub value: Option<f64>,
}

/// Closed-form risks over a grid. Cells without a closed form carry no value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RiskTable {
    pub rows: Vec<RiskRow>,
}

impl RiskTable {
    /// Rows are ordered by kind, measure, n and p.
    pub fn compute(kinds: &[EstimatorKind], ns: &[usize], ps: &[f64], measures: &[Measure]) -> Result<RiskTable> {
        for (what, empty) in [("kind", kinds.is_empty()), ("n", ns.is_empty()), ("p", ps.is_empty()), ("measure", measures.is_empty())] {
            if empty {
                return Err(Error::Usage(format!("at least one {what} is required")));
            }
        }
        let mut rows = Vec::with_capacity(kinds.len() * ns.len() * ps.len() * measures.len());
        for &kind in kinds {
            for &measure in measures {
                for &n in ns {
                    for &p in ps {
                        let value = match risk(&RiskQuery { kind, n, p, measure }) {
                            Ok(RiskValue::Value(v)) => Some(v),
                            Ok(RiskValue::NotAnalytic) => None,
                            Err(Error::Domain(m) | Error::ParameterDomain(m)) => return Err(Error::Usage(m)),
                            Err(e) => return Err(e),
                        };
                        rows.push(RiskRow { kind, n, p, measure, value });
                    }
                }
            }
        }
        Ok(RiskTable { rows })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["kind", "n", "p", "measure", "value", "flag"])?;
        for r in &self.rows {
            let (value, flag) = match r.value {
                Some(v) => (v.to_string(), ""),
                None => (String::new(), "not_analytic"),
            };
            w.write_record([r.kind.to_string(), r.n.to_string(), r.p.to_string(), r.measure.to_string(), value, flag.into()])?;
        }
        flush(w)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        to_string(|buf| self.write_csv(buf))
    }
}

pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub(crate) fn flush<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<csv>", e))
}

pub(crate) fn to_string(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Data(e.to_string()))
}

/// Any result that serializes to CSV.
pub trait CsvReport {
    fn write_to(&self, out: &mut dyn Write) -> Result<()>;

    fn csv_string(&self) -> Result<String> {
        to_string(|buf| self.write_to(buf))
    }
}

impl CsvReport for RiskTable {
    fn write_to(&self, out: &mut dyn Write) -> Result<()> {
        self.write_csv(out)
    }
}

impl CsvReport for RiskCurve {
    fn write_to(&self, out: &mut dyn Write) -> Result<()> {
        self.write_csv(out)
    }
}

impl CsvReport for SplitSetsReport {
    fn write_to(&self, out: &mut dyn Write) -> Result<()> {
        self.write_csv(out)
    }
}

impl CsvReport for CircleReport {
    fn write_to(&self, out: &mut dyn Write) -> Result<()> {
        self.write_csv(out)
    }
}

impl CsvReport for CaseStudyReport {
    fn write_to(&self, out: &mut dyn Write) -> Result<()> {
        self.write_csv(out)
    }
}

/// One named polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// One set of axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub lines: Vec<Line>,
}

const PALETTE: [&str; 8] = ["#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 42.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Renders panels on a grid with `columns` panels per row.
pub fn render_svg(title: &str, panels: &[Panel], columns: usize) -> String {
    let columns = columns.max(1).min(panels.len().max(1));
    let rows = panels.len().div_ceil(columns).max(1);
    let width = columns as f64 * PANEL_W;
    let height = rows as f64 * PANEL_H + 30.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">{}</text>"#, width / 2.0, escape(title));
    for (i, panel) in panels.iter().enumerate() {
        let ox = (i % columns) as f64 * PANEL_W;
        let oy = 30.0 + (i / columns) as f64 * PANEL_H;
        render_panel(&mut s, panel, ox, oy);
    }
    s.push_str("</svg>\n");
    s
}

fn render_panel(s: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let (x0, x1) = extent(panel.lines.iter().flat_map(|l| l.points.iter().map(|p| p.0)));
    let (y0, y1) = extent(panel.lines.iter().flat_map(|l| l.points.iter().map(|p| p.1)).chain([0.0]));
    let (left, top) = (ox + MARGIN, oy + 18.0);
    let (w, h) = (PANEL_W - MARGIN - 12.0, PANEL_H - MARGIN - 18.0);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * w;
    let py = |y: f64| top + h - (y - y0) / (y1 - y0) * h;
    let _ = writeln!(s, r#"<g>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#, left + w / 2.0, oy + 12.0, escape(&panel.title));
    let _ = writeln!(s, r##"<rect x="{left:.1}" y="{top:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#444"/>"##);
    for t in 0..=4 {
        let fx = x0 + (x1 - x0) * t as f64 / 4.0;
        let fy = y0 + (y1 - y0) * t as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, px(fx), top + h + 12.0, tick(fx));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 3.0, py(fy) + 3.0, tick(fy));
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + w / 2.0, top + h + 24.0, escape(&panel.x_label));
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        ox + 10.0,
        top + h / 2.0,
        ox + 10.0,
        top + h / 2.0,
        escape(&panel.y_label)
    );
    for (j, line) in panel.lines.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        let pts: Vec<String> = line
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.3" points="{}"/>"#, pts.join(" "));
        let ly = top + 10.0 + 11.0 * j as f64;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, left + w - 70.0, left + w - 58.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, left + w - 55.0, ly + 3.0, escape(&line.name));
    }
    let _ = writeln!(s, "</g>");
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if a >= 1000.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

/// MAE against `p`: one panel per (distribution, n), one line per
/// (kind, transform).
pub fn curve_panels(curve: &RiskCurve) -> Vec<Panel> {
    let mut panels: Vec<Panel> = Vec::new();
    for c in &curve.points {
        let title = format!("{}, n={}", c.distribution, c.n);
        let name = if c.kind == EstimatorKind::XScale { c.kind.to_string() } else { format!("{} {}", c.kind, c.transform) };
        let panel = match panels.iter_mut().position(|p| p.title == title) {
            Some(i) => &mut panels[i],
            None => {
                panels.push(Panel { title, x_label: "p".into(), y_label: "MAE".into(), lines: Vec::new() });
                panels.last_mut().unwrap()
            }
        };
        match panel.lines.iter_mut().find(|l| l.name == name) {
            Some(l) => l.points.push((c.p, c.mae)),
            None => panel.lines.push(Line { name, points: vec![(c.p, c.mae)] }),
        }
    }
    panels
}

/// Risk against `p`: one panel per (measure, n), one line per kind.
pub fn table_panels(table: &RiskTable) -> Vec<Panel> {
    let mut panels: Vec<Panel> = Vec::new();
    for r in &table.rows {
        let Some(v) = r.value else { continue };
        let title = format!("{} n={}", r.measure, r.n);
        let idx = match panels.iter().position(|p| p.title == title) {
            Some(i) => i,
            None => {
                panels.push(Panel { title, x_label: "p".into(), y_label: r.measure.to_string(), lines: Vec::new() });
                panels.len() - 1
            }
        };
        let name = r.kind.to_string();
        let lines = &mut panels[idx].lines;
        match lines.iter_mut().find(|l| l.name == name) {
            Some(l) => l.points.push((r.p, v)),
            None => lines.push(Line { name, points: vec![(r.p, v)] }),
        }
    }
    panels
}

/// MAE and raw/quantile ratio against the order, one line per `n`.
pub fn splitsets_panels(report: &SplitSetsReport) -> Vec<Panel> {
    let mut ns: Vec<usize> = report.rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let line = |n: usize, f: &dyn Fn(&crate::tree::ScaleComparison) -> f64, tag: &str| Line {
        name: format!("n={n}{tag}"),
        points: report.rows.iter().filter(|r| r.n == n).map(|r| (r.order as f64, f(&r.result))).collect(),
    };
    let mut mae = Vec::new();
    for &n in &ns {
        mae.push(line(n, &|c| c.mae_raw, " raw"));
        mae.push(line(n, &|c| c.mae_quantile, " quantile"));
    }
    vec![
        Panel { title: "misclassification".into(), x_label: "order".into(), y_label: "MAE".into(), lines: mae },
        Panel {
            title: "raw / quantile".into(),
            x_label: "order".into(),
            y_label: "ratio".into(),
            lines: ns.iter().map(|&n| line(n, &|c| c.ratio, "")).collect(),
        },
    ]
}

/// MAE per scale and the raw/quantile ratio against `n`.
pub fn circle_panels(report: &CircleReport) -> Vec<Panel> {
    let series = |name: &str, f: &dyn Fn(&crate::tree::ScaleComparison) -> f64| Line {
        name: name.into(),
        points: report.rows.iter().map(|r| (r.n as f64, f(&r.result))).collect(),
    };
    vec![
        Panel {
            title: "misclassification".into(),
            x_label: "n".into(),
            y_label: "MAE".into(),
            lines: vec![series("raw", &|c| c.mae_raw), series("quantile", &|c| c.mae_quantile)],
        },
        Panel { title: "raw / quantile".into(), x_label: "n".into(), y_label: "ratio".into(), lines: vec![series("ratio", &|c| c.ratio)] },
    ]
}

/// Record of one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Command-line arguments after the program name; replaying them
    /// reproduces the outputs.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub workers: Option<usize>,
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
    pub outputs: Vec<PathBuf>,
    pub version: String,
}

impl RunManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Data(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::config(path.display().to_string(), e.to_string()))
    }
}

pub fn unix_now() -> f64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn risk_table_flags_missing_closed_forms() {
        let t = RiskTable::compute(&[EstimatorKind::B, EstimatorKind::RB], &[10], &[0.5], &[Measure::Mae]).unwrap();
        let text = t.to_csv_string().unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("kind,n,p,measure,value,flag"));
        let b: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&b[..4], &["B", "10", "0.5", "mae"]);
        assert!((b[4].parse::<f64>().unwrap() - 0.045410).abs() < 5e-7);
        assert_eq!(lines.next(), Some("RB,10,0.5,mae,,not_analytic"));
        assert!(matches!(RiskTable::compute(&[EstimatorKind::B], &[10], &[0.0], &[Measure::Mae]), Err(Error::Usage(_))));
    }

    #[test]
    fn svg_is_well_formed_and_stable() {
        let t = RiskTable::compute(&[EstimatorKind::L, EstimatorKind::B], &[2, 10], &[0.1, 0.5, 0.9], &[Measure::Rmse]).unwrap();
        let panels = table_panels(&t);
        assert_eq!(panels.len(), 2);
        assert_eq!(panels[0].lines.len(), 2);
        let svg = render_svg("rmse <test>", &panels, 2);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("rmse &lt;test&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert_eq!(svg, render_svg("rmse <test>", &panels, 2));
    }
}
