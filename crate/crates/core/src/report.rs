//! Result artifacts: atomic file writes, CSV tables, and self-contained
//! SVG charts. CSV files are the machine-readable source of truth; the
//! SVG is a rendering of the same numbers.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// Overall outcome of a study or a command.
///
/// `Inconclusive` is reserved for runs where a kernel count could not be
/// certified (no decisive spectral gap); it is never folded into
/// pass/fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail => write!(f, "FAIL"),
            Verdict::Inconclusive => write!(f, "INCONCLUSIVE"),
        }
    }
}

impl Verdict {
    /// Combines verdicts: any failure dominates, then any ambiguity.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

/// Writes via a temporary sibling file and a final rename, so readers
/// never observe a half-written artifact.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp_path, bytes)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

/// Full-precision float formatting used by every text artifact.
pub fn fmt_g17(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "csv row width mismatch");
        self.rows.push(row);
    }

    pub fn to_text(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_text().as_bytes())
    }
}

#[derive(Debug, Clone)]
pub struct ChartSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// A minimal line chart (optionally log-scaled per axis) as a standalone
/// SVG string. No external assets; everything is inline.
pub struct SvgChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<ChartSeries>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

impl SvgChart {
    pub fn render(&self) -> String {
        let (w, h) = (840.0, 600.0);
        let (ml, mr, mt, mb) = (90.0, 30.0, 50.0, 70.0);
        let (pw, ph) = (w - ml - mr, h - mt - mb);

        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let ty = |y: f64| if self.log_y { y.log10() } else { y };

        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                if self.log_x && x <= 0.0 || self.log_y && y <= 0.0 {
                    continue;
                }
                xs.push(tx(x));
                ys.push(ty(y));
            }
        }
        let (x0, x1) = span(&xs);
        let (y0, y1) = span(&ys);
        let px = |x: f64| ml + (tx(x) - x0) / (x1 - x0) * pw;
        let py = |y: f64| mt + ph - (ty(y) - y0) / (y1 - y0) * ph;

        let mut svg = String::new();
        let _ = write!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"14\">\n\
             <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
             <text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">{}</text>\n",
            w / 2.0,
            xml_escape(&self.title)
        );
        let _ = write!(
            svg,
            "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#444\"/>\n"
        );

        for (t, label) in ticks(x0, x1, self.log_x) {
            let x = ml + (t - x0) / (x1 - x0) * pw;
            let _ = write!(
                svg,
                "<line x1=\"{x:.1}\" y1=\"{}\" x2=\"{x:.1}\" y2=\"{}\" stroke=\"#bbb\"/>\n\
                 <text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\">{label}</text>\n",
                mt,
                mt + ph,
                mt + ph + 22.0
            );
        }
        for (t, label) in ticks(y0, y1, self.log_y) {
            let y = mt + ph - (t - y0) / (y1 - y0) * ph;
            let _ = write!(
                svg,
                "<line x1=\"{ml}\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\" stroke=\"#bbb\"/>\n\
                 <text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{label}</text>\n",
                ml + pw,
                ml - 8.0,
                y + 5.0
            );
        }
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n\
             <text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
            ml + pw / 2.0,
            h - 18.0,
            xml_escape(&self.x_label),
            mt + ph / 2.0,
            mt + ph / 2.0,
            xml_escape(&self.y_label)
        );

        for (si, s) in self.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            let mut pts = String::new();
            for &(x, y) in &s.points {
                if self.log_x && x <= 0.0 || self.log_y && y <= 0.0 {
                    continue;
                }
                let _ = write!(pts, "{:.2},{:.2} ", px(x), py(y));
            }
            let _ = write!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                pts.trim_end()
            );
            for &(x, y) in &s.points {
                if self.log_x && x <= 0.0 || self.log_y && y <= 0.0 {
                    continue;
                }
                let _ = write!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{color}\"/>\n",
                    px(x),
                    py(y)
                );
            }
            let ly = mt + 16.0 + 20.0 * si as f64;
            let _ = write!(
                svg,
                "<line x1=\"{}\" y1=\"{ly:.1}\" x2=\"{}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
                 <text x=\"{}\" y=\"{:.1}\">{}</text>\n",
                ml + pw - 150.0,
                ml + pw - 120.0,
                ml + pw - 112.0,
                ly + 5.0,
                xml_escape(&s.name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.render().as_bytes())
    }
}

fn span(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Tick positions in transformed coordinates plus display labels.
fn ticks(lo: f64, hi: f64, log: bool) -> Vec<(f64, String)> {
    let mut out = Vec::new();
    if log {
        let (a, b) = (lo.ceil() as i64, hi.floor() as i64);
        if b - a >= 1 {
            for e in a..=b {
                out.push((e as f64, format!("1e{e}")));
            }
            return out;
        }
    }
    let n = 5;
    for i in 0..=n {
        let t = lo + (hi - lo) * i as f64 / n as f64;
        let value = if log { 10f64.powf(t) } else { t };
        out.push((t, format!("{value:.3}")));
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = std::env::temp_dir().join("cornerhodge-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("table.csv");
        let mut t = CsvTable::new(&["a", "b"]);
        t.push_row(vec!["1".into(), "2".into()]);
        t.write(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
        assert!(!dir.join("table.csv.tmp").exists());
    }

    #[test]
    fn svg_is_self_contained() {
        let chart = SvgChart {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: true,
            series: vec![ChartSeries {
                name: "s".into(),
                points: vec![(0.1, 1.0), (0.01, 2.0)],
            }],
        };
        let svg = chart.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(!svg.contains("http://") || svg.contains("www.w3.org"));
    }

    #[test]
    fn verdict_combination_prefers_failure() {
        use Verdict::*;
        assert_eq!(Pass.combine(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.combine(Fail), Fail);
        assert_eq!(Pass.combine(Pass), Pass);
    }
}
