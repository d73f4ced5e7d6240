//! Minimal hand-written SVG line charts. Each figure is a stack of panels
//! sharing the x axis; every series is a polyline or a set of bars.

use std::fmt::Write;

const WIDTH: f64 = 900.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const GAP: f64 = 40.0;

pub const PALETTE: [&str; 6] = [
    "#444444", "#c0392b", "#2471a3", "#27ae60", "#8e44ad", "#d68910",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Style {
    Line,
    Bars,
    /// Point estimate with a vertical interval; points carry (x, lo, mid, hi).
    Interval,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub colour: &'static str,
    pub style: Style,
    /// `(x, y)`; NaN y breaks the line.
    pub points: Vec<(f64, f64)>,
    pub bands: Vec<(f64, f64, f64)>,
}

impl Series {
    pub fn line(label: &str, colour: &'static str, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.to_string(),
            colour,
            style: Style::Line,
            points,
            bands: vec![],
        }
    }

    pub fn bars(label: &str, colour: &'static str, points: Vec<(f64, f64)>) -> Self {
        Series {
            style: Style::Bars,
            ..Series::line(label, colour, points)
        }
    }

    pub fn intervals(
        label: &str,
        colour: &'static str,
        bands: Vec<(f64, f64, f64)>,
        mids: Vec<(f64, f64)>,
    ) -> Self {
        Series {
            style: Style::Interval,
            bands,
            ..Series::line(label, colour, mids)
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub y_label: String,
    pub series: Vec<Series>,
    /// Fixed y range; otherwise fitted to the data.
    pub y_range: Option<(f64, f64)>,
    /// Vertical marker lines (e.g. break years).
    pub markers: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub panels: Vec<Panel>,
}

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    (lo <= hi).then_some((lo, hi))
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let mult = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .find(|m| m * mag >= raw)
        .unwrap_or(10.0);
    let step = mult * mag;
    // k * mult * mag, divided rather than multiplied for small magnitudes
    // so that 0.6 prints as 0.6
    let at = |k: f64| {
        if mag >= 1.0 {
            k * mult * mag
        } else {
            k * mult / (1.0 / mag).round()
        }
    };
    let first = (lo / step - 1e-9).ceil();
    let last = (hi / step + 1e-9).floor();
    let mut out = vec![];
    let mut k = first;
    while k <= last {
        let t = at(k);
        out.push(if t == 0.0 { 0.0 } else { t });
        k += 1.0;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v.fract().abs() < 1e-9 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Figure {
    pub fn render(&self) -> String {
        let height = MARGIN_TOP + self.panels.len() as f64 * (PANEL_HEIGHT + GAP) + 20.0;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let xs = extent(
            self.panels
                .iter()
                .flat_map(|p| p.series.iter())
                .flat_map(|s| s.points.iter().map(|p| p.0)),
        )
        .unwrap_or((0.0, 1.0));
        let (x0, x1) = if xs.1 > xs.0 {
            xs
        } else {
            (xs.0 - 0.5, xs.1 + 0.5)
        };
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;

        for (k, panel) in self.panels.iter().enumerate() {
            let top = MARGIN_TOP + k as f64 * (PANEL_HEIGHT + GAP);
            let ys = panel.y_range.or_else(|| {
                extent(panel.series.iter().flat_map(|s| {
                    s.points
                        .iter()
                        .map(|p| p.1)
                        .chain(s.bands.iter().flat_map(|b| [b.1, b.2]))
                        .chain(if s.style == Style::Bars {
                            Some(0.0)
                        } else {
                            None
                        })
                }))
            });
            let (y0, y1) = match ys {
                Some((a, b)) if b > a => {
                    let pad = 0.05 * (b - a);
                    (a - pad, b + pad)
                }
                Some((a, _)) => (a - 1.0, a + 1.0),
                None => (0.0, 1.0),
            };
            let sy = |y: f64| top + PANEL_HEIGHT - (y - y0) / (y1 - y0) * PANEL_HEIGHT;
            let _ = writeln!(
                out,
                r##"<rect x="{MARGIN_LEFT}" y="{top}" width="{plot_w}" height="{PANEL_HEIGHT}" fill="none" stroke="#999"/>"##
            );
            for t in ticks(y0, y1) {
                let y = sy(t);
                let _ = writeln!(
                    out,
                    r##"<line x1="{}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="#999"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
                    MARGIN_LEFT - 5.0,
                    MARGIN_LEFT - 8.0,
                    y + 4.0,
                    fmt_tick(t)
                );
            }
            for t in ticks(x0, x1) {
                let x = sx(t);
                let bottom = top + PANEL_HEIGHT;
                let _ = writeln!(
                    out,
                    r##"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="#999"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##,
                    bottom + 5.0,
                    bottom + 18.0,
                    fmt_tick(t)
                );
            }
            let _ = writeln!(
                out,
                r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
                top + PANEL_HEIGHT / 2.0,
                top + PANEL_HEIGHT / 2.0,
                escape(&panel.y_label)
            );
            for &m in &panel.markers {
                let x = sx(m);
                let _ = writeln!(
                    out,
                    r##"<line class="marker" x1="{x:.2}" y1="{top}" x2="{x:.2}" y2="{}" stroke="#c0392b" stroke-dasharray="4 3"/>"##,
                    top + PANEL_HEIGHT
                );
            }
            for (i, s) in panel.series.iter().enumerate() {
                self.draw_series(&mut out, s, &sx, &sy, sy(y0.max(0.0).min(y1)));
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" fill="{}">{}</text>"#,
                    MARGIN_LEFT + 10.0,
                    top + 16.0 + 14.0 * i as f64,
                    s.colour,
                    escape(&s.label)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            height - 4.0,
            escape(&self.x_label)
        );
        out.push_str("</svg>\n");
        out
    }

    fn draw_series(
        &self,
        out: &mut String,
        s: &Series,
        sx: &dyn Fn(f64) -> f64,
        sy: &dyn Fn(f64) -> f64,
        baseline: f64,
    ) {
        match s.style {
            Style::Line => {
                let mut run: Vec<String> = vec![];
                let flush = |run: &mut Vec<String>, out: &mut String| {
                    if run.len() > 1 {
                        let _ = writeln!(
                            out,
                            r#"<polyline class="series" fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
                            s.colour,
                            run.join(" ")
                        );
                    }
                    run.clear();
                };
                for &(x, y) in &s.points {
                    if y.is_finite() {
                        run.push(format!("{:.2},{:.2}", sx(x), sy(y)));
                    } else {
                        flush(&mut run, out);
                    }
                }
                flush(&mut run, out);
            }
            Style::Bars => {
                let w = if s.points.len() > 1 {
                    ((sx(s.points[1].0) - sx(s.points[0].0)) * 0.8).max(0.5)
                } else {
                    4.0
                };
                for &(x, y) in s.points.iter().filter(|p| p.1.is_finite()) {
                    let (a, b) = (sy(y), baseline);
                    let _ = writeln!(
                        out,
                        r#"<rect class="bar" x="{:.2}" y="{:.2}" width="{w:.2}" height="{:.2}" fill="{}"/>"#,
                        sx(x) - w / 2.0,
                        a.min(b),
                        (a - b).abs(),
                        s.colour
                    );
                }
            }
            Style::Interval => {
                for &(x, lo, hi) in &s.bands {
                    let _ = writeln!(
                        out,
                        r#"<line class="interval" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}"/>"#,
                        sx(x),
                        sy(lo),
                        sx(x),
                        sy(hi),
                        s.colour
                    );
                }
                for &(x, y) in &s.points {
                    let _ = writeln!(
                        out,
                        r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                        sx(x),
                        sy(y),
                        s.colour
                    );
                }
            }
        }
    }
}
