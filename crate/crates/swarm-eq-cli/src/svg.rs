use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 48.0;

/// Minimal axis-aligned plot. Coordinates are in data units.
pub struct Plot {
    x: (f64, f64),
    y: (f64, f64),
    title: String,
    labels: (String, String),
    body: String,
    legend: Vec<(String, String)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Round-number tick spacing giving roughly `n` ticks.
fn tick_step(span: f64, n: f64) -> f64 {
    let raw = span / n;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    mag * if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    }
}

impl Plot {
    pub fn new(x: (f64, f64), y: (f64, f64), title: &str, xlabel: &str, ylabel: &str) -> Self {
        let pad = |r: (f64, f64)| if r.1 > r.0 { r } else { (r.0 - 0.5, r.0 + 0.5) };
        Plot {
            x: pad(x),
            y: pad(y),
            title: title.into(),
            labels: (xlabel.into(), ylabel.into()),
            body: String::new(),
            legend: Vec::new(),
        }
    }

    /// Bounds covering `pts` with a small margin.
    pub fn bounds(pts: impl IntoIterator<Item = (f64, f64)>) -> ((f64, f64), (f64, f64)) {
        let mut b = ((f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY));
        for (x, y) in pts.into_iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            b.0 = (b.0 .0.min(x), b.0 .1.max(x));
            b.1 = (b.1 .0.min(y), b.1 .1.max(y));
        }
        let grow = |(lo, hi): (f64, f64)| {
            if !lo.is_finite() {
                return (0.0, 1.0);
            }
            let m = 0.05 * (hi - lo).max(1e-12);
            (lo - m, hi + m)
        };
        (grow(b.0), grow(b.1))
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM)
    }

    pub fn line(&mut self, pts: &[(f64, f64)], color: &str, label: Option<&str>) {
        // Break the path at non-finite samples.
        let mut d = String::new();
        let mut pen_up = true;
        for &(x, y) in pts {
            if !(x.is_finite() && y.is_finite()) {
                pen_up = true;
                continue;
            }
            let _ = write!(d, "{}{:.2},{:.2} ", if pen_up { "M" } else { "L" }, self.px(x), self.py(y));
            pen_up = false;
        }
        if !d.is_empty() {
            let _ = writeln!(
                self.body,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5" clip-path="url(#plot)"/>"#,
                d.trim_end()
            );
        }
        if let Some(l) = label {
            self.legend.push((l.into(), color.into()));
        }
    }

    pub fn dots(&mut self, pts: &[(f64, f64)], color: &str, r: f64, label: Option<&str>) {
        for &(x, y) in pts.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = writeln!(
                self.body,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{color}" clip-path="url(#plot)"/>"#,
                self.px(x),
                self.py(y)
            );
        }
        if let Some(l) = label {
            self.legend.push((l.into(), color.into()));
        }
    }

    pub fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, color: &str) {
        let (a, b) = (self.px(x0), self.px(x1));
        let (c, d) = (self.py(y1), self.py(y0));
        let _ = writeln!(
            self.body,
            r#"<rect x="{a:.2}" y="{c:.2}" width="{:.2}" height="{:.2}" fill="{color}" stroke="none"/>"#,
            b - a,
            d - c
        );
    }

    pub fn key(&mut self, label: &str, color: &str) {
        self.legend.push((label.into(), color.into()));
    }

    fn axes(&self) -> String {
        let mut s = String::new();
        let (x0, x1, y0, y1) = (self.px(self.x.0), self.px(self.x.1), self.py(self.y.0), self.py(self.y.1));
        let _ = writeln!(s, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
        for (range, horizontal) in [(self.x, true), (self.y, false)] {
            let step = tick_step(range.1 - range.0, 6.0);
            let mut t = (range.0 / step).ceil() * step;
            while t <= range.1 + 1e-9 * step {
                let v = if t.abs() < 1e-12 * step { 0.0 } else { t };
                let label = format!("{}", (v / step).round() * step);
                let label = if label.len() > 8 { format!("{v:.3e}") } else { label };
                if horizontal {
                    let p = self.px(v);
                    let _ = writeln!(s, r#"<line x1="{p:.2}" y1="{y0:.2}" x2="{p:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
                    let _ = writeln!(s, r#"<text x="{p:.2}" y="{:.2}" font-size="11" text-anchor="middle">{label}</text>"#, y0 + 18.0);
                } else {
                    let p = self.py(v);
                    let _ = writeln!(s, r#"<line x1="{:.2}" y1="{p:.2}" x2="{x0:.2}" y2="{p:.2}" stroke="black"/>"#, x0 - 5.0);
                    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{label}</text>"#, x0 - 8.0, p + 4.0);
                }
                t += step;
            }
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#, 0.5 * (x0 + x1), H - 10.0, esc(&self.labels.0));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            0.5 * (y0 + y1),
            0.5 * (y0 + y1),
            esc(&self.labels.1)
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="20" font-size="14" text-anchor="middle">{}</text>"#, 0.5 * (x0 + x1), esc(&self.title));
        if !self.legend.is_empty() {
            let h = 16.0 * self.legend.len() as f64 + 6.0;
            let _ = writeln!(s, r##"<rect x="{:.2}" y="{:.2}" width="146" height="{h:.2}" fill="white" fill-opacity="0.85" stroke="#999999"/>"##, x1 - 156.0, y1 + 4.0);
        }
        for (k, (label, color)) in self.legend.iter().enumerate() {
            let y = y1 + 16.0 + 16.0 * k as f64;
            let _ = writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#, x1 - 150.0, y - 9.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}" font-size="11">{}</text>"#, x1 - 135.0, esc(label));
        }
        s
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = (self.px(self.x.0), self.px(self.x.1), self.py(self.y.0), self.py(self.y.1));
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
                "\n",
                r#"<defs><clipPath id="plot"><rect x="{x0:.2}" y="{y1:.2}" width="{pw:.2}" height="{ph:.2}"/></clipPath></defs>"#,
                "\n",
                r#"<rect width="100%" height="100%" fill="white"/>"#,
                "\n{body}{axes}</svg>\n"
            ),
            w = W,
            h = H,
            x0 = x0,
            y1 = y1,
            pw = x1 - x0,
            ph = y0 - y1,
            body = self.body,
            axes = self.axes()
        )
    }
}
