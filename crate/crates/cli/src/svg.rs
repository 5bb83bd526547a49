//! Minimal static SVG charts: grouped bars with error bars, and line plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 3] = ["#4c72b0", "#dd8452", "#55a868"];

pub struct BarSeries<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
    pub errors: &'a [f64],
}

pub struct LineSeries<'a> {
    pub name: &'a str,
    pub ys: &'a [f64],
    pub dashed: bool,
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title))
        .unwrap();
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn plot_w() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_h() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    fn y(&self, v: f64) -> f64 {
        TOP + Self::plot_h() * (1.0 - (v - self.y_min) / (self.y_max - self.y_min))
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str) {
        let (x0, y0) = (LEFT, TOP + Self::plot_h());
        writeln!(out, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{:.1}" y2="{y0:.1}" stroke="black"/>"#, x0 + Self::plot_w())
            .unwrap();
        writeln!(out, r#"<line x1="{x0:.1}" y1="{TOP:.1}" x2="{x0:.1}" y2="{y0:.1}" stroke="black"/>"#).unwrap();
        for k in 0..=4 {
            let v = self.y_min + (self.y_max - self.y_min) * k as f64 / 4.0;
            let y = self.y(v);
            writeln!(out, r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="black"/>"#, x0 - 4.0).unwrap();
            writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#, x0 - 6.0, y + 4.0).unwrap();
        }
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + Self::plot_w() / 2.0,
            HEIGHT - 10.0,
            escape(x_label)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            TOP + Self::plot_h() / 2.0,
            TOP + Self::plot_h() / 2.0,
            escape(y_label)
        )
        .unwrap();
    }
}

fn legend(out: &mut String, entries: &[(&str, &str, bool)]) {
    for (i, (name, color, dashed)) in entries.iter().enumerate() {
        let x = WIDTH - RIGHT - 150.0;
        let y = TOP + 12.0 + 16.0 * i as f64;
        let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
        writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="3"{dash}/>"#,
            x + 20.0
        )
        .unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x + 26.0, y + 4.0, escape(name)).unwrap();
    }
}

/// One group of bars per category, one bar per series.
pub fn bar_chart(title: &str, x_label: &str, y_label: &str, categories: &[String], series: &[BarSeries]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let frame = Frame { y_min: 0.0, y_max: 1.1 };
    frame.axes(&mut out, x_label, y_label);
    let group_w = Frame::plot_w() / categories.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    for (g, cat) in categories.iter().enumerate() {
        let gx = LEFT + group_w * g as f64 + group_w * 0.1;
        for (s, ser) in series.iter().enumerate() {
            let v = ser.values[g].clamp(frame.y_min, frame.y_max);
            let x = gx + bar_w * s as f64;
            let (top, base) = (frame.y(v), frame.y(0.0));
            writeln!(
                out,
                r#"<rect x="{x:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                bar_w * 0.9,
                base - top,
                COLORS[s % COLORS.len()]
            )
            .unwrap();
            let err = ser.errors[g];
            if err > 0.0 {
                let cx = x + bar_w * 0.45;
                writeln!(
                    out,
                    r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
                    frame.y((v - err).max(frame.y_min)),
                    frame.y((v + err).min(frame.y_max))
                )
                .unwrap();
            }
        }
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            gx + group_w * 0.4,
            TOP + Frame::plot_h() + 16.0,
            escape(cat)
        )
        .unwrap();
    }
    let entries: Vec<(&str, &str, bool)> =
        series.iter().enumerate().map(|(i, s)| (s.name, COLORS[i % COLORS.len()], false)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, xs: &[f64], series: &[LineSeries]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let all = series.iter().flat_map(|s| s.ys.iter().copied());
    let y_max = all.fold(0.0f64, f64::max) * 1.1;
    let frame = Frame { y_min: 0.0, y_max: if y_max > 0.0 { y_max } else { 1.0 } };
    frame.axes(&mut out, x_label, y_label);
    let (x_min, x_max) = match (xs.first(), xs.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a, a + 1.0),
        _ => (0.0, 1.0),
    };
    let px = |x: f64| LEFT + Frame::plot_w() * (x - x_min) / (x_max - x_min);
    for k in 0..=4 {
        let x = x_min + (x_max - x_min) * k as f64 / 4.0;
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x:.2}</text>"#,
            px(x),
            TOP + Frame::plot_h() + 16.0
        )
        .unwrap();
    }
    for (i, s) in series.iter().enumerate() {
        let points: Vec<String> = xs.iter().zip(s.ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), frame.y(y))).collect();
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
            COLORS[i % COLORS.len()],
            points.join(" ")
        )
        .unwrap();
    }
    let entries: Vec<(&str, &str, bool)> =
        series.iter().enumerate().map(|(i, s)| (s.name, COLORS[i % COLORS.len()], s.dashed)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}
