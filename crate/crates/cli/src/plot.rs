//! Static SVG rendering of spectra on a log10 count axis.

use std::fmt::Write as _;

pub const ESTIMATE_COLOR: &str = "#1f4fd1";
pub const BASELINE_COLOR: &str = "#1f9d3a";
pub const EXACT_COLOR: &str = "#000000";
pub const POINT_COLOR: &str = "#9a9a9a";

pub enum Style {
    Step,
    Scatter,
}

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub style: Style,
    /// `(sigma, count)`; counts below 1 are drawn at 1.
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

pub fn render(series: &[Series], title: &str) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y.max(1.0).log10());
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let y1 = y1.ceil().max(1.0);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + plot_h - y.max(1.0).log10() / y1 * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<title>{}</title>"#, escape(title));

    // axes and decade gridlines
    for d in 0..=(y1 as i32) {
        let y = sy(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e0e0e0"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"##,
            WIDTH - RIGHT,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for i in 0..=5 {
        let x = x0 + (x1 - x0) * f64::from(i) / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(x),
            HEIGHT - BOTTOM + 18.0,
            x.round()
        );
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">frequency threshold</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">number of frequent itemsets</text>"#,
        TOP + plot_h / 2.0
    );

    for s in series {
        match s.style {
            Style::Scatter => {
                for &(x, y) in &s.points {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.1}" cy="{:.1}" r="1.5" fill="{}" fill-opacity="0.5"/>"#,
                        sx(x),
                        sy(y),
                        s.color
                    );
                }
            }
            Style::Step => {
                let mut d = String::new();
                for (i, &(x, y)) in s.points.iter().enumerate() {
                    if i == 0 {
                        let _ = write!(d, "M{:.1},{:.1}", sx(x), sy(y));
                    } else {
                        let _ = write!(d, " H{:.1} V{:.1}", sx(x), sy(y));
                    }
                }
                if let Some(&(_, y)) = s.points.last() {
                    let _ = write!(d, " H{:.1} V{:.1}", sx(x1), sy(y));
                }
                let _ = writeln!(
                    svg,
                    r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.8"/>"#,
                    s.color
                );
            }
        }
    }

    for (i, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 16.0 * i as f64;
        let x = WIDTH - RIGHT - 160.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.1}" y="{:.1}" width="12" height="4" fill="{}"/><text x="{:.1}" y="{y:.1}">{}</text>"#,
            y - 6.0,
            s.color,
            x + 18.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
