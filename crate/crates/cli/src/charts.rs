//! Minimal static SVG charts: stacked line panels and scatter plots with a
//! fitted line.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 160.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const PANEL_GAP: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Finite (min, max) with a non-degenerate span.
fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xs: (f64, f64),
    ys: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xs.0) / (self.xs.1 - self.xs.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.ys.0) / (self.ys.1 - self.ys.0) * self.h
    }

    fn axes(&self, svg: &mut String, title: &str, xlabel: &str) {
        let (x0, y0, w, h) = (self.x0, self.y0, self.w, self.h);
        let _ = writeln!(
            svg,
            r##"<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#999"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x0}" y="{:.1}" font-size="13" font-weight="bold">{}</text>"#,
            y0 - 8.0,
            escape(title)
        );
        for (v, anchor_y) in [(self.ys.0, y0 + h), (self.ys.1, y0 + 10.0)] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{anchor_y:.1}" font-size="10" text-anchor="end">{v:.4}</text>"#,
                x0 - 4.0
            );
        }
        for (v, anchor) in [(self.xs.0, "start"), (self.xs.1, "end")] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="{anchor}">{v:.3}</text>"#,
                self.px(v),
                y0 + h + 12.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            x0 + w / 2.0,
            y0 + h + 26.0,
            escape(xlabel)
        );
    }
}

fn document(height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {WIDTH} {height}\" font-family=\"sans-serif\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// One panel per series, sharing the x axis.
pub fn line_panels(xlabel: &str, x: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    let xs = bounds(x.iter());
    let mut body = String::new();
    for (i, (name, ys)) in series.iter().enumerate() {
        let frame = Frame {
            x0: MARGIN_LEFT,
            y0: MARGIN_TOP + i as f64 * (PANEL_HEIGHT + PANEL_GAP),
            w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            h: PANEL_HEIGHT,
            xs,
            ys: bounds(ys.iter()),
        };
        frame.axes(&mut body, name, xlabel);
        let points: Vec<String> = x
            .iter()
            .zip(ys)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(&a, &b)| format!("{:.2},{:.2}", frame.px(a), frame.py(b)))
            .collect();
        let _ = writeln!(
            body,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[i % COLORS.len()],
            points.join(" ")
        );
    }
    let height = MARGIN_TOP + series.len() as f64 * (PANEL_HEIGHT + PANEL_GAP);
    document(height, &body)
}

/// Scatter of (x, y) with the least-squares line `y = intercept + slope·x`.
pub fn scatter_with_fit(title: &str, xlabel: &str, x: &[f64], y: &[f64], slope: f64, intercept: f64) -> String {
    let frame = Frame {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP,
        w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        h: 360.0,
        xs: bounds(x.iter()),
        ys: bounds(y.iter()),
    };
    let mut body = String::new();
    frame.axes(&mut body, title, xlabel);
    for (&a, &b) in x.iter().zip(y) {
        if a.is_finite() && b.is_finite() {
            let _ = writeln!(
                body,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{}" fill-opacity="0.8"/>"#,
                frame.px(a),
                frame.py(b),
                COLORS[0]
            );
        }
    }
    if slope.is_finite() && intercept.is_finite() {
        let (a, b) = frame.xs;
        let clamp = |v: f64| frame.py(v.clamp(frame.ys.0, frame.ys.1));
        let _ = writeln!(
            body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="1.5"/>"#,
            frame.px(a),
            clamp(intercept + slope * a),
            frame.px(b),
            clamp(intercept + slope * b),
            COLORS[1]
        );
    }
    document(MARGIN_TOP + 360.0 + 40.0, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_well_formed_svg() {
        let x = [0.0, 1.0, 2.0];
        let svg = line_panels("year", &x, &[("price <P>", vec![1.0, 1.1, 1.2]), ("flat", vec![2.0; 3])]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("price &lt;P&gt;"));

        let svg = scatter_with_fit("fit", "x", &x, &[0.0, 2.0, 4.0], 2.0, 0.0);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("<line"));
    }

    #[test]
    fn non_finite_values_are_skipped() {
        let svg = line_panels("t", &[0.0, 1.0], &[("s", vec![f64::NAN, 1.0])]);
        assert!(!svg.contains("NaN"));
    }
}
