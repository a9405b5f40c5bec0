//! Minimal deterministic SVG output.
//!
//! Coordinates are printed with fixed precision, so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::experiments::Curve;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 52.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Dashed vertical reference line.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalRule {
    pub x: f64,
    pub label: String,
}

impl VerticalRule {
    pub fn new(x: f64, label: impl Into<String>) -> Self {
        Self { x, label: label.into() }
    }
}

/// Plain line drawn over the curves, such as a closed-form prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn axes(&self, s: &mut String, title: &str, x_label: &str, y_label: &str) {
        let (l, r) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        let (t, b) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
        let _ = writeln!(
            s,
            r##"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
            r - l,
            b - t
        );
        for k in 0..=4 {
            let xv = self.x0 + (self.x1 - self.x0) * k as f64 / 4.0;
            let yv = self.y0 + (self.y1 - self.y0) * k as f64 / 4.0;
            let (px, py) = (self.px(xv), self.py(yv));
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"##,
                b + 5.0,
                b + 18.0,
                tick(xv)
            );
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{py:.2}" x2="{l:.2}" y2="{py:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"##,
                l - 5.0,
                l - 8.0,
                py + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            (l + r) / 2.0,
            HEIGHT - 12.0,
            escape(x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            (t + b) / 2.0,
            (t + b) / 2.0,
            escape(y_label)
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Feasible proportion against the abscissa: raw points, 95% band, smoothed
/// line, one colour per curve, plus dashed vertical rules.
pub fn curves_svg(curves: &[Curve], rules: &[VerticalRule], title: &str, x_label: &str) -> String {
    figure_svg(curves, &[], rules, title, x_label)
}

pub fn figure_svg(
    curves: &[Curve],
    overlays: &[Overlay],
    rules: &[VerticalRule],
    title: &str,
    x_label: &str,
) -> String {
    let xs = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.abscissa))
        .chain(rules.iter().map(|r| r.x))
        .filter(|x| x.is_finite());
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let frame = if x0.is_finite() {
        Frame::new(x0, x1, 0.0, 1.0)
    } else {
        Frame::new(0.0, 1.0, 0.0, 1.0)
    };
    let mut s = header();
    frame.axes(&mut s, title, x_label, "feasible proportion");

    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let valid: Vec<_> = c
            .points
            .iter()
            .zip(&c.smoothed)
            .filter(|(p, _)| p.proportion.is_finite())
            .collect();
        if valid.len() > 1 {
            let upper = valid
                .iter()
                .map(|(p, _)| (p.abscissa, (p.proportion + p.half_width).min(1.0)));
            let lower = valid
                .iter()
                .rev()
                .map(|(p, _)| (p.abscissa, (p.proportion - p.half_width).max(0.0)));
            let poly = upper
                .chain(lower)
                .map(|(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                s,
                r#"<polygon class="band" points="{poly}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#
            );
            let line = valid
                .iter()
                .filter(|(_, sm)| sm.is_finite())
                .map(|(p, sm)| format!("{:.2},{:.2}", frame.px(p.abscissa), frame.py(sm.clamp(0.0, 1.0))))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                s,
                r#"<polyline class="smoothed" points="{line}" fill="none" stroke="{color}" stroke-width="1.8"/>"#
            );
        }
        for (p, _) in &valid {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                frame.px(p.abscissa),
                frame.py(p.proportion)
            );
        }
        if c.n > 0 {
            let ly = MARGIN_TOP + 16.0 + 16.0 * i as f64;
            let lx = WIDTH - MARGIN_RIGHT - 110.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">n = {}</text>"#,
                lx + 18.0,
                lx + 24.0,
                ly + 4.0,
                c.n
            );
        }
    }

    for (i, o) in overlays.iter().enumerate() {
        let line = o
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y.clamp(0.0, 1.0))))
            .collect::<Vec<_>>()
            .join(" ");
        let color = PALETTE[(curves.len() + i) % PALETTE.len()];
        let ly = MARGIN_TOP + 16.0 + 16.0 * (curves.len() + i) as f64;
        let lx = WIDTH - MARGIN_RIGHT - 110.0;
        let _ = writeln!(
            s,
            r#"<polyline class="overlay" points="{line}" fill="none" stroke="{color}" stroke-width="1.4" stroke-dasharray="2 2"/><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-dasharray="2 2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&o.label)
        );
    }

    for rule in rules.iter().filter(|r| r.x.is_finite()) {
        let px = frame.px(rule.x);
        let _ = writeln!(
            s,
            r##"<line class="rule" data-x="{:.6}" x1="{px:.2}" y1="{MARGIN_TOP:.2}" x2="{px:.2}" y2="{:.2}" stroke="#555" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"##,
            rule.x,
            HEIGHT - MARGIN_BOTTOM,
            px + 4.0,
            MARGIN_TOP + 12.0,
            escape(&rule.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Eigenvalues in the complex plane, with a dashed line on the imaginary axis.
pub fn spectrum_svg(eigenvalues: &[Complex64], title: &str) -> String {
    let finite = eigenvalues.iter().filter(|z| z.re.is_finite() && z.im.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in finite.clone() {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let x1 = x1.max(0.0);
    let frame = Frame::new(x0, x1, y0, y1);
    let mut s = header();
    frame.axes(&mut s, title, "real part", "imaginary part");
    let px0 = frame.px(0.0);
    let _ = writeln!(
        s,
        r##"<line class="rule" data-x="0.000000" x1="{px0:.2}" y1="{MARGIN_TOP:.2}" x2="{px0:.2}" y2="{:.2}" stroke="#555" stroke-dasharray="6 4"/>"##,
        HEIGHT - MARGIN_BOTTOM
    );
    for z in finite {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="1.8" fill="#1f77b4"/>"##,
            frame.px(z.re),
            frame.py(z.im)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::CurvePoint;

    fn curve() -> Curve {
        let points: Vec<CurvePoint> = [0.0, 0.2, 0.7, 1.0]
            .iter()
            .enumerate()
            .map(|(i, &p)| CurvePoint {
                abscissa: 1.0 + 0.25 * i as f64,
                proportion: p,
                half_width: 0.05,
                trials: 10,
                degenerate: 0,
                feasible_count: (p * 10.0) as usize,
            })
            .collect();
        Curve {
            n: 100,
            smoothed: points.iter().map(|p| p.proportion).collect(),
            points,
        }
    }

    #[test]
    fn curves_are_deterministic_and_carry_rules() {
        let rules = [VerticalRule::new(std::f64::consts::SQRT_2, "√2")];
        let a = curves_svg(&[curve()], &rules, "t", "kappa");
        let b = curves_svg(&[curve()], &rules, "t", "kappa");
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains(r#"data-x="1.414214""#));
        assert_eq!(a.matches("<circle").count(), 4);
        assert!(a.contains("n = 100"));
    }

    #[test]
    fn spectrum_handles_empty_input() {
        let s = spectrum_svg(&[], "empty");
        assert!(s.ends_with("</svg>\n"));
        let s = spectrum_svg(&[Complex64::new(-1.0, 0.5), Complex64::new(-2.0, -0.5)], "two");
        assert_eq!(s.matches("<circle").count(), 2);
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick(0.5), "0.5");
        assert_eq!(tick(1.0), "1");
        assert_eq!(tick(-0.0), "0");
    }
}
