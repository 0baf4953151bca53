//! Minimal self-contained SVG line plots with log-log axes.
//!
//! Decade ticks with power-of-ten labels, light gridlines, one polyline
//! per series, dashed vertical marker lines, and a legend. No plotting
//! dependency; the output is a standalone `.svg` file.

use std::fmt::Write as _;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

pub struct Series {
    pub label: String,
    /// (x, y) pairs; axes are log-log so both must be positive.
    pub points: Vec<(f64, f64)>,
}

pub struct LogLogPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Dashed vertical markers: (x position, label).
    pub vlines: Vec<(f64, String)>,
}

impl LogLogPlot {
    pub fn render(&self) -> String {
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .filter(|v| *v > 0.0);
        let ys = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .filter(|v| *v > 0.0);
        let (x_min, x_max) = decade_bounds(xs);
        let (y_min, y_max) = decade_bounds(ys);

        let x_of = |v: f64| MARGIN_LEFT + (v.log10() - x_min) / (x_max - x_min) * plot_w;
        let y_of = |v: f64| MARGIN_TOP + (y_max - v.log10()) / (y_max - y_min) * plot_h;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(
            svg,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="26" font-family="sans-serif" font-size="17" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            escape(&self.title)
        );

        // Frame.
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black" stroke-width="1"/>"#
        );

        // Decade gridlines and tick labels.
        for d in (x_min as i64)..=(x_max as i64) {
            let x = x_of(10f64.powi(d as i32));
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{MARGIN_TOP}" x2="{x:.2}" y2="{}" stroke="#dddddd" stroke-width="0.7"/>"##,
                MARGIN_TOP + plot_h
            );
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">1e{d}</text>"#,
                MARGIN_TOP + plot_h + 18.0
            );
        }
        for d in (y_min as i64)..=(y_max as i64) {
            let y = y_of(10f64.powi(d as i32));
            let _ = writeln!(
                svg,
                r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd" stroke-width="0.7"/>"##,
                MARGIN_LEFT + plot_w
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">1e{d}</text>"#,
                MARGIN_LEFT - 8.0,
                y + 4.0
            );
        }

        // Axis labels.
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 18.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="22" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 22 {})">{}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        // Dashed vertical markers.
        for (x_value, label) in &self.vlines {
            if *x_value <= 0.0 {
                continue;
            }
            let lx = x_value.log10();
            if lx < x_min || lx > x_max {
                continue;
            }
            let x = x_of(*x_value);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{MARGIN_TOP}" x2="{x:.2}" y2="{}" stroke="#555555" stroke-width="1" stroke-dasharray="6,4"/>"##,
                MARGIN_TOP + plot_h
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
                x,
                MARGIN_TOP - 8.0,
                escape(label)
            );
        }

        // Series polylines and legend.
        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut path = String::new();
            for (x, y) in &series.points {
                if *x <= 0.0 || *y <= 0.0 {
                    continue;
                }
                let _ = write!(path, "{:.2},{:.2} ", x_of(*x), y_of(*y));
            }
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
                path.trim_end()
            );
            let ly = MARGIN_TOP + 16.0 + 20.0 * i as f64;
            let lx = MARGIN_LEFT + plot_w + 14.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2.5"/>"#,
                lx + 24.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13">{}</text>"#,
                lx + 30.0,
                ly + 4.0,
                escape(&series.label)
            );
        }

        svg.push_str("</svg>\n");
        svg
    }
}

/// Whole-decade bounds covering the values, padded to at least one decade.
fn decade_bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let lo = lo.log10().floor();
    let hi = hi.log10().ceil();
    if lo == hi {
        (lo, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_markers_and_ticks() {
        let plot = LogLogPlot {
            title: "strain vs density".to_string(),
            x_label: "n (cm^-3)".to_string(),
            y_label: "|strain|".to_string(),
            series: vec![
                Series {
                    label: "B".to_string(),
                    points: vec![(1e10, 1e-13), (1e18, 1e-5)],
                },
                Series {
                    label: "Sb".to_string(),
                    points: vec![(1e10, 5e-14), (1e18, 5e-6)],
                },
            ],
            vlines: vec![(1e13, "9N".to_string())],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("1e10"));
        assert!(svg.contains(">B<") && svg.contains(">Sb<"));
    }

    #[test]
    fn degenerate_bounds_padded() {
        assert_eq!(decade_bounds([10.0, 10.0].into_iter()), (1.0, 2.0));
    }
}
