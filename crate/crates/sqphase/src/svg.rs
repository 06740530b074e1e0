//! Minimal static SVG renderings of the three standard figures.
//!
//! The CSVs are the contract; these plots are a convenience for eyeballing
//! a run without leaving the terminal. Hand-rolled on purpose: a few
//! polylines, circles and error bars need no plotting dependency.

use std::fmt::Write as _;

use crate::bayes::PosteriorGrid;
use crate::experiments::{ExperimentReport, PurityScanRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;

const CURVE_COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

struct Axes {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    log_y: bool,
}

impl Axes {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let (v, lo, hi) = if self.log_y {
            (v.log10(), self.y_min.log10(), self.y_max.log10())
        } else {
            (v, self.y_min, self.y_max)
        };
        HEIGHT - MARGIN_B - (v - lo) / (hi - lo) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn open_svg(out: &mut String, x_label: &str, y_label: &str) {
    write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>
<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{}" height="{}" fill="none" stroke="#333"/>
<text x="{}" y="{}" text-anchor="middle" font-size="14">{x_label}</text>
<text x="16" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 16 {})">{y_label}</text>
"##,
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
    )
    .unwrap();
}

fn polyline(out: &mut String, axes: &Axes, pts: &[(f64, f64)], color: &str, dash: &str) {
    let coords: Vec<String> = pts
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", axes.x(*x), axes.y(*y)))
        .collect();
    writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{}/>"#,
        coords.join(" "),
        if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        }
    )
    .unwrap();
}

fn circle(out: &mut String, axes: &Axes, x: f64, y: f64, color: &str) {
    writeln!(
        out,
        r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
        axes.x(x),
        axes.y(y)
    )
    .unwrap();
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = MARGIN_T + 16.0 + 16.0 * i as f64;
        writeln!(
            out,
            r#"<rect x="{:.0}" y="{:.0}" width="12" height="3" fill="{color}"/><text x="{:.0}" y="{:.0}" font-size="12">{label}</text>"#,
            WIDTH - 150.0,
            y,
            WIDTH - 132.0,
            y + 5.0
        )
        .unwrap();
    }
}

/// Variance-vs-phase figure: empirical points with jackknife error bars
/// over the three horizontal bound curves (SQL, OCRB, QCRB), log-scaled y.
pub fn sweep_figure(report: &ExperimentReport) -> String {
    let aggs = &report.aggregates;
    let mut y_min = f64::INFINITY;
    let mut y_max = 0.0f64;
    for a in aggs {
        for v in [
            a.empirical_variance.max(1e-12),
            a.bounds.sql,
            a.bounds.ocrb,
            a.bounds.qcrb,
        ] {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    let axes = Axes {
        x_min: aggs.first().map_or(0.0, |a| a.theta),
        x_max: aggs.last().map_or(1.0, |a| a.theta),
        y_min: y_min / 2.0,
        y_max: y_max * 2.0,
        log_y: true,
    };
    let mut out = String::new();
    open_svg(&mut out, "phase shift (rad)", "Var[theta]");
    let ladder = |pick: fn(&crate::bounds::BoundsReport) -> f64| -> Vec<(f64, f64)> {
        aggs.iter().map(|a| (a.theta, pick(&a.bounds))).collect()
    };
    polyline(&mut out, &axes, &ladder(|b| b.sql), CURVE_COLORS[0], "2,3");
    polyline(&mut out, &axes, &ladder(|b| b.ocrb), CURVE_COLORS[1], "6,3");
    polyline(&mut out, &axes, &ladder(|b| b.qcrb), CURVE_COLORS[2], "6,3,2,3");
    for a in aggs {
        let v = a.empirical_variance.max(axes.y_min);
        let se = a.stderr.unwrap_or(0.0);
        let lo = (v - se).max(axes.y_min);
        let hi = (v + se).min(axes.y_max);
        writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{3}" stroke-width="1"/>"#,
            axes.x(a.theta),
            axes.y(lo),
            axes.y(hi),
            CURVE_COLORS[3]
        )
        .unwrap();
        circle(&mut out, &axes, a.theta, v, CURVE_COLORS[3]);
    }
    legend(
        &mut out,
        &[
            ("SQL", CURVE_COLORS[0]),
            ("OCRB", CURVE_COLORS[1]),
            ("QCRB", CURVE_COLORS[2]),
            ("measured", CURVE_COLORS[3]),
        ],
    );
    out.push_str("</svg>\n");
    out
}

/// Posterior curves for several record lengths on one axis.
pub fn posterior_figure(curves: &[(usize, PosteriorGrid)]) -> String {
    let y_max = curves
        .iter()
        .flat_map(|(_, g)| g.density().iter().copied())
        .fold(0.0f64, f64::max);
    let axes = Axes {
        x_min: 0.0,
        x_max: std::f64::consts::FRAC_PI_2,
        y_min: 0.0,
        y_max: y_max * 1.05,
        log_y: false,
    };
    let mut out = String::new();
    open_svg(&mut out, "phase shift (rad)", "posterior density");
    let mut entries = Vec::new();
    for (i, (n, grid)) in curves.iter().enumerate() {
        let color = CURVE_COLORS[i % CURVE_COLORS.len()];
        let pts: Vec<(f64, f64)> = grid
            .thetas()
            .iter()
            .zip(grid.density())
            .map(|(t, d)| (*t, *d))
            .collect();
        polyline(&mut out, &axes, &pts, color, "");
        entries.push((format!("N = {n}"), color));
    }
    let refs: Vec<(&str, &str)> = entries.iter().map(|(l, c)| (l.as_str(), *c)).collect();
    legend(&mut out, &refs);
    out.push_str("</svg>\n");
    out
}

/// Beyond-SQL window width against probe purity: empirical points over the
/// predicted curve.
pub fn purity_figure(rows: &[PurityScanRow]) -> String {
    let y_max = rows
        .iter()
        .map(|r| r.delta_theta_theory.max(r.delta_theta_empirical))
        .fold(0.0f64, f64::max);
    let axes = Axes {
        x_min: 0.5,
        x_max: 1.0,
        y_min: 0.0,
        y_max: (y_max * 1.15).max(0.1),
        log_y: false,
    };
    let mut out = String::new();
    open_svg(&mut out, "purity", "delta theta (rad)");
    let theory: Vec<(f64, f64)> = rows.iter().map(|r| (r.purity, r.delta_theta_theory)).collect();
    polyline(&mut out, &axes, &theory, CURVE_COLORS[0], "");
    for r in rows {
        circle(&mut out, &axes, r.purity, r.delta_theta_empirical, CURVE_COLORS[3]);
    }
    legend(
        &mut out,
        &[("theory", CURVE_COLORS[0]), ("sweep", CURVE_COLORS[3])],
    );
    out.push_str("</svg>\n");
    out
}
