use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Error;
use crate::phase::PhaseWindow;

use super::sweep::SweepResult;

pub const CSV_COLUMNS: [&str; 11] = [
    "theta",
    "phi",
    "magnitude",
    "degenerate",
    "mu_x",
    "mu_z",
    "alpha",
    "omega_c",
    "temperature",
    "periods",
    "error",
];

/// 17 significant digits: every f64 round-trips exactly. Also, reproducible across runs and platforms.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Single-line `# key=value ...` echo of every run parameter.
pub fn metadata_line(res: &SweepResult) -> String {
    let mut line = String::from("#");
    for (k, v) in res.config.metadata() {
        let _ = write!(line, " {k}={v}");
    }
    line
}

pub fn write_csv<W: Write>(res: &SweepResult, mut out: W) -> Result<(), Error> {
    writeln!(out, "{}", metadata_line(res))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    let c = &res.config;
    let echo = [
        num(c.qubit.mu_x),
        num(c.qubit.mu_z),
        num(c.bath.alpha),
        num(c.bath.omega_c),
        num(c.bath.temperature),
        num(c.integrator.periods),
    ];
    for r in &res.records {
        let mut row = vec![
            num(r.theta),
            r.phi.map(num).unwrap_or_default(),
            r.magnitude.map(num).unwrap_or_default(),
            r.degenerate.to_string(),
        ];
        row.extend(echo.iter().cloned());
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(res: &SweepResult) -> Result<String, Error> {
    let mut buf = Vec::new();
    write_csv(res, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

pub fn save_csv(res: &SweepResult, path: &Path) -> Result<(), Error> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(res, file)
}

/// One labelled `(theta, phi)` series of a plot.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 680.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Line plot of `Phi / pi` against `theta / pi`. Jumps across the phase
/// window are drawn as breaks rather than vertical segments.
pub fn render_svg(title: &str, curves: &[Curve], window: PhaseWindow) -> String {
    let (y_lo, y_hi) = match window {
        PhaseWindow::ZeroToTwoPi => (0.0, 2.0),
        PhaseWindow::MinusPiToPi => (-1.0, 1.0),
    };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + pw * x;
    let sy = |y: f64| TOP + ph * (y_hi - y) / (y_hi - y_lo);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let x = k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4}</text>"#,
            sx(x),
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            x
        );
        let y = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="black"/><text x="{3:.2}" y="{4:.2}" text-anchor="end">{5}</text>"#,
            LEFT - 5.0,
            sy(y),
            LEFT,
            LEFT - 8.0,
            sy(y) + 4.0,
            y
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">theta / pi</text>"#,
        LEFT + pw / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">Phi / pi</text>"#,
        TOP + ph / 2.0
    );

    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for seg in split_at_wraps(&c.points) {
            let pts: Vec<String> = seg
                .iter()
                .map(|&(t, p)| format!("{:.2},{:.2}", sx(t / std::f64::consts::PI), sy(p / std::f64::consts::PI)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = TOP + 15.0 + 20.0 * i as f64;
        let lx = W - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn split_at_wraps(points: &[(f64, f64)]) -> Vec<&[(f64, f64)]> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..points.len() {
        if (points[k].1 - points[k - 1].1).abs() > std::f64::consts::PI {
            out.push(&points[start..k]);
            start = k;
        }
    }
    if start < points.len() {
        out.push(&points[start..]);
    }
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn save_svg(title: &str, curves: &[Curve], window: PhaseWindow, path: &Path) -> Result<(), Error> {
    std::fs::write(path, render_svg(title, curves, window))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ExperimentConfig;
    use crate::experiment::sweep::SweepRecord;

    fn fake() -> SweepResult {
        let rec = |theta: f64, phi: Option<f64>, error: Option<&str>| SweepRecord {
            theta,
            phi,
            magnitude: phi.map(|_| 0.75),
            degenerate: false,
            error: error.map(str::to_string),
            max_correction: 0.0,
            min_eigenvalue: 0.0,
        };
        SweepResult {
            config: ExperimentConfig::default(),
            records: vec![
                rec(0.1, Some(std::f64::consts::PI), None),
                rec(0.2, None, Some("positivity, violated")),
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let text = csv_string(&fake()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# epsilon=1 mu_x=0"));
        assert!(lines[0].contains("window=zero2pi"));
        assert_eq!(lines[1], CSV_COLUMNS.join(","));
        assert!(lines[2].starts_with("1.0000000000000001e-1,3.1415926535897931e0,7.5000000000000000e-1,false,"));
        assert!(lines[2].ends_with(','));
        // Embedded comma is quoted, empty numeric fields stay empty.
        assert!(lines[3].contains(",,,false,"));
        assert!(lines[3].ends_with("\"positivity, violated\""));
    }

    #[test]
    fn csv_numbers_round_trip() {
        let x = 0.1 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn svg_breaks_wrapped_curves() {
        let pts = vec![(0.5, 6.0), (1.0, 6.2), (1.5, 0.1), (2.0, 0.3)];
        assert_eq!(split_at_wraps(&pts).len(), 2);
        let svg = render_svg(
            "a < b",
            &[Curve { label: "mu_z = 0.1".into(), points: pts }],
            PhaseWindow::ZeroToTwoPi,
        );
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
