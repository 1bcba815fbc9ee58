//! Plot-ready CSV files and small standalone SVG line charts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::cell::CellModel;
use crate::error::Error;
use crate::network::Network;
use crate::simulator::{distance_series, fmt_f64, Trajectory};
use crate::sweep::SweepRow;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in series.iter().flat_map(|s| &s.points) {
        if x.is_finite() && y.is_finite() {
            b = (b.0.min(*x), b.1.max(*x), b.2.min(*y), b.3.max(*y));
        }
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if b.1 <= b.0 {
        b.1 = b.0 + 1.0;
    }
    if b.3 <= b.2 {
        b.3 = b.2 + 1.0;
    }
    b
}

/// Renders `series` as a self-contained SVG document.
pub fn svg_line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x0, x1, y0, y1) = bounds(series);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(xv),
            HEIGHT - MARGIN + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            sy(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN + 14.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 4.0,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes the series as CSV with a shared first column `x_name`; all series
/// must be sampled at the same abscissae.
pub fn series_csv(x_name: &str, series: &[Series]) -> String {
    let mut s = String::from(x_name);
    for ser in series {
        s.push(',');
        s.push_str(&ser.name);
    }
    s.push('\n');
    let n = series.first().map_or(0, |f| f.points.len());
    for k in 0..n {
        s.push_str(&fmt_f64(series[0].points[k].0));
        for ser in series {
            s.push(',');
            s.push_str(&fmt_f64(ser.points[k].1));
        }
        s.push('\n');
    }
    s
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, Error> {
    fs::write(&path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

/// Density and distance charts for a trajectory: `density.{csv,svg}` and
/// `distance.{csv,svg}` in `dir`.
pub fn emit_trajectory_plots(
    traj: &Trajectory,
    net: &Network,
    cells: &[CellModel],
    reference: &[f64],
    dir: &Path,
) -> Result<Vec<PathBuf>, Error> {
    if traj.is_empty() {
        return Err(Error::Scenario("cannot plot an empty trajectory".into()));
    }
    ensure_dir(dir)?;
    let density: Vec<Series> = net
        .topology()
        .link_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| Series {
            name: format!("x_{id}"),
            points: traj.records.iter().map(|r| (r.t, r.x[i])).collect(),
        })
        .collect();
    let dist = distance_series(traj, reference, cells);
    let distance = vec![
        Series {
            name: "l1_dist".into(),
            points: dist.iter().map(|p| (p.t, p.l1)).collect(),
        },
        Series {
            name: "total_latency".into(),
            points: dist.iter().map(|p| (p.t, p.total_latency)).collect(),
        },
    ];
    Ok(vec![
        write(dir.join("density.csv"), &series_csv("t", &density))?,
        write(
            dir.join("density.svg"),
            &svg_line_chart("link densities", "t", "x", &density),
        )?,
        write(dir.join("distance.csv"), &series_csv("t", &distance))?,
        write(
            dir.join("distance.svg"),
            &svg_line_chart("distance to reference", "t", "l1 distance", &distance[..1]),
        )?,
    ])
}

/// Final distance and latency loss against the swept parameter, one line per
/// toll policy: `sweep.csv` and `sweep.svg` in `dir`.
pub fn emit_sweep_plots(rows: &[SweepRow], dir: &Path) -> Result<Vec<PathBuf>, Error> {
    if rows.is_empty() {
        return Err(Error::Scenario("cannot plot an empty sweep".into()));
    }
    ensure_dir(dir)?;
    let axis = rows[0].axis.as_str();
    let mut policies: Vec<&str> = Vec::new();
    for r in rows {
        if !policies.contains(&r.tolls) {
            policies.push(r.tolls);
        }
    }
    let mut distance = Vec::new();
    let mut loss = Vec::new();
    for p in &policies {
        let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.tolls == *p).collect();
        distance.push(Series {
            name: format!("distance_{p}"),
            points: sel.iter().map(|r| (r.value, r.final_distance)).collect(),
        });
        loss.push(Series {
            name: format!("latency_loss_{p}"),
            points: sel.iter().map(|r| (r.value, r.latency_loss)).collect(),
        });
    }
    let mut all = distance.clone();
    all.extend(loss);
    let same_grid = all.windows(2).all(|w| {
        w[0].points.len() == w[1].points.len()
            && w[0].points.iter().zip(&w[1].points).all(|(a, b)| a.0 == b.0)
    });
    if !same_grid {
        return Err(Error::Scenario("toll policies were swept over different grids".into()));
    }
    Ok(vec![
        write(dir.join("sweep.csv"), &series_csv(axis, &all))?,
        write(
            dir.join("sweep.svg"),
            &svg_line_chart(&format!("final distance vs {axis}"), axis, "l1 distance", &distance),
        )?,
    ])
}
