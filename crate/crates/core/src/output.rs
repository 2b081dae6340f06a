//! CSV time series and self-contained SVG panels.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::MetricSeries;
use crate::sim::ComplexTrajectory;

/// Shortest representation that round-trips an `f64` exactly (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Full trajectory table:
/// `t, x_re_*, x_im_*, mod_*, arg_unwrapped_*, r_mod, r_arg, e_abs`.
/// `e_abs` is left empty when no reference run exists.
pub fn trajectory_csv(traj: &ComplexTrajectory, series: &MetricSeries) -> String {
    let n = traj.states.first().map_or(0, |s| s.n());
    let mut out = String::from("t");
    for prefix in ["x_re_", "x_im_", "mod_", "arg_unwrapped_"] {
        for k in 0..n {
            let _ = write!(out, ",{prefix}{k}");
        }
    }
    out.push_str(",r_mod,r_arg,e_abs\n");
    for (i, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        out.push_str(&fmt_f64(*t));
        let columns = [
            s.x.iter().map(|z| z.re).collect::<Vec<_>>(),
            s.x.iter().map(|z| z.im).collect(),
            s.moduli(),
            s.unwrapped_args.clone(),
        ];
        for v in columns.iter().flatten() {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        let _ = write!(out, ",{},{},", fmt_f64(series.r_mod[i]), fmt_f64(series.r_arg[i]));
        if let Some(e) = &series.e_abs {
            out.push_str(&fmt_f64(e[i]));
        }
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(path: &Path, traj: &ComplexTrajectory, series: &MetricSeries) -> Result<()> {
    write_file(path, &trajectory_csv(traj, series))
}

/// Generic table with a header row.
pub fn table_csv(header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub color: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub y_label: String,
    pub times: Vec<f64>,
    pub curves: Vec<Curve>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const MAX_POINTS: usize = 1500;

fn palette(k: usize) -> String {
    // golden-angle hue walk keeps neighbouring oscillators distinguishable;
    // emitted as hex since not every renderer understands hsl()
    let (h, s, l) = ((k as f64 * 137.508) % 360.0, 0.65, 0.45);
    let c = (1.0 - (2.0 * l - 1.0f64).abs()) * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let byte = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
}

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    while t <= hi + step * 1e-9 {
        ticks.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

impl Panel {
    pub fn to_svg(&self) -> String {
        let stride = self.times.len().div_ceil(MAX_POINTS).max(1);
        let idx: Vec<usize> = (0..self.times.len())
            .step_by(stride)
            .chain(self.times.len().checked_sub(1))
            .collect();
        let (t0, t1) = match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) if b > a => (*a, *b),
            (Some(a), _) => (*a, a + 1.0),
            _ => (0.0, 1.0),
        };
        let finite = self.curves.iter().flat_map(|c| c.values.iter()).filter(|v| v.is_finite());
        let (mut y0, mut y1) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !y0.is_finite() {
            (y0, y1) = (0.0, 1.0);
        }
        if y1 - y0 < 1e-12 * y0.abs().max(1.0) {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.05 * (y1 - y0);
        let (y0, y1) = (y0 - pad, y1 + pad);
        let pw = WIDTH - MARGIN_L - MARGIN_R;
        let ph = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |t: f64| MARGIN_L + (t - t0) / (t1 - t0) * pw;
        let sy = |v: f64| MARGIN_T + (y1 - v) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        for t in nice_ticks(t0, t1, 8) {
            let x = sx(t);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{MARGIN_T}" x2="{x:.2}" y2="{:.2}" stroke="#e4e4e4"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                MARGIN_T + ph,
                MARGIN_T + ph + 16.0,
                fmt_tick(t)
            );
        }
        for v in nice_ticks(y0, y1, 6) {
            let y = sy(v);
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN_L}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e4e4e4"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                MARGIN_L + pw,
                MARGIN_L - 6.0,
                y + 4.0,
                fmt_tick(v)
            );
        }
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t [s]</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 10.0
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(16,{:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            MARGIN_T + ph / 2.0,
            escape(&self.y_label)
        );
        for curve in &self.curves {
            let mut points = String::new();
            for &i in &idx {
                let v = curve.values[i];
                if v.is_finite() {
                    let _ = write!(points, "{:.2},{:.2} ", sx(self.times[i]), sy(v));
                }
            }
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"><title>{}</title></polyline>"#,
                curve.color,
                points.trim_end(),
                escape(&curve.label)
            );
        }
        if self.curves.len() <= 4 {
            for (k, curve) in self.curves.iter().enumerate() {
                let y = MARGIN_T + 16.0 + 16.0 * k as f64;
                let x = MARGIN_L + pw - 150.0;
                let _ = writeln!(
                    s,
                    r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                    x + 20.0,
                    curve.color,
                    x + 26.0,
                    y + 4.0,
                    escape(&curve.label)
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }

    /// Data behind the panel: `t` followed by one column per curve.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["t".to_string()];
        header.extend(self.curves.iter().map(|c| c.label.clone()));
        table_csv(
            &header,
            self.times.iter().enumerate().map(|(i, &t)| {
                std::iter::once(t).chain(self.curves.iter().map(|c| c.values[i])).collect()
            }),
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Panels for a run: arguments, magnitudes, `|r|` (with the reference run's
/// curve when given) and `e(t)` when available.
pub fn panels(traj: &ComplexTrajectory, series: &MetricSeries, reference_r: Option<&[f64]>) -> Vec<(&'static str, Panel)> {
    let n = traj.states.first().map_or(0, |s| s.n());
    let per_node = |f: &dyn Fn(usize, usize) -> f64, prefix: &str| -> Vec<Curve> {
        (0..n)
            .map(|k| Curve {
                label: format!("{prefix}{k}"),
                color: palette(k),
                values: (0..traj.len()).map(|i| f(i, k)).collect(),
            })
            .collect()
    };
    let mut out = vec![
        (
            "args",
            Panel {
                title: "Arguments (unwrapped)".into(),
                y_label: "arg x_k [rad]".into(),
                times: traj.times.clone(),
                curves: per_node(&|i, k| traj.states[i].unwrapped_args[k], "arg_unwrapped_"),
            },
        ),
        (
            "magnitudes",
            Panel {
                title: "Magnitudes".into(),
                y_label: "|x_k|".into(),
                times: traj.times.clone(),
                curves: per_node(&|i, k| traj.states[i].x[k].norm(), "mod_"),
            },
        ),
    ];
    let mut order = vec![Curve {
        label: "r_mod".into(),
        color: "#d62728".into(),
        values: series.r_mod.clone(),
    }];
    if let Some(r) = reference_r {
        order.push(Curve {
            label: "r_mod_real".into(),
            color: "black".into(),
            values: r.to_vec(),
        });
    }
    out.push((
        "order",
        Panel {
            title: "Order parameter".into(),
            y_label: "|r|".into(),
            times: traj.times.clone(),
            curves: order,
        },
    ));
    if let Some(e) = &series.e_abs {
        out.push((
            "error",
            Panel {
                title: "Mean absolute phase error".into(),
                y_label: "e [rad]".into(),
                times: traj.times.clone(),
                curves: vec![Curve {
                    label: "e_abs".into(),
                    color: "#1f77b4".into(),
                    values: e.clone(),
                }],
            },
        ));
    }
    out
}

/// Writes `<name>.svg` and `<name>.csv` per panel; returns the written paths.
pub fn emit_plots(
    traj: &ComplexTrajectory,
    series: &MetricSeries,
    reference_r: Option<&[f64]>,
    outdir: &Path,
) -> Result<Vec<PathBuf>> {
    if traj.is_empty() {
        return Err(Error::Precondition("cannot plot an empty trajectory".into()));
    }
    ensure_dir(outdir)?;
    let mut written = Vec::new();
    for (name, panel) in panels(traj, series, reference_r) {
        let svg = outdir.join(format!("{name}.svg"));
        write_file(&svg, &panel.to_svg())?;
        let csv = outdir.join(format!("{name}.csv"));
        write_file(&csv, &panel.to_csv())?;
        written.push(svg);
        written.push(csv);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ComplexState;
    use crate::sim::Trajectory;

    fn tiny() -> (ComplexTrajectory, MetricSeries) {
        let mut traj = Trajectory::new();
        for i in 0..5 {
            traj.times.push(i as f64 * 0.1);
            traj.states.push(ComplexState::from_phases(&[0.1 * i as f64, -0.2]));
        }
        let series = MetricSeries::from_complex(&traj, None).unwrap();
        (traj, series)
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, std::f64::consts::TAU, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let (traj, series) = tiny();
        let csv = trajectory_csv(&traj, &series);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,x_re_0,x_re_1,x_im_0,x_im_1,mod_0,mod_1,arg_unwrapped_0,arg_unwrapped_1,r_mod,r_arg,e_abs"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.split(',').count() == 12));
        assert!(rows[0].ends_with(','));
    }

    #[test]
    fn panels_without_reference() {
        let (traj, series) = tiny();
        let p = panels(&traj, &series, None);
        let names: Vec<_> = p.iter().map(|(n, _)| *n).collect();
        assert_eq!(names, ["args", "magnitudes", "order"]);
        assert_eq!(p[2].1.curves.len(), 1);
        let svg = p[0].1.to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn ticks_cover_range() {
        let t = nice_ticks(0.0, 10.0, 8);
        assert_eq!(t.first(), Some(&0.0));
        assert!((t.last().unwrap() - 10.0).abs() < 1e-12);
    }
}
