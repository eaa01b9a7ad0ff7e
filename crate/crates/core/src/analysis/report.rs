use std::fmt::Write as _;
use std::io::{self, Write};

use super::study::{ConvergenceStudy, ErrorReport, SweepResult, pairwise_orders};

/// Seventeen significant digits, so values round-trip exactly.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub const RUN_HEADER: &str = "step,time,err_W1_nu_velocity,err_L2_nu_pressure,solver_residual,wall_ms";
pub const CONVERGENCE_HEADER: &str = "h,err,order";
pub const SWEEP_HEADER: &str = "nu,nu_star,delta,h,err_final,err_max,order,member";
pub const FAILURE_HEADER: &str = "nu,nu_star,delta,h,message";

pub fn write_run_csv<W: Write>(report: &ErrorReport, mut w: W) -> io::Result<()> {
    writeln!(w, "{RUN_HEADER}")?;
    for r in &report.records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.step,
            fmt_num(r.time),
            fmt_num(r.velocity_error),
            fmt_num(r.pressure_error),
            fmt_num(r.residual),
            fmt_num(r.wall_ms)
        )?;
    }
    Ok(())
}

pub fn write_convergence_csv<W: Write>(study: &ConvergenceStudy, mut w: W) -> io::Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    for ((h, e), o) in study.h.iter().zip(&study.errors).zip(&study.orders) {
        writeln!(w, "{},{},{}", fmt_num(*h), fmt_num(*e), fmt_opt(*o))?;
    }
    Ok(())
}

/// One row per successful point and mesh size; failed points are left out.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, mut w: W) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for (i, p) in result.region.points.iter().enumerate() {
        let Some(reports) = &result.reports[i] else { continue };
        let finals: Vec<f64> = reports.iter().map(|r| r.final_velocity).collect();
        let orders = pairwise_orders(&result.sizes, &finals);
        let member = result.region.member[i];
        for (j, r) in reports.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                fmt_num(p.nu),
                fmt_num(p.nu_star),
                fmt_num(p.delta),
                fmt_num(result.sizes[j]),
                fmt_num(r.final_velocity),
                fmt_num(r.max_velocity),
                fmt_opt(orders[j]),
                u8::from(member)
            )?;
        }
    }
    Ok(())
}

pub fn write_failures_csv<W: Write>(result: &SweepResult, mut w: W) -> io::Result<()> {
    writeln!(w, "{FAILURE_HEADER}")?;
    for f in &result.failures {
        let p = &result.region.points[f.point];
        let msg = f.message.replace(['"', '\n', '\r'], " ");
        writeln!(
            w,
            "{},{},{},{},\"{msg}\"",
            fmt_num(p.nu),
            fmt_num(p.nu_star),
            fmt_num(p.delta),
            fmt_num(f.h)
        )?;
    }
    Ok(())
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Distinct `delta` values of the sweep, ascending.
pub fn sweep_deltas(result: &SweepResult) -> Vec<f64> {
    sorted_unique(result.region.points.iter().map(|p| p.delta).collect())
}

const CELL: f64 = 36.0;
const MARGIN: f64 = 60.0;

/// Heatmap over `(nu, nu*)` for one `delta`: shade is the finest-level final
/// error relative to the best point, members are outlined, failures crossed.
pub fn heatmap_svg(result: &SweepResult, delta: f64) -> String {
    let pts: Vec<usize> = (0..result.region.points.len())
        .filter(|&i| result.region.points[i].delta == delta)
        .collect();
    let nus = sorted_unique(pts.iter().map(|&i| result.region.points[i].nu).collect());
    let stars = sorted_unique(pts.iter().map(|&i| result.region.points[i].nu_star).collect());
    let width = 2.0 * MARGIN + CELL * nus.len() as f64;
    let height = 2.0 * MARGIN + CELL * stars.len() as f64;
    let finest = |i: usize| {
        result.reports[i]
            .as_ref()
            .and_then(|r| r.last())
            .map(|r| r.final_velocity)
    };
    let best = pts
        .iter()
        .filter_map(|&i| finest(i))
        .fold(f64::INFINITY, f64::min);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">delta = {delta}</text>"#,
        width / 2.0
    );
    for &i in &pts {
        let p = &result.region.points[i];
        let cx = nus.iter().position(|v| *v == p.nu).unwrap_or(0);
        let cy = stars.iter().position(|v| *v == p.nu_star).unwrap_or(0);
        let x = MARGIN + CELL * cx as f64;
        let y = MARGIN + CELL * (stars.len() - 1 - cy) as f64;
        match finest(i) {
            Some(e) => {
                let t = ((e / best).log10() / 2.0).clamp(0.0, 1.0);
                let shade = (40.0 + 215.0 * t).round() as u8;
                let _ = writeln!(
                    s,
                    r#"<rect x="{x:.1}" y="{y:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="rgb({shade},{shade},255)" stroke="gray" stroke-width="0.5"/>"#
                );
                if result.region.member[i] {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="red" stroke-width="3"/>"#,
                        x + 1.5,
                        y + 1.5,
                        CELL - 3.0,
                        CELL - 3.0
                    );
                }
            }
            None => {
                let _ = writeln!(
                    s,
                    r#"<path d="M{x:.1},{y:.1} l{CELL:.1},{CELL:.1} M{:.1},{y:.1} l-{CELL:.1},{CELL:.1}" stroke="black" stroke-width="1"/>"#,
                    x + CELL
                );
            }
        }
    }
    for (k, v) in nus.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="10">{v}</text>"#,
            MARGIN + CELL * (k as f64 + 0.5),
            height - MARGIN + 14.0
        );
    }
    for (k, v) in stars.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="10">{v}</text>"#,
            MARGIN - 6.0,
            MARGIN + CELL * ((stars.len() - 1 - k) as f64 + 0.5) + 3.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">nu</text>"#,
        width / 2.0,
        height - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.1})">nu*</text>"#,
        height / 2.0,
        height / 2.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::region::{PointErrors, RegionMap};
    use crate::analysis::study::RunSpec;
    use crate::analysis::config::RunConfig;
    use crate::timestep::StepRecord;

    fn report(spec: RunSpec, e: f64) -> ErrorReport {
        let r = StepRecord {
            step: 1,
            time: 0.1,
            velocity_error: e,
            pressure_error: e,
            residual: 1e-13,
            wall_ms: 1.0,
        };
        ErrorReport::from_records(spec, 10, vec![r], 1.0)
    }

    fn fake_sweep() -> SweepResult {
        let spec = RunSpec::from_config(&RunConfig::default()).unwrap()[0];
        let mk = |nu: f64, e: Option<f64>| PointErrors {
            nu,
            nu_star: 0.6,
            delta: 0.03,
            errors: e.map(|e| vec![vec![2.0 * e], vec![e]]),
        };
        let points = vec![mk(0.6, Some(0.1)), mk(1.0, Some(0.2)), mk(1.4, None)];
        let reports = vec![
            Some(vec![report(spec, 0.2), report(spec, 0.1)]),
            Some(vec![report(spec, 0.4), report(spec, 0.2)]),
            None,
        ];
        SweepResult {
            sizes: vec![0.1, 0.05],
            checkpoints: 1,
            reports,
            region: RegionMap::new(points, 1.05).unwrap(),
            failures: vec![super::super::study::SweepFailure {
                point: 2,
                h: 0.05,
                message: "singular \"pivot\"".into(),
            }],
        }
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-9, 12345.678] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sweep_csv_lists_successful_points() {
        let mut out = Vec::new();
        write_sweep_csv(&fake_sweep(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].ends_with(",,1"));
        let cols: Vec<_> = lines[2].split(',').collect();
        assert_eq!(cols.len(), 8);
        assert!((cols[6].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cols[7], "1");
        assert!(lines[4].ends_with(",0"));
    }

    #[test]
    fn failures_are_quoted() {
        let mut out = Vec::new();
        write_failures_csv(&fake_sweep(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with("\"singular  pivot \""));
    }

    #[test]
    fn heatmap_is_deterministic() {
        let r = fake_sweep();
        let a = heatmap_svg(&r, 0.03);
        assert_eq!(a, heatmap_svg(&r, 0.03));
        assert!(a.starts_with("<svg"));
        assert_eq!(a.matches("stroke=\"red\"").count(), 1);
        assert_eq!(a.matches("<path").count(), 1);
        assert_eq!(sweep_deltas(&r), vec![0.03]);
    }

    #[test]
    fn empty_sweep_gives_header_and_empty_heatmap() {
        let r = SweepResult {
            sizes: vec![0.1],
            checkpoints: 1,
            reports: vec![],
            region: RegionMap::new(vec![], 1.05).unwrap(),
            failures: vec![],
        };
        let mut out = Vec::new();
        write_sweep_csv(&r, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), format!("{SWEEP_HEADER}\n"));
        assert!(heatmap_svg(&r, 0.03).ends_with("</svg>\n"));
    }
}
