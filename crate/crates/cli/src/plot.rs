//! SVG rendering of CSV artifacts. Failures here never touch data files;
//! problems are returned as warnings.

use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::artifacts::read_csv;
use crate::tasks::parity_fits;

/// Outcome of [`render_plots`].
#[derive(Debug, Default)]
pub struct PlotOutcome {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r.get(k).and_then(|v| v.parse().ok())).collect())
    }

    fn columns(&self, names: &[&str]) -> Result<Vec<Vec<Option<f64>>>, String> {
        names
            .iter()
            .map(|n| self.column(n).ok_or_else(|| format!("missing column {n:?}")))
            .collect()
    }
}

type PlotResult = Result<(), Box<dyn std::error::Error>>;

fn log_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| *v > 0.0 && v.is_finite())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (lo.is_finite() && hi > 0.0).then(|| (lo / 2.0, hi * 2.0))
}

fn lin_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return None;
    }
    let pad = ((hi - lo) * 0.05).max(1e-12);
    Some((lo - pad, hi + pad))
}

/// Log-log gap against N with even/odd power-law lines.
fn plot_gap_vs_n(t: &Table, out: &Path) -> PlotResult {
    let cols = t.columns(&["n_sites", "gap"])?;
    let points: Vec<(usize, f64)> = cols[0]
        .iter()
        .zip(&cols[1])
        .filter_map(|(n, g)| Some((n.as_ref().map(|v| *v as usize)?, (*g)?)))
        .filter(|(_, g)| *g > 0.0)
        .collect();
    let (ylo, yhi) = log_range(points.iter().map(|p| p.1)).ok_or("no positive gaps")?;
    let (xlo, xhi) = log_range(points.iter().map(|p| p.0 as f64)).ok_or("no sizes")?;
    let root = SVGBackend::new(out, (640, 480)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Liouvillian gap against chain length", ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d((xlo..xhi).log_scale(), (ylo..yhi).log_scale())?;
    chart.configure_mesh().x_desc("N").y_desc("gap").draw()?;
    for (fit, colour) in parity_fits(&points).iter().zip([BLUE, RED]) {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|(n, _)| fit.n_sites.contains(n))
            .map(|&(n, g)| (n as f64, g))
            .collect();
        chart
            .draw_series(PointSeries::of_element(pts, 4, colour.filled(), &|c, s, st| {
                EmptyElement::at(c) + Circle::new((0, 0), s, st)
            }))?
            .label(fit.parity.clone())
            .legend(move |(x, y)| Circle::new((x, y), 4, colour.filled()));
        if let Some(f) = fit.fit {
            let line: Vec<(f64, f64)> = (0..=50)
                .map(|k| {
                    let n = xlo * (xhi / xlo).powf(k as f64 / 50.0);
                    (n, f.eval(n))
                })
                .filter(|(_, g)| *g >= ylo && *g <= yhi)
                .collect();
            chart
                .draw_series(LineSeries::new(line, colour.stroke_width(1)))?
                .label(format!("{} fit, alpha = {:.2}", fit.parity, f.alpha))
                .legend(move |(x, y)| PathElement::new(vec![(x - 8, y), (x + 8, y)], colour));
        }
    }
    chart.configure_series_labels().background_style(WHITE).border_style(BLACK).draw()?;
    root.present()?;
    Ok(())
}

/// `ln(1 - overlap)` against time with the fitted line.
fn plot_traject(t: &Table, out: &Path) -> PlotResult {
    let cols = t.columns(&["t", "ln_one_minus_overlap", "fit_ln_one_minus_overlap"])?;
    let data: Vec<(f64, f64)> = cols[0].iter().zip(&cols[1]).filter_map(|(a, b)| Some(((*a)?, (*b)?))).collect();
    let fit: Vec<(f64, f64)> = cols[0].iter().zip(&cols[2]).filter_map(|(a, b)| Some(((*a)?, (*b)?))).collect();
    let (xlo, xhi) = lin_range(data.iter().map(|p| p.0)).ok_or("no data points")?;
    let (ylo, yhi) = lin_range(data.iter().chain(&fit).map(|p| p.1)).ok_or("no data points")?;
    let root = SVGBackend::new(out, (640, 480)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Excited population of the ensemble", ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(xlo..xhi, ylo..yhi)?;
    chart.configure_mesh().x_desc("t").y_desc("ln(1 - overlap)").draw()?;
    chart
        .draw_series(LineSeries::new(data, BLUE.stroke_width(2)))?
        .label("ensemble mean")
        .legend(|(x, y)| PathElement::new(vec![(x - 8, y), (x + 8, y)], BLUE));
    if !fit.is_empty() {
        chart
            .draw_series(LineSeries::new(fit, RED.stroke_width(1)))?
            .label("linear fit")
            .legend(|(x, y)| PathElement::new(vec![(x - 8, y), (x + 8, y)], RED));
    }
    chart.configure_series_labels().background_style(WHITE).border_style(BLACK).draw()?;
    root.present()?;
    Ok(())
}

fn heat_colour(v: f64) -> RGBColor {
    let v = v.clamp(0.0, 1.0);
    RGBColor((255.0 * v) as u8, (80.0 + 100.0 * (1.0 - (2.0 * v - 1.0).abs())) as u8, (255.0 * (1.0 - v)) as u8)
}

/// Heatmap of `log10(gap / γ)` on the α × γ grid.
fn plot_alpha_gamma(t: &Table, out: &Path) -> PlotResult {
    let cols = t.columns(&["alpha", "gamma", "gap"])?;
    let cells: Vec<(f64, f64, f64)> = (0..t.rows.len())
        .filter_map(|i| Some((cols[0][i]?, cols[1][i]?, cols[2][i]?)))
        .collect();
    if cells.is_empty() {
        return Err("no complete rows".into());
    }
    let mut alphas: Vec<f64> = cells.iter().map(|c| c.0).collect();
    let mut gammas: Vec<f64> = cells.iter().map(|c| c.1).collect();
    for v in [&mut alphas, &mut gammas] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let value = |c: &(f64, f64, f64)| (c.2 > 0.0).then(|| (c.2 / c.1).log10());
    let (vlo, vhi) = cells
        .iter()
        .filter_map(value)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let root = SVGBackend::new(out, (640, 480)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("log10(gap / gamma)", ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0f64..gammas.len() as f64, 0f64..alphas.len() as f64)?;
    let glabels = gammas.clone();
    let alabels = alphas.clone();
    chart
        .configure_mesh()
        .disable_mesh()
        .x_desc("gamma")
        .y_desc("alpha")
        .x_labels(gammas.len() * 2 + 1)
        .y_labels(alphas.len() * 2 + 1)
        .x_label_formatter(&move |x| {
            let k = (x - 0.5).round();
            if (x - 0.5 - k).abs() < 1e-6 && k >= 0.0 && (k as usize) < glabels.len() {
                format!("{:.0e}", glabels[k as usize])
            } else {
                String::new()
            }
        })
        .y_label_formatter(&move |y| {
            let k = (y - 0.5).round();
            if (y - 0.5 - k).abs() < 1e-6 && k >= 0.0 && (k as usize) < alabels.len() {
                format!("{}", alabels[k as usize])
            } else {
                String::new()
            }
        })
        .draw()?;
    let span = (vhi - vlo).max(1e-12);
    chart.draw_series(cells.iter().map(|c| {
        let i = gammas.iter().position(|g| *g == c.1).unwrap_or(0) as f64;
        let j = alphas.iter().position(|a| *a == c.0).unwrap_or(0) as f64;
        let colour = match value(c) {
            Some(v) if vlo.is_finite() => heat_colour((v - vlo) / span),
            _ => RGBColor(200, 200, 200),
        };
        Rectangle::new([(i, j), (i + 1.0, j + 1.0)], colour.filled())
    }))?;
    chart.draw_series(cells.iter().filter_map(|c| {
        let v = value(c)?;
        let i = gammas.iter().position(|g| *g == c.1)? as f64;
        let j = alphas.iter().position(|a| *a == c.0)? as f64;
        Some(Text::new(format!("{v:.2}"), (i + 0.4, j + 0.5), ("sans-serif", 12)))
    }))?;
    root.present()?;
    Ok(())
}

type Renderer = fn(&Table, &Path) -> PlotResult;

fn plot_for(name: &str) -> Option<(Renderer, String)> {
    let stem = name.strip_suffix(".csv")?;
    let f: Renderer = match stem {
        "scan_gap_vs_n" | "gap" => plot_gap_vs_n,
        "scan_alpha_gamma" => plot_alpha_gamma,
        s if s.starts_with("traject_n") => plot_traject,
        _ => return None,
    };
    Some((f, format!("{stem}.svg")))
}

/// Renders every recognised CSV in `dir` to an SVG next to it. Files are
/// visited in name order.
pub fn render_plots(dir: &Path) -> std::io::Result<PlotOutcome> {
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .collect();
    names.sort();
    let mut outcome = PlotOutcome::default();
    for name in names {
        let Some((f, svg)) = plot_for(&name) else {
            continue;
        };
        let path = dir.join(&name);
        let table = match read_csv(&path) {
            Ok((headers, rows)) => Table { headers, rows },
            Err(e) => {
                outcome.warnings.push(format!("{name}: {e}"));
                continue;
            }
        };
        if table.rows.is_empty() {
            outcome.warnings.push(format!("{name}: no rows, plot skipped"));
            continue;
        }
        let target = dir.join(&svg);
        match f(&table, &target) {
            Ok(()) => outcome.written.push(target),
            Err(e) => {
                let _ = std::fs::remove_file(&target);
                outcome.warnings.push(format!("{name}: {e}, plot skipped"));
            }
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        std::fs::write(dir.join(name), format!("# dilute test\n{body}")).unwrap();
    }

    #[test]
    fn gap_vs_n_plot_is_written() {
        let d = tempfile::tempdir().unwrap();
        write(
            d.path(),
            "scan_gap_vs_n.csv",
            "n_sites,parity,dim,method,gap,gap_estimate\n5,odd,243,x,1e-4,\n6,even,729,x,7e-4,\n7,odd,2187,x,7e-5,\n8,even,6561,x,2.4e-4,\n",
        );
        let o = render_plots(d.path()).unwrap();
        assert!(o.warnings.is_empty(), "{:?}", o.warnings);
        let svg = std::fs::read_to_string(d.path().join("scan_gap_vs_n.svg")).unwrap();
        assert!(svg.contains("<svg") && svg.contains("alpha"));
    }

    #[test]
    fn empty_and_broken_inputs_only_warn() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "scan_gap_vs_n.csv", "n_sites,gap\n");
        write(d.path(), "traject_n3.csv", "t,mean_overlap\n0,0.1\n");
        let o = render_plots(d.path()).unwrap();
        assert!(o.written.is_empty());
        assert_eq!(o.warnings.len(), 2);
        assert!(!d.path().join("traject_n3.svg").exists());
    }

    #[test]
    fn heatmap_and_trajectory_plots() {
        let d = tempfile::tempdir().unwrap();
        write(
            d.path(),
            "scan_alpha_gamma.csv",
            "alpha,gamma,gap\n0,0.01,0\n0,0.1,0\n1,0.01,1e-4\n1,0.1,8e-4\n",
        );
        write(
            d.path(),
            "traject_n3.csv",
            "t,mean_overlap,bootstrap_std,ln_one_minus_overlap,fit_ln_one_minus_overlap\n0,0.1,0.01,-0.1,\n1,0.5,0.01,-0.69,-0.7\n2,0.75,0.01,-1.38,-1.4\n",
        );
        let o = render_plots(d.path()).unwrap();
        assert_eq!(o.written.len(), 2, "{:?}", o.warnings);
    }
}
