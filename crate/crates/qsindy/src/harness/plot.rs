//! Minimal static SVG rendering of result tables. The CSVs are the artifact
//! of record; these plots are a convenience for eyeballing them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Sweep,
    RbfGrid,
    HwNoise,
}

impl PlotKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sweep" => Some(Self::Sweep),
            "rbf-grid" => Some(Self::RbfGrid),
            "hw-noise" => Some(Self::HwNoise),
            _ => None,
        }
    }
}

fn method_color(method: &str) -> &'static str {
    match method {
        "vanilla" => "#1f77b4",
        "naive_q" => "#ff7f0e",
        "orth_q" => "#2ca02c",
        "rbf" => "#d62728",
        _ => "#777777",
    }
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path) -> Result<Csv> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::SchemaMismatch(format!("{}: {e}", path.display())))?;
    let header = reader
        .headers()
        .map_err(|e| Error::SchemaMismatch(e.to_string()))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::SchemaMismatch(e.to_string()))?;
        rows.push(record.iter().map(|s| s.to_string()).collect());
    }
    Ok(Csv { header, rows })
}

fn require_columns(csv: &Csv, expected: &[&str], path: &Path) -> Result<Vec<usize>> {
    let mut indices = Vec::with_capacity(expected.len());
    for name in expected {
        match csv.header.iter().position(|h| h == name) {
            Some(i) => indices.push(i),
            None => {
                return Err(Error::SchemaMismatch(format!(
                    "{}: missing column `{name}` (header: {})",
                    path.display(),
                    csv.header.join(",")
                )))
            }
        }
    }
    if csv.rows.is_empty() {
        return Err(Error::SchemaMismatch(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(indices)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::SchemaMismatch(format!("bad numeric field `{s}`")))
}

/// Canvas geometry for the line charts.
const W: f64 = 640.0;
const H: f64 = 420.0;
const ML: f64 = 60.0;
const MR: f64 = 140.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;

struct LineSeries {
    name: String,
    /// (x, mean, min, max)
    points: Vec<(f64, f64, f64, f64)>,
}

fn line_chart(title: &str, x_label: &str, series: &[LineSeries]) -> String {
    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if (x_max - x_min).abs() < 1e-300 {
        1.0
    } else {
        x_max - x_min
    };
    let px = |x: f64| ML + (x - x_min) / span * (W - ML - MR);
    let py = |y: f64| MT + (1.0 - y) * (H - MT - MB);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
        ML + (W - ML - MR) / 2.0
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB
    ));
    // y ticks at 0, 0.25, ..., 1
    for i in 0..=4 {
        let y = i as f64 * 0.25;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
            ML - 4.0,
            py(y),
            py(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y}</text>\n",
            ML - 8.0,
            py(y) + 4.0
        ));
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            py(y),
            W - MR,
            py(y)
        ));
    }
    // x ticks at the observed sample positions of the first series
    for &(x, ..) in &series[0].points {
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            px(x),
            H - MB,
            px(x),
            H - MB + 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x}</text>\n",
            px(x),
            H - MB + 18.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">TPR</text>\n",
        MT + (H - MT - MB) / 2.0,
        MT + (H - MT - MB) / 2.0
    ));

    for (k, s) in series.iter().enumerate() {
        let color = method_color(&s.name);
        // min..max whiskers
        for &(x, _, lo, hi) in &s.points {
            svg.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" stroke-opacity=\"0.45\"/>\n",
                px(x),
                py(lo),
                py(hi),
                color
            ));
        }
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, mean, ..)| format!("{},{}", px(x), py(mean)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        for &(x, mean, ..) in &s.points {
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                px(x),
                py(mean)
            ));
        }
        // legend
        let ly = MT + 10.0 + k as f64 * 18.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            W - MR + 10.0,
            W - MR + 34.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            W - MR + 40.0,
            ly + 4.0,
            s.name
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn heat_color(t: f64) -> String {
    // white -> deep blue ramp
    let t = t.clamp(0.0, 1.0);
    let r = (255.0 + (42.0 - 255.0) * t) as u8;
    let g = (255.0 + (111.0 - 255.0) * t) as u8;
    let b = (255.0 + (151.0 - 255.0) * t) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn render_sweep(csv: &Csv, path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let idx = require_columns(csv, &["system", "method", "sigma", "trial", "tpr"], path)?;
    // (system -> method -> sigma_bits -> tprs)
    let mut grouped: BTreeMap<String, BTreeMap<String, BTreeMap<u64, Vec<f64>>>> = BTreeMap::new();
    for row in &csv.rows {
        let sigma = parse_f64(&row[idx[2]])?;
        let tpr = parse_f64(&row[idx[4]])?;
        grouped
            .entry(row[idx[0]].clone())
            .or_default()
            .entry(row[idx[1]].clone())
            .or_default()
            .entry(sigma.to_bits())
            .or_default()
            .push(tpr);
    }
    let mut written = Vec::new();
    for (system, methods) in grouped {
        let series: Vec<LineSeries> = methods
            .into_iter()
            .map(|(method, by_sigma)| {
                let mut points: Vec<(f64, f64, f64, f64)> = by_sigma
                    .into_iter()
                    .map(|(bits, tprs)| {
                        let sigma = f64::from_bits(bits);
                        let mean = tprs.iter().sum::<f64>() / tprs.len() as f64;
                        let min = tprs.iter().cloned().fold(f64::INFINITY, f64::min);
                        let max = tprs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        (sigma, mean, min, max)
                    })
                    .collect();
                points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                LineSeries {
                    name: method,
                    points,
                }
            })
            .collect();
        let svg = line_chart(
            &format!("{system}: TPR vs observation noise"),
            "sigma",
            &series,
        );
        let file = out_dir.join(format!("sweep_{system}.svg"));
        std::fs::write(&file, svg)?;
        written.push(file);
    }
    Ok(written)
}

fn render_rbf_grid(csv: &Csv, path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let idx = require_columns(csv, &["gamma_mult", "landmarks", "mean_tpr"], path)?;
    let mut gammas: Vec<f64> = Vec::new();
    let mut landmark_counts: Vec<usize> = Vec::new();
    let mut cells: Vec<(f64, usize, f64)> = Vec::new();
    for row in &csv.rows {
        let g = parse_f64(&row[idx[0]])?;
        let l = parse_f64(&row[idx[1]])? as usize;
        let v = parse_f64(&row[idx[2]])?;
        if !gammas.contains(&g) {
            gammas.push(g);
        }
        if !landmark_counts.contains(&l) {
            landmark_counts.push(l);
        }
        cells.push((g, l, v));
    }
    gammas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    landmark_counts.sort();

    let cell_w = 90.0;
    let cell_h = 56.0;
    let ox = 110.0;
    let oy = 60.0;
    let width = ox + cell_w * landmark_counts.len() as f64 + 30.0;
    let height = oy + cell_h * gammas.len() as f64 + 60.0;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"26\" text-anchor=\"middle\" font-size=\"15\">RBF grid: mean TPR</text>\n",
        width / 2.0
    ));
    for (gi, g) in gammas.iter().enumerate() {
        for (li, l) in landmark_counts.iter().enumerate() {
            let value = cells
                .iter()
                .find(|(cg, cl, _)| cg == g && cl == l)
                .map(|(_, _, v)| *v)
                .unwrap_or(f64::NAN);
            let x = ox + li as f64 * cell_w;
            let y = oy + gi as f64 * cell_h;
            svg.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell_w}\" height=\"{cell_h}\" \
                 fill=\"{}\" stroke=\"#888888\"/>\n",
                heat_color(value)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{}\">{value:.2}</text>\n",
                x + cell_w / 2.0,
                y + cell_h / 2.0 + 4.0,
                if value > 0.6 { "#ffffff" } else { "#000000" }
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{g} x gamma_med</text>\n",
            ox - 8.0,
            oy + gi as f64 * cell_h + cell_h / 2.0 + 4.0
        ));
    }
    for (li, l) in landmark_counts.iter().enumerate() {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{l} landmarks</text>\n",
            ox + li as f64 * cell_w + cell_w / 2.0,
            oy + gammas.len() as f64 * cell_h + 20.0
        ));
    }
    svg.push_str("</svg>\n");
    let file = out_dir.join("rbf_grid.svg");
    std::fs::write(&file, svg)?;
    Ok(vec![file])
}

fn render_hw(csv: &Csv, path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let idx = require_columns(csv, &["p", "method", "trial", "tpr"], path)?;
    let mut grouped: BTreeMap<String, BTreeMap<u64, Vec<f64>>> = BTreeMap::new();
    for row in &csv.rows {
        let p = parse_f64(&row[idx[0]])?;
        let tpr = parse_f64(&row[idx[3]])?;
        grouped
            .entry(row[idx[1]].clone())
            .or_default()
            .entry(p.to_bits())
            .or_default()
            .push(tpr);
    }
    let series: Vec<LineSeries> = grouped
        .into_iter()
        .map(|(method, by_p)| {
            let mut points: Vec<(f64, f64, f64, f64)> = by_p
                .into_iter()
                .map(|(bits, tprs)| {
                    let p = f64::from_bits(bits);
                    let mean = tprs.iter().sum::<f64>() / tprs.len() as f64;
                    let min = tprs.iter().cloned().fold(f64::INFINITY, f64::min);
                    let max = tprs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    (p, mean, min, max)
                })
                .collect();
            points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            LineSeries {
                name: method,
                points,
            }
        })
        .collect();
    let svg = line_chart("TPR vs depolarizing strength", "p per gate", &series);
    let file = out_dir.join("hw_noise.svg");
    std::fs::write(&file, svg)?;
    Ok(vec![file])
}

/// Renders the named CSV into one or more SVG files under `out_dir`.
pub fn render_plot(csv_path: &Path, kind: PlotKind, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let csv = read_csv(csv_path)?;
    std::fs::create_dir_all(out_dir)?;
    match kind {
        PlotKind::Sweep => render_sweep(&csv, csv_path, out_dir),
        PlotKind::RbfGrid => render_rbf_grid(&csv, csv_path, out_dir),
        PlotKind::HwNoise => render_hw(&csv, csv_path, out_dir),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_csv_is_a_schema_error() {
        let dir = std::env::temp_dir().join("qsindy_plot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.csv");
        std::fs::write(&path, "system,method,sigma,trial,tpr\n").unwrap();
        let err = render_plot(&path, PlotKind::Sweep, &dir).unwrap_err();
        assert!(matches!(err, Error::SchemaMismatch(_)));
    }

    #[test]
    fn wrong_header_is_a_schema_error() {
        let dir = std::env::temp_dir().join("qsindy_plot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("wrong.csv");
        std::fs::write(&path, "a,b,c\n1,2,3\n").unwrap();
        let err = render_plot(&path, PlotKind::RbfGrid, &dir).unwrap_err();
        assert!(matches!(err, Error::SchemaMismatch(_)));
    }

    #[test]
    fn sweep_csv_renders_one_svg_per_system() {
        let dir = std::env::temp_dir().join("qsindy_plot_render");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sweep.csv");
        let mut text =
            String::from("system,method,feature_map,sigma,trial,seed,tpr,r2_q,frac_var_in_p\n");
        for system in ["duffing", "lorenz"] {
            for method in ["vanilla", "orth_q"] {
                for (sigma, tpr) in [(0.0, 1.0), (0.1, 0.75)] {
                    text.push_str(&format!("{system},{method},zz2,{sigma},0,1,{tpr},,\n"));
                }
            }
        }
        std::fs::write(&path, text).unwrap();
        let files = render_plot(&path, PlotKind::Sweep, &dir).unwrap();
        assert_eq!(files.len(), 2);
        for f in files {
            let body = std::fs::read_to_string(f).unwrap();
            assert!(body.starts_with("<svg"));
            assert!(body.contains("polyline"));
        }
    }
}
