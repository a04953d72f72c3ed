//! Atomic file output and the tiny in-process SVG plotter.

use bvbounds::{Error, Result};
use std::path::{Path, PathBuf};

/// Write via a temp file in the same directory, then rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("creating {}: {}", dir.display(), e)))?;
    }
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    std::fs::write(&tmp, contents)
        .map_err(|e| Error::Config(format!("writing {}: {}", tmp.display(), e)))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| Error::Config(format!("renaming to {}: {}", path.display(), e)))?;
    Ok(())
}

/// A single-file SVG line chart; each series is a named polyline.
pub fn svg_line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
    log_y: bool,
) -> String {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.1.iter().copied())
        .map(|(x, y)| (x, if log_y { y.max(1e-300).log10() } else { y }))
        .collect();
    if pts.is_empty() {
        return format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\"/>");
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if (x1 - x0).abs() < 1e-300 {
        x1 = x0 + 1.0;
    }
    if (y1 - y0).abs() < 1e-300 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let mut body = String::new();
    body.push_str(&format!(
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>",
        w - ml - mr,
        h - mt - mb
    ));
    for (i, (name, data)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let path: Vec<String> = data
            .iter()
            .map(|(x, y)| {
                let yy = if log_y { y.max(1e-300).log10() } else { *y };
                format!("{:.2},{:.2}", sx(*x), sy(yy))
            })
            .collect();
        body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" points=\"{}\"/>",
            color,
            path.join(" ")
        ));
        body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>",
            ml + 10.0,
            mt + 16.0 + 16.0 * i as f64,
            color,
            name
        ));
    }
    let ylab = if log_y {
        format!("log10 {}", y_label)
    } else {
        y_label.to_string()
    };
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\
         <text x=\"{}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">{}</text>\
         <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\
         <text x=\"16\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>\
         {}\
         <text x=\"{ml}\" y=\"{}\" font-size=\"10\">{:.3}</text>\
         <text x=\"{}\" y=\"{}\" font-size=\"10\">{:.3}</text>\
         </svg>",
        w / 2.0,
        title,
        w / 2.0,
        h - 12.0,
        x_label,
        h / 2.0,
        h / 2.0,
        ylab,
        body,
        h - mb + 14.0,
        x0,
        w - mr - 40.0,
        h - mb + 14.0,
        x1,
    )
}
