//! Static SVG renderings: confusion-matrix heatmaps, ROC curve, training curves.

use std::fmt::Write as _;

use ids_core::metrics::{ConfusionMatrix, RocCurve};
use ids_core::nn::TrainReport;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = write!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">
<rect width="{w}" height="{h}" fill="white"/>
"#
    );
}

fn text(out: &mut String, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{x:.1}" y="{y:.1}" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
        escape(s)
    );
}

/// Heatmap shaded by row-normalised counts (recall per true class), cells
/// labelled with raw counts.
pub fn confusion_svg(cm: &ConfusionMatrix, title: &str) -> String {
    let k = cm.n_classes();
    let cell = if k <= 2 { 110.0 } else { 72.0 };
    let (left, top) = (110.0, 70.0);
    let w = left + cell * k as f64 + 30.0;
    let h = top + cell * k as f64 + 70.0;
    let mut out = String::new();
    header(&mut out, w, h);
    text(&mut out, w / 2.0, 28.0, 16.0, "middle", title);
    for (i, row) in cm.counts.iter().enumerate() {
        let support: u64 = row.iter().sum();
        for (j, &c) in row.iter().enumerate() {
            let frac = if support == 0 { 0.0 } else { c as f64 / support as f64 };
            // white → dark blue
            let shade = |lo: f64, hi: f64| (lo + (hi - lo) * frac).round() as u8;
            let (r, g, b) = (shade(247.0, 8.0), shade(251.0, 48.0), shade(255.0, 107.0));
            let (x, y) = (left + cell * j as f64, top + cell * i as f64);
            let _ = writeln!(
                out,
                r##"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="#{r:02x}{g:02x}{b:02x}" stroke="#888"/>"##
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle" fill="{}">{c}</text>"#,
                x + cell / 2.0,
                y + cell / 2.0 + 5.0,
                if frac > 0.5 { "white" } else { "black" }
            );
        }
        text(&mut out, left - 8.0, top + cell * (i as f64 + 0.5) + 5.0, 12.0, "end", &cm.class_names[i]);
    }
    for (j, name) in cm.class_names.iter().enumerate() {
        text(&mut out, left + cell * (j as f64 + 0.5), top - 8.0, 12.0, "middle", name);
    }
    text(&mut out, left + cell * k as f64 / 2.0, h - 20.0, 13.0, "middle", "Predicted class (rows: true class)");
    out.push_str("</svg>\n");
    out
}

fn axes(out: &mut String, x0: f64, y0: f64, size: f64, xlabel: &str, ylabel: &str, ymax: f64) {
    let _ = writeln!(out, r##"<rect x="{x0}" y="{}" width="{size}" height="{size}" fill="none" stroke="#333"/>"##, y0 - size);
    for t in 0..=5 {
        let f = t as f64 / 5.0;
        let x = x0 + f * size;
        let y = y0 - f * size;
        let _ = writeln!(out, r##"<line x1="{x:.1}" y1="{y0}" x2="{x:.1}" y2="{:.1}" stroke="#333"/>"##, y0 + 5.0);
        let _ = writeln!(out, r##"<line x1="{:.1}" y1="{y:.1}" x2="{x0}" y2="{y:.1}" stroke="#333"/>"##, x0 - 5.0);
        text(out, x0 - 8.0, y + 4.0, 11.0, "end", &format!("{:.2}", f * ymax));
    }
    text(out, x0 + size / 2.0, y0 + 40.0, 13.0, "middle", xlabel);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        x0 - 50.0,
        y0 - size / 2.0,
        x0 - 50.0,
        y0 - size / 2.0,
        escape(ylabel)
    );
}

pub fn roc_svg(roc: &RocCurve, title: &str) -> String {
    let (x0, y0, size) = (80.0, 370.0, 300.0);
    let mut out = String::new();
    header(&mut out, 420.0, 430.0);
    text(&mut out, 230.0, 30.0, 16.0, "middle", title);
    axes(&mut out, x0, y0, size, "False positive rate", "True positive rate", 1.0);
    for t in 0..=5 {
        let f = t as f64 / 5.0;
        text(&mut out, x0 + f * size, y0 + 20.0, 11.0, "middle", &format!("{f:.1}"));
    }
    let _ = writeln!(
        out,
        r##"<line x1="{x0}" y1="{y0}" x2="{}" y2="{}" stroke="#999" stroke-dasharray="5,4"/>"##,
        x0 + size,
        y0 - size
    );
    let pts: Vec<String> = roc
        .points
        .iter()
        .map(|p| format!("{:.2},{:.2}", x0 + p.fpr * size, y0 - p.tpr * size))
        .collect();
    let _ = writeln!(out, r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="2"/>"##, pts.join(" "));
    text(&mut out, x0 + size - 10.0, y0 - 15.0, 13.0, "end", &format!("AUC = {:.4}", roc.auc));
    out.push_str("</svg>\n");
    out
}

/// Train and validation loss per epoch.
pub fn curves_svg(report: &TrainReport, title: &str) -> String {
    let (x0, y0, size) = (80.0, 370.0, 300.0);
    let mut out = String::new();
    header(&mut out, 420.0, 430.0);
    text(&mut out, 230.0, 30.0, 16.0, "middle", title);
    let ymax = report
        .epochs
        .iter()
        .flat_map(|e| [e.train_loss, e.val_loss])
        .filter(|v| v.is_finite())
        .fold(1e-12, f64::max);
    axes(&mut out, x0, y0, size, "Epoch", "Loss", ymax);
    let n = report.epochs.len().max(2) as f64;
    let x_of = |epoch: usize| x0 + (epoch as f64 - 1.0) / (n - 1.0) * size;
    for e in [1, report.epochs.len()] {
        text(&mut out, x_of(e), y0 + 20.0, 11.0, "middle", &e.to_string());
    }
    for (colour, pick) in [("#2c7fb8", 0usize), ("#d95f0e", 1)] {
        let pts: Vec<String> = report
            .epochs
            .iter()
            .map(|e| {
                let v = if pick == 0 { e.train_loss } else { e.val_loss };
                format!("{:.2},{:.2}", x_of(e.epoch), y0 - v / ymax * size)
            })
            .collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#, pts.join(" "));
    }
    text(&mut out, x0 + size - 10.0, y0 - size + 20.0, 12.0, "end", "train (blue), validation (orange)");
    let _ = writeln!(
        out,
        r##"<line x1="{0:.1}" y1="{1}" x2="{0:.1}" y2="{2}" stroke="#555" stroke-dasharray="3,3"/>"##,
        x_of(report.best_epoch.max(1)),
        y0,
        y0 - size
    );
    out.push_str("</svg>\n");
    out
}
