//! Deterministic SVG rendering for run artifacts.
//!
//! Fixed canvas sizes, a fixed palette keyed by class index and fixed-width
//! number formatting: the same inputs always produce byte-identical files.

use crate::classifier::FixedClassifier;
use crate::geometry::{adjacency, bisector, GeometryError};

/// Palette keyed by `class % 12`.
const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

const SCATTER_SIZE: f64 = 640.0;
const CHART_W: f64 = 720.0;
const CHART_H: f64 = 480.0;
const CHART_MARGIN: f64 = 60.0;

pub fn class_color(class: usize) -> &'static str {
    PALETTE[class % PALETTE.len()]
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// 2-D feature scatter with the classifier's weight rays; optionally the
/// adjacent-pair bisector lines (the decision boundaries).
///
/// Real-class rays are colored by class, virtual rays drawn gray. Errors
/// when the embedding dimension is not 2.
pub fn feature_scatter(
    classifier: &FixedClassifier,
    features: &[Vec<f64>],
    labels: &[usize],
    draw_bisectors: bool,
) -> Result<String, GeometryError> {
    if classifier.dim() != 2 {
        return Err(GeometryError::InvalidArgument(format!(
            "feature scatter needs a 2-d embedding, got {}",
            classifier.dim()
        )));
    }
    let half = SCATTER_SIZE / 2.0;
    let extent = features
        .iter()
        .flat_map(|f| f.iter().map(|x| x.abs()))
        .fold(1.0_f64, f64::max);
    let scale = (half - 40.0) / extent;
    let px = |x: f64| half + x * scale;
    let py = |y: f64| half - y * scale;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        SCATTER_SIZE
    ));
    s.push_str(&format!(
        "  <rect width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n",
        SCATTER_SIZE
    ));
    // Light axes through the origin.
    s.push_str(&format!(
        "  <line class=\"axis\" x1=\"0\" y1=\"{h}\" x2=\"{w}\" y2=\"{h}\" stroke=\"#dddddd\"/>\n",
        h = fmt(half),
        w = fmt(SCATTER_SIZE)
    ));
    s.push_str(&format!(
        "  <line class=\"axis\" x1=\"{h}\" y1=\"0\" x2=\"{h}\" y2=\"{w}\" stroke=\"#dddddd\"/>\n",
        h = fmt(half),
        w = fmt(SCATTER_SIZE)
    ));

    if draw_bisectors {
        let graph = adjacency(classifier.weights())?;
        let ray = half - 20.0;
        for (i, j) in graph.edges() {
            let b = bisector(classifier.weights(), i, j)?;
            s.push_str(&format!(
                "  <line class=\"bisector\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
                 stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n",
                fmt(half - b[0] * ray),
                fmt(half + b[1] * ray),
                fmt(half + b[0] * ray),
                fmt(half - b[1] * ray),
            ));
        }
    }

    // Weight rays: colored for assigned vertices, gray for virtual ones.
    let mut vertex_class = vec![None; classifier.k_total()];
    for (class, &v) in classifier.assignment().iter().enumerate() {
        vertex_class[v] = Some(class);
    }
    let ray = half - 30.0;
    for (v, w) in classifier.weights().rows().iter().enumerate() {
        let (color, dash) = match vertex_class[v] {
            Some(class) => (class_color(class), ""),
            None => ("#bbbbbb", " stroke-dasharray=\"6 3\""),
        };
        s.push_str(&format!(
            "  <line class=\"weight-ray\" x1=\"{h}\" y1=\"{h}\" x2=\"{}\" y2=\"{}\" \
             stroke=\"{color}\" stroke-width=\"2\"{dash}/>\n",
            fmt(half + w[0] * ray),
            fmt(half - w[1] * ray),
            h = fmt(half),
        ));
    }

    for (f, &y) in features.iter().zip(labels) {
        s.push_str(&format!(
            "  <circle class=\"pt\" cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
            fmt(px(f[0])),
            fmt(py(f[1])),
            class_color(y)
        ));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// One named line in a chart.
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
}

/// Simple line chart with axis labels and a legend.
pub fn line_chart(series: &[Series], x_label: &str, y_label: &str, title: &str) -> String {
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() {
        (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
    }
    if (x_max - x_min).abs() < 1e-12 {
        x_max = x_min + 1.0;
    }
    if (y_max - y_min).abs() < 1e-12 {
        y_max = y_min + 1.0;
    }
    let plot_w = CHART_W - 2.0 * CHART_MARGIN;
    let plot_h = CHART_H - 2.0 * CHART_MARGIN;
    let px = |x: f64| CHART_MARGIN + (x - x_min) / (x_max - x_min) * plot_w;
    let py = |y: f64| CHART_H - CHART_MARGIN - (y - y_min) / (y_max - y_min) * plot_h;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CHART_W}\" height=\"{CHART_H}\" viewBox=\"0 0 {CHART_W} {CHART_H}\">\n"
    ));
    s.push_str(&format!(
        "  <rect width=\"{CHART_W}\" height=\"{CHART_H}\" fill=\"white\"/>\n"
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n",
        fmt(CHART_W / 2.0)
    ));
    // Axes.
    s.push_str(&format!(
        "  <line class=\"axis\" x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = fmt(CHART_MARGIN),
        b = fmt(CHART_H - CHART_MARGIN),
        r = fmt(CHART_W - CHART_MARGIN)
    ));
    s.push_str(&format!(
        "  <line class=\"axis\" x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = fmt(CHART_MARGIN),
        t = fmt(CHART_MARGIN),
        b = fmt(CHART_H - CHART_MARGIN)
    ));
    // Axis extent labels.
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
        fmt(CHART_MARGIN),
        fmt(CHART_H - CHART_MARGIN + 16.0),
        fmt(x_min)
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
        fmt(CHART_W - CHART_MARGIN),
        fmt(CHART_H - CHART_MARGIN + 16.0),
        fmt(x_max)
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
        fmt(CHART_MARGIN - 6.0),
        fmt(CHART_H - CHART_MARGIN),
        fmt(y_min)
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
        fmt(CHART_MARGIN - 6.0),
        fmt(CHART_MARGIN + 4.0),
        fmt(y_max)
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{x_label}</text>\n",
        fmt(CHART_W / 2.0),
        fmt(CHART_H - 12.0)
    ));
    s.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        fmt(CHART_H / 2.0),
        fmt(CHART_H / 2.0)
    ));

    for (i, ser) in series.iter().enumerate() {
        if ser.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(px(x)), fmt(py(y))))
            .collect();
        s.push_str(&format!(
            "  <polyline class=\"series\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            ser.color,
            pts.join(" ")
        ));
        let ly = CHART_MARGIN + 14.0 * i as f64;
        s.push_str(&format!(
            "  <line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"{c}\" stroke-width=\"2\"/>\n",
            x0 = fmt(CHART_W - CHART_MARGIN - 110.0),
            x1 = fmt(CHART_W - CHART_MARGIN - 90.0),
            y = fmt(ly),
            c = ser.color
        ));
        s.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            fmt(CHART_W - CHART_MARGIN - 84.0),
            fmt(ly + 4.0),
            ser.name
        ));
    }
    s.push_str("</svg>\n");
    s
}
