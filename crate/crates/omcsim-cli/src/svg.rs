//! Self-contained deterministic SVG plots: line series and occupation-colored
//! scatter. No external assets, no timestamps; identical input gives
//! byte-identical output.

/// Axis and canvas description.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
}

impl PlotSpec {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        PlotSpec {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            width: 860,
            height: 520,
        }
    }
}

/// One plotted series: a polyline, or a scatter with per-point colors when
/// `point_colors` is set (used for occupation-colored bands, where the RGB
/// channels are the waveguide/cavity/mechanical fractions).
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: String,
    pub point_colors: Option<Vec<(u8, u8, u8)>>,
}

impl Series {
    pub fn line(label: &str, color: &str, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.to_string(),
            points,
            color: color.to_string(),
            point_colors: None,
        }
    }

    /// Scatter colored by (f_waveguide, f_optical, f_mechanical) -> RGB.
    pub fn occupation_scatter(
        label: &str,
        points: Vec<(f64, f64)>,
        fractions: &[(f64, f64, f64)],
    ) -> Self {
        let colors = fractions
            .iter()
            .map(|&(r, g, b)| (to_channel(r), to_channel(g), to_channel(b)))
            .collect();
        Series {
            label: label.to_string(),
            points,
            color: "#000000".to_string(),
            point_colors: Some(colors),
        }
    }
}

fn to_channel(f: f64) -> u8 {
    (f.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn fmt_coord(x: f64) -> String {
    format!("{x:.2}")
}

fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.abs() >= 1e-3 && x.abs() < 1e4 {
        format!("{x:.4}")
    } else {
        format!("{x:.3e}")
    }
}

/// Render a line/scatter plot. Errors on an empty table.
pub fn line_plot(spec: &PlotSpec, series: &[Series]) -> Result<String, String> {
    let total: usize = series.iter().map(|s| s.points.len()).sum();
    if series.is_empty() || total == 0 {
        return Err("cannot plot an empty table".to_string());
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
    }
    if !x0.is_finite() || !y0.is_finite() {
        return Err("no finite points to plot".to_string());
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let (ml, mr, mt, mb) = (72.0, 16.0, 34.0, 52.0);
    let pw = spec.width as f64 - ml - mr;
    let ph = spec.height as f64 - mt - mb;
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n",
        w = spec.width,
        h = spec.height
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\">{}</text>\n",
        spec.width / 2,
        xml_escape(&spec.title)
    ));
    // axes
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        fmt_coord(ml),
        fmt_coord(mt),
        fmt_coord(pw),
        fmt_coord(ph)
    ));
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let px = sx(fx);
        out.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n",
            x = fmt_coord(px),
            y0 = fmt_coord(mt),
            y1 = fmt_coord(mt + ph)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt_coord(px),
            fmt_coord(mt + ph + 16.0),
            fmt_tick(fx)
        ));
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let py = sy(fy);
        out.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n",
            x0 = fmt_coord(ml),
            x1 = fmt_coord(ml + pw),
            y = fmt_coord(py)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            fmt_coord(ml - 6.0),
            fmt_coord(py + 4.0),
            fmt_tick(fy)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\">{}</text>\n",
        fmt_coord(ml + pw / 2.0),
        fmt_coord(mt + ph + 40.0),
        xml_escape(&spec.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        fmt_coord(mt + ph / 2.0),
        fmt_coord(mt + ph / 2.0),
        xml_escape(&spec.y_label)
    ));

    for (si, s) in series.iter().enumerate() {
        match &s.point_colors {
            None => {
                let mut path = String::new();
                for &(x, y) in &s.points {
                    if !x.is_finite() || !y.is_finite() {
                        continue;
                    }
                    if !path.is_empty() {
                        path.push(' ');
                    }
                    path.push_str(&format!("{},{}", fmt_coord(sx(x)), fmt_coord(sy(y))));
                }
                out.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                    s.color, path
                ));
            }
            Some(colors) => {
                for (&(x, y), &(r, g, b)) in s.points.iter().zip(colors) {
                    if !x.is_finite() || !y.is_finite() {
                        continue;
                    }
                    out.push_str(&format!(
                        "<circle cx=\"{}\" cy=\"{}\" r=\"1.8\" fill=\"rgb({r},{g},{b})\"/>\n",
                        fmt_coord(sx(x)),
                        fmt_coord(sy(y))
                    ));
                }
            }
        }
        // legend entry
        let ly = mt + 14.0 + 16.0 * si as f64;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" fill=\"{}\">{}</text>\n",
            fmt_coord(ml + 8.0),
            fmt_coord(ly),
            if s.point_colors.is_some() { "#000000" } else { s.color.as_str() },
            xml_escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_polyline_golden() {
        let spec = PlotSpec {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            width: 200,
            height: 100,
        };
        let svg = line_plot(
            &spec,
            &[Series::line("s", "#ff0000", vec![(0.0, 0.0), (1.0, 1.0)])],
        )
        .unwrap();
        // one polyline with exactly two vertices at the plot corners
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(
            line,
            "<polyline fill=\"none\" stroke=\"#ff0000\" stroke-width=\"1.5\" \
             points=\"72.00,48.00 184.00,34.00\"/>"
        );
    }

    #[test]
    fn identical_input_identical_bytes() {
        let spec = PlotSpec::new("a", "b", "c");
        let pts = vec![(0.0, 1.0), (0.5, -2.0), (2.0, 0.25)];
        let a = line_plot(&spec, &[Series::line("s", "#0000ff", pts.clone())]).unwrap();
        let b = line_plot(&spec, &[Series::line("s", "#0000ff", pts)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn occupation_color_mapping() {
        let s = Series::occupation_scatter(
            "bands",
            vec![(0.0, 0.0), (1.0, 1.0)],
            &[(1.0, 0.0, 0.0), (0.25, 0.5, 0.25)],
        );
        let colors = s.point_colors.unwrap();
        assert_eq!(colors[0], (255, 0, 0));
        assert_eq!(colors[1], (64, 128, 64));
    }

    #[test]
    fn empty_table_is_an_error() {
        let spec = PlotSpec::new("a", "b", "c");
        assert!(line_plot(&spec, &[]).is_err());
        assert!(line_plot(&spec, &[Series::line("s", "#000000", vec![])]).is_err());
    }
}
