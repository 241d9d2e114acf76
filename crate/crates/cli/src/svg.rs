//! Minimal native SVG emission: fixed 800x500 viewport, deterministic
//! output bytes for identical input.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn header(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" ",
            "viewBox=\"0 0 800 500\">\n",
            "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n",
            "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" ",
            "font-size=\"16\">{}</text>\n"
        ),
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_B - (v - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str) {
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            fmt(MARGIN_L),
            fmt(HEIGHT - MARGIN_B),
            fmt(WIDTH - MARGIN_R),
            fmt(HEIGHT - MARGIN_B)
        ));
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            fmt(MARGIN_L),
            fmt(MARGIN_T),
            fmt(MARGIN_L),
            fmt(HEIGHT - MARGIN_B)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">{}</text>\n",
            fmt(0.5 * (MARGIN_L + WIDTH - MARGIN_R)),
            fmt(HEIGHT - 12.0),
            escape(x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" transform=\"rotate(-90 18 {})\">{}</text>\n",
            fmt(0.5 * (MARGIN_T + HEIGHT - MARGIN_B)),
            fmt(0.5 * (MARGIN_T + HEIGHT - MARGIN_B)),
            escape(y_label)
        ));
    }

    fn tick_x(&self, out: &mut String, v: f64, label: &str) {
        let x = self.x(v);
        out.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"black\"/>\n<text x=\"{x}\" y=\"{yt}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">{label}</text>\n",
            x = fmt(x),
            y0 = fmt(HEIGHT - MARGIN_B),
            y1 = fmt(HEIGHT - MARGIN_B + 5.0),
            yt = fmt(HEIGHT - MARGIN_B + 20.0),
            label = escape(label)
        ));
    }

    fn tick_y(&self, out: &mut String, v: f64, label: &str) {
        let y = self.y(v);
        out.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"black\"/>\n<text x=\"{xt}\" y=\"{yt}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">{label}</text>\n",
            x0 = fmt(MARGIN_L - 5.0),
            x1 = fmt(MARGIN_L),
            y = fmt(y),
            xt = fmt(MARGIN_L - 8.0),
            yt = fmt(y + 4.0),
            label = escape(label)
        ));
    }
}

/// Overlaid step histograms of one or more value series, equal-width bins
/// over the common range.
pub fn histogram_svg(title: &str, series: &[(String, Vec<f64>)]) -> Result<String, String> {
    if series.is_empty() || series.iter().any(|(_, v)| v.is_empty()) {
        return Err("empty series".into());
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, vals) in series {
        for &v in vals {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !(hi > lo) {
        hi = lo + 1.0;
    }
    let bins = 60usize;
    let step = (hi - lo) / bins as f64;
    let mut hists: Vec<Vec<f64>> = Vec::new();
    let mut peak = 0.0f64;
    for (_, vals) in series {
        let mut h = vec![0.0; bins];
        for &v in vals {
            let k = (((v - lo) / step) as usize).min(bins - 1);
            h[k] += 1.0 / vals.len() as f64;
        }
        for &c in &h {
            peak = peak.max(c);
        }
        hists.push(h);
    }

    let frame = Frame { x_lo: lo, x_hi: hi, y_lo: 0.0, y_hi: peak * 1.05 };
    let mut out = header(title);
    frame.axes(&mut out, "value", "frequency");
    for k in 0..5 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        frame.tick_x(&mut out, v, &format!("{v:.3}"));
    }
    for k in 1..5 {
        let v = peak * 1.05 * k as f64 / 4.0;
        frame.tick_y(&mut out, v, &format!("{v:.3}"));
    }
    for (si, h) in hists.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut path = String::new();
        path.push_str(&format!("M{} {}", fmt(frame.x(lo)), fmt(frame.y(0.0))));
        for (k, &c) in h.iter().enumerate() {
            let x0 = frame.x(lo + step * k as f64);
            let x1 = frame.x(lo + step * (k + 1) as f64);
            let y = frame.y(c);
            path.push_str(&format!(" L{} {} L{} {}", fmt(x0), fmt(y), fmt(x1), fmt(y)));
        }
        path.push_str(&format!(" L{} {}", fmt(frame.x(hi)), fmt(frame.y(0.0))));
        out.push_str(&format!(
            "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            fmt(WIDTH - MARGIN_R - 180.0),
            fmt(MARGIN_T + 16.0 * (si as f64 + 1.0)),
            escape(&series[si].0)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Log-log scatter with markers, for delta sweeps.
pub fn loglog_svg(
    title: &str,
    points: &[(f64, f64)],
    x_label: &str,
    y_label: &str,
) -> Result<String, String> {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|&(x, y)| x > 0.0 && y > 0.0).collect();
    if pts.is_empty() {
        return Err("empty series".into());
    }
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x_lo = x_lo.min(x.log10());
        x_hi = x_hi.max(x.log10());
        y_lo = y_lo.min(y.log10());
        y_hi = y_hi.max(y.log10());
    }
    if !(x_hi > x_lo) {
        x_hi = x_lo + 1.0;
    }
    if !(y_hi > y_lo) {
        y_hi = y_lo + 1.0;
    }
    let frame = Frame {
        x_lo: x_lo - 0.1,
        x_hi: x_hi + 0.1,
        y_lo: y_lo - 0.1,
        y_hi: y_hi + 0.1,
    };
    let mut out = header(title);
    frame.axes(&mut out, x_label, y_label);
    for k in (x_lo.floor() as i64)..=(x_hi.ceil() as i64) {
        let v = k as f64;
        if v >= frame.x_lo && v <= frame.x_hi {
            frame.tick_x(&mut out, v, &format!("1e{k}"));
        }
    }
    for k in (y_lo.floor() as i64)..=(y_hi.ceil() as i64) {
        let v = k as f64;
        if v >= frame.y_lo && v <= frame.y_hi {
            frame.tick_y(&mut out, v, &format!("1e{k}"));
        }
    }
    let mut poly = String::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        let (px, py) = (frame.x(x.log10()), frame.y(y.log10()));
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\"/>\n",
            fmt(px),
            fmt(py),
            PALETTE[0]
        ));
        poly.push_str(&format!("{}{},{}", if i == 0 { "" } else { " " }, fmt(px), fmt(py)));
    }
    out.push_str(&format!(
        "<polyline points=\"{poly}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n",
        PALETTE[0]
    ));
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_is_an_error() {
        assert!(histogram_svg("t", &[]).is_err());
        assert!(histogram_svg("t", &[("a".into(), vec![])]).is_err());
        assert!(loglog_svg("t", &[], "x", "y").is_err());
    }

    #[test]
    fn sweep_svg_has_marker_per_point() {
        let pts: Vec<(f64, f64)> = (1..=10).map(|k| (k as f64 * 1e-3, (k as f64).sqrt() * 1e-2)).collect();
        let svg = loglog_svg("sweep", &pts, "delta", "tv").unwrap();
        assert_eq!(svg.matches("<circle").count(), 10);
        assert!(svg.contains("viewBox=\"0 0 800 500\""));
    }

    #[test]
    fn identical_input_identical_bytes() {
        let series = vec![("pf".to_string(), vec![0.0, 0.5, 1.0, 1.5, 0.25])];
        let a = histogram_svg("h", &series).unwrap();
        let b = histogram_svg("h", &series).unwrap();
        assert_eq!(a, b);
    }
}
