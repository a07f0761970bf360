//! Minimal static SVG line charts: trajectory coordinates against time and
//! diagnostic scalars against time. No interactivity, no dependencies.

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Range {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-12 {
            let pad = lo.abs().max(1.0) * 0.05;
            return Range {
                lo: lo - pad,
                hi: hi + pad,
            };
        }
        let pad = 0.05 * (hi - lo);
        Range {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn clamp01(&self, v: f64) -> f64 {
        ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

/// One chart panel with axes, ticks, and a legend.
fn panel(out: &mut String, title: &str, series: &[Series], x0: f64, y0: f64, w: f64, h: f64) {
    let xr = Range::of(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yr = Range::of(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let left = x0 + 55.0;
    let bottom = y0 + h - 30.0;
    let top = y0 + 24.0;
    let right = x0 + w - 12.0;

    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" font-family=\"sans-serif\" font-weight=\"bold\">{}</text>\n",
        x0 + 8.0,
        y0 + 14.0,
        title
    ));
    out.push_str(&format!(
        "<rect x=\"{left}\" y=\"{top}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        right - left,
        bottom - top
    ));

    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = xr.lo + f * (xr.hi - xr.lo);
        let yv = yr.lo + f * (yr.hi - yr.lo);
        let px = left + f * (right - left);
        let py = bottom - f * (bottom - top);
        out.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{bottom}\" x2=\"{px}\" y2=\"{}\" stroke=\"#444\"/>\n",
            bottom + 4.0
        ));
        out.push_str(&format!(
            "<text x=\"{px}\" y=\"{}\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"middle\">{xv:.3}</text>\n",
            bottom + 16.0
        ));
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{left}\" y2=\"{py}\" stroke=\"#444\"/>\n",
            left - 4.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"end\">{yv:.3}</text>\n",
            left - 7.0,
            py + 3.0
        ));
    }

    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut path = String::new();
        for (i, (x, y)) in s.points.iter().enumerate() {
            let px = left + xr.clamp01(*x) * (right - left);
            let py = bottom - yr.clamp01(*y) * (bottom - top);
            path.push_str(if i == 0 { "M" } else { "L" });
            path.push_str(&format!("{px:.2},{py:.2} "));
        }
        out.push_str(&format!(
            "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\" fill=\"{color}\">{}</text>\n",
            right - 110.0,
            top + 14.0 + 13.0 * idx as f64,
            s.label
        ));
    }
}

/// Two stacked panels: state coordinates over time, diagnostics over time.
pub fn trajectory_chart(coords: &[Series], diagnostics: &[Series]) -> String {
    let w = 760.0;
    let panel_h = 300.0;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{}\" viewBox=\"0 0 {w} {}\">\n",
        2.0 * panel_h,
        2.0 * panel_h
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    panel(&mut out, "state coordinates vs t", coords, 0.0, 0.0, w, panel_h);
    panel(
        &mut out,
        "diagnostics vs t",
        diagnostics,
        0.0,
        panel_h,
        w,
        panel_h,
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_valid_svg_with_all_series() {
        let coords = vec![Series {
            label: "x_0".into(),
            points: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)],
        }];
        let diag = vec![Series {
            label: "E".into(),
            points: vec![(0.0, 2.0), (1.0, 1.0), (2.0, 0.9)],
        }];
        let svg = trajectory_chart(&coords, &diag);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("x_0") && svg.contains(">E<"));
    }

    #[test]
    fn constant_series_does_not_collapse_the_axis() {
        let s = vec![Series {
            label: "flat".into(),
            points: vec![(0.0, 3.0), (1.0, 3.0)],
        }];
        let svg = trajectory_chart(&s, &s);
        assert!(svg.contains("path"));
    }
}
