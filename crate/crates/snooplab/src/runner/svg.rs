//! Best-effort static SVG line charts. The CSV files are the contract;
//! these exist so a run can be eyeballed without spinning up a notebook.

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 240.0;
const MARGIN_L: f64 = 52.0;
const MARGIN_R: f64 = 14.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 40.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Dashed horizontal reference lines, e.g. a theoretical lower bound.
    pub h_lines: Vec<(f64, String)>,
    /// Log-scale x axis (used when the x values span decades).
    pub log_x: bool,
}

impl Panel {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            h_lines: Vec::new(),
            log_x: false,
        }
    }
}

fn bounds(panel: &Panel) -> (f64, f64, f64, f64) {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in &panel.series {
        for &(x, y) in &s.points {
            let x = if panel.log_x { x.log10() } else { x };
            if x.is_finite() {
                x_min = x_min.min(x);
                x_max = x_max.max(x);
            }
            if y.is_finite() {
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
    }
    for &(y, _) in &panel.h_lines {
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if !x_min.is_finite() {
        (x_min, x_max) = (0.0, 1.0);
    }
    if !y_min.is_finite() {
        (y_min, y_max) = (0.0, 1.0);
    }
    if x_max - x_min < 1e-12 {
        x_max = x_min + 1.0;
    }
    let pad = 0.06 * (y_max - y_min).max(1e-12);
    (x_min, x_max, y_min - pad, y_max + pad)
}

fn render_panel(svg: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let (x_min, x_max, y_min, y_max) = bounds(panel);
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let to_px = |x: f64, y: f64| {
        let x = if panel.log_x { x.log10() } else { x };
        (
            ox + MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w,
            oy + MARGIN_T + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h,
        )
    };

    svg.push_str(&format!(
        "<rect x='{:.1}' y='{:.1}' width='{plot_w:.1}' height='{plot_h:.1}' fill='none' stroke='#444'/>\n",
        ox + MARGIN_L,
        oy + MARGIN_T
    ));
    svg.push_str(&format!(
        "<text x='{:.1}' y='{:.1}' font-size='12' text-anchor='middle' font-family='sans-serif'>{}</text>\n",
        ox + MARGIN_L + plot_w / 2.0,
        oy + 16.0,
        panel.title
    ));
    svg.push_str(&format!(
        "<text x='{:.1}' y='{:.1}' font-size='10' text-anchor='middle' font-family='sans-serif'>{}</text>\n",
        ox + MARGIN_L + plot_w / 2.0,
        oy + PANEL_H - 8.0,
        panel.x_label
    ));
    svg.push_str(&format!(
        "<text x='{:.1}' y='{:.1}' font-size='10' text-anchor='middle' font-family='sans-serif' transform='rotate(-90 {:.1} {:.1})'>{}</text>\n",
        ox + 14.0,
        oy + MARGIN_T + plot_h / 2.0,
        ox + 14.0,
        oy + MARGIN_T + plot_h / 2.0,
        panel.y_label
    ));

    // Corner tick labels.
    let fmt = |v: f64| {
        if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 10000.0) {
            format!("{v:.3}")
        } else {
            format!("{v:.2e}")
        }
    };
    let x_lo = if panel.log_x { 10f64.powf(x_min) } else { x_min };
    let x_hi = if panel.log_x { 10f64.powf(x_max) } else { x_max };
    svg.push_str(&format!(
        "<text x='{:.1}' y='{:.1}' font-size='9' text-anchor='start' font-family='sans-serif'>{}</text>\n",
        ox + MARGIN_L,
        oy + MARGIN_T + plot_h + 12.0,
        fmt(x_lo)
    ));
    svg.push_str(&format!(
        "<text x='{:.1}' y='{:.1}' font-size='9' text-anchor='end' font-family='sans-serif'>{}</text>\n",
        ox + MARGIN_L + plot_w,
        oy + MARGIN_T + plot_h + 12.0,
        fmt(x_hi)
    ));
    svg.push_str(&format!(
        "<text x='{:.1}' y='{:.1}' font-size='9' text-anchor='end' font-family='sans-serif'>{}</text>\n",
        ox + MARGIN_L - 4.0,
        oy + MARGIN_T + plot_h,
        fmt(y_min)
    ));
    svg.push_str(&format!(
        "<text x='{:.1}' y='{:.1}' font-size='9' text-anchor='end' font-family='sans-serif'>{}</text>\n",
        ox + MARGIN_L - 4.0,
        oy + MARGIN_T + 8.0,
        fmt(y_max)
    ));

    for (y, label) in &panel.h_lines {
        let (x0, py) = to_px(x_lo, *y);
        let (x1, _) = to_px(x_hi, *y);
        svg.push_str(&format!(
            "<line x1='{x0:.1}' y1='{py:.1}' x2='{x1:.1}' y2='{py:.1}' stroke='#999' stroke-dasharray='5,4'/>\n"
        ));
        svg.push_str(&format!(
            "<text x='{:.1}' y='{:.1}' font-size='9' fill='#777' text-anchor='start' font-family='sans-serif'>{label}</text>\n",
            x0 + 2.0,
            py - 3.0
        ));
    }

    for (si, series) in panel.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let path: Vec<String> = series
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| {
                let (px, py) = to_px(x, y);
                format!("{px:.1},{py:.1}")
            })
            .collect();
        if path.len() > 1 {
            svg.push_str(&format!(
                "<polyline points='{}' fill='none' stroke='{color}' stroke-width='1.5'/>\n",
                path.join(" ")
            ));
        }
        for p in &path {
            let mut it = p.split(',');
            let (px, py) = (it.next().unwrap(), it.next().unwrap());
            svg.push_str(&format!(
                "<circle cx='{px}' cy='{py}' r='2.2' fill='{color}'/>\n"
            ));
        }
        // Legend swatch.
        let lx = ox + MARGIN_L + 6.0;
        let ly = oy + MARGIN_T + 12.0 + 12.0 * si as f64;
        svg.push_str(&format!(
            "<rect x='{lx:.1}' y='{:.1}' width='10' height='3' fill='{color}'/>\n",
            ly - 3.0
        ));
        svg.push_str(&format!(
            "<text x='{:.1}' y='{ly:.1}' font-size='9' font-family='sans-serif'>{}</text>\n",
            lx + 14.0,
            series.label
        ));
    }
}

/// Lays the panels out in a grid `cols` wide and returns the SVG document.
pub fn render_panels(panels: &[Panel], cols: usize) -> String {
    let cols = cols.max(1);
    let rows = panels.len().div_ceil(cols);
    let width = PANEL_W * cols.min(panels.len().max(1)) as f64;
    let height = PANEL_H * rows as f64;
    let mut svg = format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{width:.0}' height='{height:.0}' viewBox='0 0 {width:.0} {height:.0}'>\n<rect width='100%' height='100%' fill='white'/>\n"
    );
    for (i, panel) in panels.iter().enumerate() {
        let ox = (i % cols) as f64 * PANEL_W;
        let oy = (i / cols) as f64 * PANEL_H;
        render_panel(&mut svg, panel, ox, oy);
    }
    svg.push_str("</svg>\n");
    svg
}
