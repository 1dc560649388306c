//! Self-contained SVG line chart for regret curves: one polyline per
//! policy, a legend, and auto-chosen ticks on a linear or log x-axis. No
//! styling or scripting dependencies, so the file renders anywhere.

use std::fmt::Write as _;

use uniband::montecarlo::RegretCurve;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn regret_svg(curves: &[RegretCurve], log_x: bool) -> String {
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y_hi = 0.0f64;
    for curve in curves {
        for pt in &curve.points {
            let x = pt.n as f64;
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_hi = y_hi.max(pt.mean_regret + pt.stderr);
        }
    }
    if !x_lo.is_finite() {
        x_lo = 1.0;
        x_hi = 10.0;
    }
    if x_lo == x_hi {
        x_hi = x_lo + 1.0;
    }
    if y_hi <= 0.0 {
        y_hi = 1.0;
    }
    y_hi *= 1.05;

    let x_pos = |n: f64| -> f64 {
        let (lo, hi, v) = if log_x {
            (x_lo.ln(), x_hi.ln(), n.ln())
        } else {
            (x_lo, x_hi, n)
        };
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) * (v - lo) / (hi - lo)
    };
    let y_pos = |y: f64| -> f64 {
        HEIGHT - MARGIN_BOTTOM - (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) * y / y_hi
    };

    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    );

    // gridlines and ticks
    for y in nice_ticks(0.0, y_hi, 5) {
        let py = y_pos(y);
        let _ = write!(
            s,
            "<line x1=\"{MARGIN_LEFT}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"#ddd\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            WIDTH - MARGIN_RIGHT,
            MARGIN_LEFT - 6.0,
            py + 4.0,
            fmt_tick(y)
        );
    }
    let x_ticks = if log_x {
        log_ticks(x_lo, x_hi)
    } else {
        nice_ticks(x_lo, x_hi, 6)
    };
    for x in x_ticks {
        let px = x_pos(x);
        let _ = write!(
            s,
            "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#ddd\"/>\n\
             <text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_TOP,
            HEIGHT - MARGIN_BOTTOM,
            HEIGHT - MARGIN_BOTTOM + 16.0,
            fmt_tick(x)
        );
    }

    // axes
    let _ = write!(
        s,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{MARGIN_LEFT}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_BOTTOM,
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM
    );
    let _ = write!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">n</text>\n\
         <text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">mean pseudo-regret</text>\n",
        MARGIN_LEFT + 0.5 * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT),
        HEIGHT - 12.0,
        MARGIN_TOP + 0.5 * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM),
        MARGIN_TOP + 0.5 * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    );

    // curves
    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for pt in &curve.points {
            let _ = write!(
                path,
                "{:.1},{:.1} ",
                x_pos(pt.n as f64),
                y_pos(pt.mean_regret)
            );
        }
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.trim_end()
        );
    }

    // legend
    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let ly = MARGIN_TOP + 16.0 + 18.0 * i as f64;
        let _ = write!(
            s,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            MARGIN_LEFT + 12.0,
            MARGIN_LEFT + 40.0,
            MARGIN_LEFT + 46.0,
            ly + 4.0,
            curve.policy.kind().name()
        );
    }

    s.push_str("</svg>\n");
    s
}

/// Up to `target` round ticks (1/2/5 times a power of ten) covering
/// [lo, hi].
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let range = hi - lo;
    let raw = range / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| range / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let mut ticks = Vec::new();
    let mut v = (lo / step).ceil() * step;
    while v <= hi + 1e-9 * step {
        ticks.push(v);
        v += step;
    }
    ticks
}

/// Powers of ten inside [lo, hi], falling back to endpoint ticks when the
/// range covers fewer than two decades.
fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut ticks = Vec::new();
    let mut p = 10f64.powf(lo.log10().ceil());
    while p <= hi * (1.0 + 1e-9) {
        ticks.push(p);
        p *= 10.0;
    }
    if ticks.len() < 2 {
        ticks = vec![lo, hi];
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v == v.round() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
