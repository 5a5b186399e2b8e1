//! Deterministic SVG overlay plots of piecewise-linear functions.
//!
//! The rational-to-pixel affine map is declared in a header comment, all
//! coordinates are derived from it by exact arithmetic and printed with a
//! fixed three-decimal format, and nothing (no timestamps, no floats, no
//! locale) depends on the environment: identical input gives byte-identical
//! output.

use num_traits::{One, Signed, Zero};

use ramicalc_core::rat::{format_rat, ratio, Rat};
use ramicalc_core::PlFunction;

const WIDTH: i64 = 720;
const HEIGHT: i64 = 540;
const LEFT: i64 = 60;
const RIGHT: i64 = 690;
const TOP: i64 = 30;
const BOTTOM: i64 = 500;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Fixed three-decimal rendering of an exact rational pixel coordinate.
fn dec3(r: &Rat) -> String {
    let scaled = r * ratio(1000, 1) + ratio(1, 2);
    let n = scaled.floor().to_integer();
    let sign = if n.is_negative() { "-" } else { "" };
    let n = n.abs();
    let int = &n / 1000;
    let frac = &n % 1000;
    format!("{sign}{int}.{frac:03}")
}

struct Frame {
    x_max: Rat,
    y_min: Rat,
    y_max: Rat,
}

impl Frame {
    fn px(&self, x: &Rat) -> String {
        let w = ratio(RIGHT - LEFT, 1);
        dec3(&(ratio(LEFT, 1) + x * w / &self.x_max))
    }

    fn py(&self, y: &Rat) -> String {
        let h = ratio(BOTTOM - TOP, 1);
        let span = &self.y_max - &self.y_min;
        dec3(&(ratio(BOTTOM, 1) - (y - &self.y_min) * h / span))
    }
}

/// Vertex list of one function: domain start, interior breakpoints, and the
/// clip boundary `x_max`.
fn vertices(f: &PlFunction, x_max: &Rat) -> Vec<(Rat, Rat)> {
    let mut pts: Vec<(Rat, Rat)> = f
        .breakpoints()
        .iter()
        .filter(|(x, _)| x <= x_max)
        .cloned()
        .collect();
    if f.domain_start() <= x_max {
        pts.push((x_max.clone(), f.eval(x_max).unwrap()));
    }
    pts.dedup();
    pts
}

/// Renders labeled functions into a standalone SVG document.
pub fn render(funcs: &[(String, PlFunction)], x_max: Option<Rat>) -> Option<String> {
    if funcs.is_empty() {
        return None;
    }
    let x_max = x_max.unwrap_or_else(|| {
        let last = funcs
            .iter()
            .map(|(_, f)| f.breakpoints().last().unwrap().0.clone())
            .max()
            .unwrap();
        (last * ratio(3, 2)).max(Rat::one())
    });
    if !x_max.is_positive() {
        return None;
    }

    let mut y_min = Rat::zero();
    let mut y_max = Rat::zero();
    for (_, f) in funcs {
        for (_, y) in vertices(f, &x_max) {
            if y < y_min {
                y_min = y.clone();
            }
            if y > y_max {
                y_max = y;
            }
        }
    }
    if y_max == y_min {
        y_max = &y_min + Rat::one();
    }
    let frame = Frame {
        x_max,
        y_min,
        y_max,
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "<!-- exact pixel map: px = {LEFT} + x*{}/({}), py = {BOTTOM} - (y - ({}))*{}/({}) -->\n",
        RIGHT - LEFT,
        format_rat(&frame.x_max),
        format_rat(&frame.y_min),
        BOTTOM - TOP,
        format_rat(&(&frame.y_max - &frame.y_min)),
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    // axes
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{LEFT}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">0</text>\n",
        BOTTOM + 16
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"end\">x = {}</text>\n",
        RIGHT,
        BOTTOM + 16,
        format_rat(&frame.x_max)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">y = {}</text>\n",
        4,
        TOP + 4,
        format_rat(&frame.y_max)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{BOTTOM}\" font-family=\"monospace\" font-size=\"12\">y = {}</text>\n",
        4,
        format_rat(&frame.y_min)
    ));

    for (i, (label, f)) in funcs.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts = vertices(f, &frame.x_max);
        let path: Vec<String> = pts
            .iter()
            .map(|(x, y)| format!("{},{}", frame.px(x), frame.py(y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        for (x, y) in f.breakpoints() {
            if x <= &frame.x_max {
                out.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                    frame.px(x),
                    frame.py(y)
                ));
            }
        }
        let ly = TOP + 18 * i as i64;
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            RIGHT - 150,
            ly,
            RIGHT - 126,
            ly
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            RIGHT - 118,
            ly + 4,
            label
        ));
    }
    out.push_str("</svg>\n");
    Some(out)
}
