//! Minimal SVG line plots: axes, polylines and a caption. CSV/JSON are the
//! interfaces of record; these are a convenience for eyeballing sweeps.

use std::io;
use std::path::Path;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 50.0;

fn bounds(pts: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let (mut x0, mut x1, mut y0, mut y1) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    (x0, x1, y0, y1)
}

fn polyline(pts: &[(f64, f64)], b: (f64, f64, f64, f64), color: &str) -> String {
    let (x0, x1, y0, y1) = b;
    let map = |x: f64, y: f64| {
        (
            MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN),
            H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN),
        )
    };
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| {
            let (px, py) = map(x, y);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
        coords.join(" ")
    )
}

fn frame(title: &str, b: (f64, f64, f64, f64)) -> String {
    let (x0, x1, y0, y1) = b;
    format!(
        concat!(
            "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#333\"/>",
            "<text x=\"{cx}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{title}</text>",
            "<text x=\"{m}\" y=\"{ylab}\" font-size=\"11\">{x0:.4}</text>",
            "<text x=\"{xr}\" y=\"{ylab}\" text-anchor=\"end\" font-size=\"11\">{x1:.4}</text>",
            "<text x=\"8\" y=\"{yb}\" font-size=\"11\">{y0:.4}</text>",
            "<text x=\"8\" y=\"{yt}\" font-size=\"11\">{y1:.4}</text>"
        ),
        m = MARGIN,
        w = W - 2.0 * MARGIN,
        h = H - 2.0 * MARGIN,
        cx = W / 2.0,
        title = title,
        ylab = H - MARGIN + 18.0,
        xr = W - MARGIN,
        yb = H - MARGIN,
        yt = MARGIN + 4.0,
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
    )
}

pub fn line_plot(
    path: &Path,
    title: &str,
    pts: &[(f64, f64)],
    reference: Option<f64>,
) -> io::Result<()> {
    let mut all = pts.to_vec();
    if let Some(r) = reference {
        let (x0, x1, _, _) = bounds(pts);
        all.push((x0, r));
        all.push((x1, r));
    }
    let b = bounds(&all);
    let mut body = String::new();
    body.push_str(&frame(title, b));
    if let Some(r) = reference {
        let (x0, x1, _, _) = b;
        body.push_str(&polyline(&[(x0, r), (x1, r)], b, "#999"));
    }
    body.push_str(&polyline(pts, b, "#c22"));
    write_svg(path, &body)
}

pub fn overlay_plot(
    path: &Path,
    title: &str,
    a: &[(f64, f64)],
    b_pts: &[(f64, f64)],
) -> io::Result<()> {
    let mut all = a.to_vec();
    all.extend_from_slice(b_pts);
    let b = bounds(&all);
    let mut body = String::new();
    body.push_str(&frame(title, b));
    body.push_str(&polyline(a, b, "#c22"));
    body.push_str(&polyline(b_pts, b, "#2269c2"));
    write_svg(path, &body)
}

fn write_svg(path: &Path, body: &str) -> io::Result<()> {
    let doc = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">{body}</svg>\n"
    );
    std::fs::write(path, doc)
}
