//! SVG output: disk pictures and convergence curves.

use std::fmt::Write as _;

use num_complex::Complex64;

use extremal_rays::teich_ray::ConvergenceReport;
use extremal_rays::Lamination64;

const SIZE: f64 = 512.0;

fn disk_frame(s: &mut String) {
    let c = SIZE / 2.0;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        s,
        r#"<circle cx="{c}" cy="{c}" r="{:.1}" fill="none" stroke="black"/>"#,
        c - 8.0
    );
}

fn to_px(z: Complex64) -> (f64, f64) {
    let r = SIZE / 2.0 - 8.0;
    (SIZE / 2.0 + r * z.re, SIZE / 2.0 - r * z.im)
}

/// Polylines in the unit disk.
pub fn disk_paths(paths: &[&Vec<Complex64>]) -> String {
    let mut s = String::new();
    disk_frame(&mut s);
    for path in paths {
        let pts: Vec<String> = path
            .iter()
            .map(|&z| {
                let (x, y) = to_px(z);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="red" stroke-width="1"/>"#,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Chords joining the endpoints of every atom, opacity scaled by weight.
pub fn geodesics(lam: &Lamination64) -> String {
    let mut s = String::new();
    disk_frame(&mut s);
    let wmax = lam.atoms().iter().map(|a| a.weight).fold(0.0, f64::max);
    for a in lam.atoms() {
        let (x0, y0) = to_px(Complex64::from_polar(1.0, a.ends.0));
        let (x1, y1) = to_px(Complex64::from_polar(1.0, a.ends.1));
        let op = if wmax > 0.0 {
            (a.weight / wmax).max(0.05)
        } else {
            1.0
        };
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="blue" stroke-opacity="{op:.3}"/>"#
        );
    }
    s.push_str("</svg>\n");
    s
}

/// `ε · mod` against `log2 ε`, with error bars and the target line.
pub fn convergence(rep: &ConvergenceReport) -> String {
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let xs: Vec<f64> = rep.rows.iter().map(|r| r.eps.log2()).collect();
    let target = rep.rows.first().map_or(0.0, |r| r.target);
    let lo = rep
        .rows
        .iter()
        .map(|r| r.eps_mod - r.error_bar)
        .fold(target, f64::min);
    let hi = rep
        .rows
        .iter()
        .map(|r| r.eps_mod + r.error_bar)
        .fold(target, f64::max);
    let (xmin, xmax) = xs
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    let span_x = (xmax - xmin).max(1.0);
    let span_y = (hi - lo).max(1e-9);
    let px = |x: f64| pad + (x - xmin) / span_x * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - lo) / span_y * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{pad}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
        py(target),
        w - pad,
        py(target)
    );
    for (r, &x) in rep.rows.iter().zip(&xs) {
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/>"#,
            px(x),
            py(r.eps_mod - r.error_bar),
            py(r.eps_mod + r.error_bar)
        );
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="red"/>"#,
            px(x),
            py(r.eps_mod)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{pad}" y="{}" font-size="12">log2 eps</text>"#,
        h - 10.0
    );
    s.push_str("</svg>\n");
    s
}
