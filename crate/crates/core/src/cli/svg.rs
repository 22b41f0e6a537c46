use std::fmt::Write as _;

use crate::zeros::{Rect, SweepTrajectory};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Scatter of every tracked zero in the `k` plane, one colour per track.
pub fn sweep_svg(traj: &SweepTrajectory, region: &Rect) -> String {
    let sx = (WIDTH - 2.0 * MARGIN) / region.width();
    let sy = (HEIGHT - 2.0 * MARGIN) / region.height();
    let x = |re: f64| MARGIN + (re - region.re_min) * sx;
    let y = |im: f64| HEIGHT - MARGIN - (im - region.im_min) * sy;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    if region.im_min < 0.0 && region.im_max > 0.0 {
        let y0 = y(0.0);
        let _ = writeln!(
            s,
            r#"<line x1="{MARGIN}" y1="{y0:.2}" x2="{}" y2="{y0:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            WIDTH - MARGIN
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">Re k</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">Im k</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" font-size="12">{}: [{}, {}] x [{}, {}]</text>"#,
        MARGIN - 10.0,
        traj.parameter,
        region.re_min,
        region.re_max,
        region.im_min,
        region.im_max
    );
    for step in &traj.steps {
        for z in &step.zeros {
            let colour = PALETTE[z.track_id % PALETTE.len()];
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#,
                x(z.k.re),
                y(z.k.im)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
