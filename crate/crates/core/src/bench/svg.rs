//! Self-contained SVG rendering of performance profiles.

use std::fmt::Write;

use super::ProfileCurve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Staircase plot of `rho_s` against `log2(tau)`, one colored curve per solver.
pub fn render_profile_svg(curves: &[ProfileCurve], title: &str) -> String {
    let max_log = curves
        .iter()
        .flat_map(|c| c.breakpoints.iter().map(|&(t, _)| t.log2()))
        .fold(0.0f64, f64::max);
    // extend past the last breakpoint so the final step is visible
    let x_max = if max_log > 0.0 { (max_log * 1.1).ceil() } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |l: f64| LEFT + l / x_max * plot_w;
    let sy = |r: f64| TOP + (1.0 - r) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // axes, ticks, grid
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );
    for i in 0..=5 {
        let r = i as f64 / 5.0;
        let y = sy(r);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end">{r:.1}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let ticks = x_max.min(10.0) as usize;
    for i in 0..=ticks {
        let l = x_max * i as f64 / ticks as f64;
        let x = sx(l);
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0,
            format_tick(l)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">log2(tau)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">rho(tau)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (idx, c) in curves.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let mut d = String::new();
        let mut prev: Option<f64> = None;
        for &(tau, rho) in &c.breakpoints {
            let x = sx(tau.log2());
            match prev {
                None => {
                    let _ = write!(d, "M{x:.2},{:.2}", sy(rho));
                }
                Some(_) => {
                    let _ = write!(d, " H{x:.2} V{:.2}", sy(rho));
                }
            }
            prev = Some(rho);
        }
        let _ = write!(d, " H{:.2}", sx(x_max));
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#);

        let ly = TOP + 10.0 + 20.0 * idx as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            escape(&c.solver)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}
